use std::io::Write;

use serde_json::{json, Value};

use crate::error::{Error, Result};

use super::build::Tiling;

/// `{shape_table, tiles, metadata}` with tiles in `(word_i, word_j)` order.
/// `m` is the row-major linear part and `t` the translation.
pub fn tiling_to_json(t: &Tiling) -> Value {
    let tiles: Vec<Value> = t
        .tiles()
        .iter()
        .map(|tile| {
            json!({
                "m": tile.transform.linear(),
                "t": tile.transform.translation(),
                "shape": tile.shape,
                "word_i": tile.word_i.to_string(),
                "word_j": tile.word_j.to_string(),
                "cost": tile.cost,
                "scale": tile.scale(),
            })
        })
        .collect();
    json!({
        "shape_table": t.shapes().iter().map(|s| s.to_json()).collect::<Vec<_>>(),
        "tiles": tiles,
        "metadata": {
            "address_prefix": t.meta().address_prefix.to_string(),
            "budget": t.meta().budget,
            "dimension": t.dim(),
            "count": t.len(),
        },
    })
}

pub fn write_tiling_json<W: Write>(t: &Tiling, mut out: W) -> Result<()> {
    serde_json::to_writer_pretty(&mut out, &tiling_to_json(t)).map_err(|e| Error::Io(e.to_string()))?;
    writeln!(out)?;
    Ok(())
}

/// One row per tile: `word_i,word_j,a,b,e,c,d,g` for `[a b e; c d g]` in the
/// plane, `word_i,word_j,a,b` for `x ↦ a·x + b` on the line.
pub fn write_tiling_csv<W: Write>(t: &Tiling, mut out: W) -> Result<()> {
    let header = if t.dim() == 1 {
        "word_i,word_j,a,b"
    } else {
        "word_i,word_j,a,b,e,c,d,g"
    };
    writeln!(out, "{header}")?;
    for tile in t.tiles() {
        let (m, v) = (tile.transform.linear(), tile.transform.translation());
        let nums: Vec<f64> = if t.dim() == 1 {
            vec![m[0], v[0]]
        } else {
            vec![m[0], m[1], v[0], m[2], m[3], v[1]]
        };
        let row: Vec<String> = nums.iter().map(|x| x.to_string()).collect();
        writeln!(out, "{},{},{}", tile.word_i, tile.word_j, row.join(","))?;
    }
    Ok(())
}
