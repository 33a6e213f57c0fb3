use anyhow::{bail, Context, Result};
use cotile::attractor::Window;
use cotile::centralset::{estimate_central_set, tile_shape_from_mask, CentralSetParams};
use cotile::tiling::attractor_shape;
use cotile::{IfsSpec, SpecFile, TileShape, TileSpec};

use crate::io::parse_numbers;
use crate::ShapeArgs;

/// The `--tile` flag, or the spec's own tile when it is absent.
pub fn resolve(file: &SpecFile, spec: &IfsSpec, args: &ShapeArgs) -> Result<TileShape> {
    let tile = match &args.tile {
        Some(s) => parse_tile(s)?,
        None => file.tile(),
    };
    let shape = build(&tile, spec, args)?;
    if shape.dim() != spec.dim() {
        bail!("tile is {}-d but the system is {}-d", shape.dim(), spec.dim());
    }
    Ok(shape)
}

fn parse_tile(s: &str) -> Result<TileSpec> {
    let (kind, data) = s.split_once(':').unwrap_or((s, ""));
    Ok(match kind {
        "attractor" => TileSpec::Attractor,
        "central" => TileSpec::Central,
        "interval" => {
            let v = parse_numbers(data, "interval")?;
            if v.len() != 2 {
                bail!("interval: expected lo,hi");
            }
            TileSpec::Interval([v[0], v[1]])
        }
        "box" => {
            let v = parse_numbers(data, "box")?;
            if v.len() % 2 != 0 || v.is_empty() {
                bail!("box: expected lo,hi or x0,y0,x1,y1");
            }
            let d = v.len() / 2;
            TileSpec::Box {
                min: v[..d].to_vec(),
                max: v[d..].to_vec(),
            }
        }
        "polygon" => {
            let text = std::fs::read_to_string(data).with_context(|| format!("cannot read polygon file {data}"))?;
            let vertices: Vec<[f64; 2]> =
                serde_json::from_str(&text).with_context(|| format!("{data}: expected a JSON list of [x, y] pairs"))?;
            TileSpec::Polygon(vertices)
        }
        other => bail!("unknown tile kind {other:?} (attractor, central, polygon:FILE, box:..., interval:lo,hi)"),
    })
}

fn build(tile: &TileSpec, spec: &IfsSpec, args: &ShapeArgs) -> Result<TileShape> {
    Ok(match tile {
        TileSpec::Attractor => attractor_shape(spec, args.grid)?,
        TileSpec::Central => {
            let Some(seed) = args.seed else {
                bail!("--seed is required for the central tile");
            };
            let mut params = CentralSetParams::for_spec(spec, args.grid)?;
            params.neighbor_depth = args.depth;
            params.points = args.points;
            params.seed = seed;
            let c = estimate_central_set(spec, &params)?;
            if c.is_empty() {
                bail!("the central set estimate is empty; the open set condition probably fails");
            }
            tile_shape_from_mask(&c)?
        }
        TileSpec::Interval([lo, hi]) => TileShape::interval(*lo, *hi)?,
        TileSpec::Box { min, max } => TileShape::Box(Window::new(min.clone(), max.clone())?),
        TileSpec::Polygon(v) => TileShape::polygon(v.clone())?,
    })
}
