use std::fs::File;
use std::io::{BufWriter, Write};

use anyhow::{bail, Context, Result};
use cotile::attractor::Window;
use cotile::render::{render_svg, Scene};
use cotile::{IfsSpec, SpecFile};

use crate::SpecArgs;

pub fn load_spec(args: &SpecArgs) -> Result<(SpecFile, IfsSpec)> {
    let file = SpecFile::load(&args.spec)?;
    let spec =
        if args.force_costs { file.to_ifs_forced() } else { file.to_ifs() }.with_context(|| format!("{}: invalid IFS", args.spec))?;
    Ok((file, spec))
}

pub fn create(path: &str) -> Result<BufWriter<File>> {
    let f = File::create(path).with_context(|| format!("cannot create {path}"))?;
    Ok(BufWriter::new(f))
}

/// Runs `write` against a fresh file at `path` and flushes it.
pub fn write_file<F>(path: &str, write: F) -> Result<()>
where
    F: FnOnce(&mut BufWriter<File>) -> cotile::Result<()>,
{
    let mut out = create(path)?;
    write(&mut out).with_context(|| format!("writing {path}"))?;
    out.flush().with_context(|| format!("writing {path}"))?;
    Ok(())
}

pub fn write_text(path: &str, text: &str) -> Result<()> {
    std::fs::write(path, text).with_context(|| format!("cannot write {path}"))
}

pub fn write_svg(path: &str, scene: &Scene) -> Result<()> {
    write_text(path, &render_svg(scene)?)
}

/// Writes a JSON value with a trailing newline.
pub fn write_json(path: &str, value: &impl serde::Serialize) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    write_text(path, &text)
}

pub fn parse_numbers(s: &str, what: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|v| v.trim().parse::<f64>().with_context(|| format!("{what}: bad number {v:?}")))
        .collect()
}

/// `lo,hi` in 1-d or `x0,y0,x1,y1` in 2-d.
pub fn parse_window(s: &str, dim: usize) -> Result<Window> {
    let v = parse_numbers(s, "window")?;
    if v.len() != 2 * dim {
        bail!("window: expected {} numbers for a {dim}-d system, got {}", 2 * dim, v.len());
    }
    Ok(Window::new(v[..dim].to_vec(), v[dim..].to_vec())?)
}

/// `WxH`, or `W` alone for 1-d systems.
pub fn parse_size(s: &str, dim: usize) -> Result<(usize, usize)> {
    let parse = |v: &str| v.trim().parse::<usize>().with_context(|| format!("raster: bad size {s:?}"));
    let (w, h) = match s.split_once(['x', 'X']) {
        Some((w, h)) => (parse(w)?, parse(h)?),
        None if dim == 1 => (parse(s)?, 1),
        None => bail!("raster: expected WxH, got {s:?}"),
    };
    if w == 0 || h == 0 {
        bail!("raster: size must be positive");
    }
    if dim == 1 && h != 1 {
        bail!("raster: 1-d rasters have height 1");
    }
    Ok((w, h))
}

/// `mask.pgm` gets its header at `mask.pgm.json`.
pub fn header_path(path: &str) -> String {
    format!("{path}.json")
}
