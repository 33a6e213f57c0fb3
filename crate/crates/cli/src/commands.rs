use std::sync::Arc;

use anyhow::{bail, Context, Result};
use cotile::attractor::{attractor_hull, attractor_mask, chaos_game, moran_dimension};
use cotile::centralset::{estimate_central_set, extract_boundary, feasibility_check, touching_circles, CentralSetParams};
use cotile::neighbors::{enumerate_neighbors, enumerate_neighbors_pruned, kappa_estimate};
use cotile::render::{Color, Fill, Layer, LayerSource, Scene, Style};
use cotile::tiling::{
    canonical_tiling, commensurability, patch, scale_census, tiling_prefix, write_tiling_csv, write_tiling_json, Commensurability,
};
use cotile::{Address, Tiling};

use crate::io::{header_path, load_spec, parse_size, parse_window, write_file, write_json, write_svg};
use crate::{shapes, Outcome, ShapeArgs, SpecArgs};

const CIRCLE_STRIDE: usize = 8;

#[allow(clippy::too_many_arguments)]
pub fn attractor(
    args: &SpecArgs,
    points: usize,
    burn_in: usize,
    seed: u64,
    out: Option<String>,
    raster: Option<String>,
    out_mask: Option<String>,
    window: Option<String>,
    out_svg: Option<String>,
) -> Result<Outcome> {
    let (_, spec) = load_spec(args)?;
    if out_mask.is_some() != raster.is_some() {
        bail!("--raster and --out-mask go together");
    }
    let cloud = chaos_game(&spec, points, burn_in, seed)?;
    if let Some(path) = &out {
        write_file(path, |w| cloud.write_csv(w))?;
    }
    if let (Some(size), Some(path)) = (&raster, &out_mask) {
        let (w, h) = parse_size(size, spec.dim())?;
        let win = match &window {
            Some(s) => parse_window(s, spec.dim())?,
            None => {
                let b = attractor_hull(&spec)?.bounding_box();
                let span = (0..b.dim()).map(|k| b.extent(k)).fold(0.0, f64::max);
                b.expanded(0.05 * span)
            }
        };
        let mask = attractor_mask(&spec, &win, w, h, 64)?;
        write_file(path, |out| mask.write_mask_pgm(out))?;
        write_json(&header_path(path), &mask.header("attractor-mask", None))?;
        println!("mask pixels: {}", mask.count_on());
    }
    if let Some(path) = &out_svg {
        let layer = Layer::new(LayerSource::Cloud(Arc::new(cloud.clone())), Style::points(Color::BLACK, 0.5));
        write_svg(path, &Scene::fit(vec![layer], 800)?)?;
    }
    println!("points: {}", cloud.len());
    if let Some(b) = cloud.bounding_box() {
        println!("bounds: {:?} {:?}", b.min, b.max);
    }
    Ok(Outcome::Pass)
}

pub fn dimension(args: &SpecArgs) -> Result<Outcome> {
    let (_, spec) = load_spec(args)?;
    let ratios = spec.ratios();
    let d = moran_dimension(&ratios)?;
    let residual = ratios.iter().map(|r| r.powf(d)).sum::<f64>() - 1.0;
    println!("dimension: {d:.10}");
    println!("residual: {:e}", residual.abs());
    Ok(Outcome::Pass)
}

pub fn neighbors(args: &SpecArgs, depth: usize, cutoff: Option<f64>, out: Option<String>) -> Result<Outcome> {
    let (_, spec) = load_spec(args)?;
    if depth == 0 {
        bail!("--depth must be at least 1");
    }
    let ns = match cutoff {
        Some(c) => enumerate_neighbors_pruned(&spec, depth, c)?,
        None => enumerate_neighbors(&spec, depth)?,
    };
    match &out {
        Some(path) => {
            write_file(path, |w| ns.write_json(w))?;
            println!("neighbor maps: {}", ns.len());
            println!("pairs examined: {}", ns.pairs_examined());
            if ns.identities_excluded() > 0 {
                println!(
                    "warning: {} pairs give the identity; the open set condition fails",
                    ns.identities_excluded()
                );
            }
            if !ns.is_empty() {
                let k = kappa_estimate(&ns, &attractor_hull(&spec)?.bounding_box())?;
                println!("kappa: {}", k.value);
            }
        }
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            ns.write_json(&mut lock)?;
            println!();
        }
    }
    Ok(Outcome::Pass)
}

pub struct CentralOptions {
    pub grid: usize,
    pub depth: usize,
    pub points: usize,
    pub burn_in: usize,
    pub seed: u64,
    pub window: Option<String>,
    pub out_mask: Option<String>,
    pub out_margin: Option<String>,
    pub out_boundary: Option<String>,
    pub circles: Option<String>,
    pub out_svg: Option<String>,
    pub check: bool,
}

pub fn centralset(args: &SpecArgs, o: CentralOptions) -> Result<Outcome> {
    let (_, spec) = load_spec(args)?;
    let mut params = CentralSetParams::for_spec(&spec, o.grid)?;
    if let Some(s) = &o.window {
        params.window = parse_window(s, spec.dim())?;
    }
    params.neighbor_depth = o.depth;
    params.points = o.points;
    params.burn_in = o.burn_in;
    params.seed = o.seed;
    let c = estimate_central_set(&spec, &params)?;

    println!("mask pixels: {}", c.mask.count_on());
    println!("area: {}", c.area());
    if c.osc_warning {
        eprintln!("warning: the central set estimate is empty or nearly so; the open set condition may fail");
    }
    if c.unbounded_suspected {
        eprintln!("warning: the mask reaches the window edge; the central set may be unbounded");
    }
    if let Some(path) = &o.out_mask {
        write_file(path, |w| c.mask.write_mask_pgm(w))?;
        write_json(&header_path(path), &c.mask.header("central-set-mask", None))?;
    }
    if let Some(path) = &o.out_margin {
        let clipped = c.margin.map(|v| if v.is_finite() { v.max(0.0) } else { 0.0 });
        let max = clipped.max_finite().max(f64::MIN_POSITIVE);
        write_file(path, |w| clipped.write_pgm16(w, max))?;
        write_json(&header_path(path), &clipped.header("central-set-margin", Some(max)))?;
    }

    let two_d = spec.dim() == 2;
    let boundary = if two_d && !c.is_empty() {
        Some(extract_boundary(&c)?)
    } else {
        None
    };
    if let Some(path) = &o.out_boundary {
        let Some(b) = &boundary else {
            bail!("--out-boundary needs a non-empty 2-d estimate");
        };
        write_file(path, |w| b.write_csv(w))?;
    }
    let circles = match (&boundary, o.circles.is_some() || o.out_svg.is_some()) {
        (Some(b), true) => touching_circles(&c, b, CIRCLE_STRIDE),
        _ => Vec::new(),
    };
    if let Some(path) = &o.circles {
        if boundary.is_none() {
            bail!("--circles needs a non-empty 2-d estimate");
        }
        let mut text = String::from("x,y,r\n");
        for t in &circles {
            text.push_str(&format!("{},{},{}\n", t.center[0], t.center[1], t.radius));
        }
        crate::io::write_text(path, &text)?;
    }
    if let Some(path) = &o.out_svg {
        let px = params.window.extent(0) / params.width as f64;
        let mut layers = vec![
            Layer::new(LayerSource::Mask(c.mask.clone()), Style::solid(Color(0x9e, 0xc9, 0xe2), 1.0)),
            Layer::new(
                LayerSource::Cloud(Arc::new(c.basin.thinned(px))),
                Style::points(Color(0xa0, 0xa0, 0xa0), 0.5),
            ),
            Layer::new(
                LayerSource::Cloud(Arc::new(c.attractor.thinned(px))),
                Style::points(Color::BLACK, 0.5),
            ),
        ];
        if let Some(b) = &boundary {
            layers.push(Layer::new(
                LayerSource::Polylines(b.polylines.clone()),
                Style::outline(Color(0xd6, 0x27, 0x28), 1.0),
            ));
            layers.push(Layer::new(
                LayerSource::Circles(circles.clone()),
                Style::outline(Color(0x1f, 0x77, 0xb4), 0.5),
            ));
        }
        let scene = Scene::fit(layers, params.width.clamp(256, 1024))?;
        write_svg(path, &scene)?;
    }

    if o.check {
        let report = feasibility_check(&spec, &c);
        println!("{}", report.verdict());
        println!(
            "containment violations: {} ({} beyond band)",
            report.containment_violations, report.containment_beyond_band
        );
        println!(
            "overlapping pairs: {}",
            report.overlaps.iter().filter(|p| p.beyond_band > 0).count()
        );
        return Ok(if report.passed { Outcome::Pass } else { Outcome::Fail });
    }
    Ok(Outcome::Pass)
}

fn tiling_scene(t: &Tiling, width: usize) -> Result<Scene> {
    let style = Style {
        stroke_width: 0.5,
        ..Style::default()
    };
    Ok(Scene::fit(vec![Layer::new(LayerSource::Tiling(t.clone()), style)], width)?)
}

fn print_census(t: &Tiling) {
    println!("tiles: {}", t.len());
    let census = scale_census(t);
    let scales: Vec<String> = census.iter().rev().map(|s| format!("{s:.12}")).collect();
    println!("scales: {}", scales.join(" "));
    match commensurability(t) {
        Commensurability::Commensurate { ratio } => println!("commensurate: ratio {ratio:.12}"),
        Commensurability::Incommensurate => println!("incommensurate"),
        Commensurability::TooFewTiles => {}
    }
}

#[allow(clippy::too_many_arguments)]
pub fn tile(
    args: &SpecArgs,
    shape_args: &ShapeArgs,
    address: &str,
    k: usize,
    out_json: Option<String>,
    out_csv: Option<String>,
    out_svg: Option<String>,
    window: Option<String>,
    width: usize,
) -> Result<Outcome> {
    let (file, spec) = load_spec(args)?;
    let address: Address = address.parse().with_context(|| format!("bad address {address:?}"))?;
    address.validate(spec.len())?;
    let shape = shapes::resolve(&file, &spec, shape_args)?;
    let mut t = tiling_prefix(&spec, spec.cost_function(), shape, &address.prefix(k))?;
    if let Some(s) = &window {
        t = patch(&t, &parse_window(s, spec.dim())?);
    }
    if let Some(path) = &out_json {
        write_file(path, |w| write_tiling_json(&t, w))?;
    }
    if let Some(path) = &out_csv {
        write_file(path, |w| write_tiling_csv(&t, w))?;
    }
    if let Some(path) = &out_svg {
        write_svg(path, &tiling_scene(&t, width)?)?;
    }
    print_census(&t);
    Ok(Outcome::Pass)
}

pub fn canonical(
    args: &SpecArgs,
    shape_args: &ShapeArgs,
    k: u32,
    counts: bool,
    out_json: Option<String>,
    out_svg: Option<String>,
    width: usize,
) -> Result<Outcome> {
    let (file, spec) = load_spec(args)?;
    spec.integer_exponents().context("canonical tilings need integer scale exponents")?;
    let shape = shapes::resolve(&file, &spec, shape_args)?;
    if counts {
        let n: Vec<String> = (0..=k)
            .map(|l| canonical_tiling(&spec, l, shape.clone()).map(|t| t.len().to_string()))
            .collect::<cotile::Result<_>>()?;
        println!("counts: {}", n.join(" "));
    }
    let t = canonical_tiling(&spec, k, shape)?;
    if let Some(path) = &out_json {
        write_file(path, |w| write_tiling_json(&t, w))?;
    }
    if let Some(path) = &out_svg {
        let style = Style {
            stroke_width: 0.5,
            fill: Fill::ByScale,
            ..Style::default()
        };
        write_svg(path, &Scene::fit(vec![Layer::new(LayerSource::Tiling(t.clone()), style)], width)?)?;
    }
    print_census(&t);
    Ok(Outcome::Pass)
}
