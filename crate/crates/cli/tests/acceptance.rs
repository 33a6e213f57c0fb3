//! Acceptance gate: one PASS/FAIL line per criterion, with its runtime limit.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use anyhow::{anyhow, bail, ensure, Result};
use cotile::attractor::{attractor_hull, moran_dimension, Window};
use cotile::centralset::{estimate_central_set, feasibility_check, tile_shape_from_mask, CentralSetEstimate, CentralSetParams};
use cotile::specfile::BUILTIN_SPECS;
use cotile::tiling::{
    canonical_relation_check, canonical_tiling, commensurability, coverage_fraction, overlap_report, shift_equivalence_check,
    tiling_prefix, tiling_sequence, Commensurability,
};
use cotile::{Address, CostFunction, IfsSpec, Similitude, SpecFile, TileShape, Tiling, Word};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Criterion {
    id: &'static str,
    what: &'static str,
    limit: Duration,
    run: fn() -> Result<String>,
}

const fn secs(s: u64) -> Duration {
    Duration::from_secs(s)
}

const CRITERIA: [Criterion; 11] = [
    Criterion {
        id: "AC1",
        what: "dyadic closed forms",
        limit: secs(1),
        run: dyadic_closed_forms,
    },
    Criterion {
        id: "AC2",
        what: "first-level tiling is the list of images",
        limit: secs(1),
        run: first_level_tiling,
    },
    Criterion {
        id: "AC3",
        what: "nesting on 50 random configurations",
        limit: secs(30),
        run: nesting,
    },
    Criterion {
        id: "AC4",
        what: "similarity dimension",
        limit: secs(1),
        run: dimension,
    },
    Criterion {
        id: "AC5",
        what: "Sierpinski central set is a hexagon",
        limit: secs(120),
        run: sierpinski_central_set,
    },
    Criterion {
        id: "AC6",
        what: "Sierpinski central tilings do not overlap",
        limit: secs(120),
        run: central_tilings_disjoint,
    },
    Criterion {
        id: "AC7",
        what: "shift equivalence on 20 instances",
        limit: secs(10),
        run: shift_equivalence,
    },
    Criterion {
        id: "AC8",
        what: "canonical relation and tile counts",
        limit: secs(10),
        run: canonical_relation,
    },
    Criterion {
        id: "AC9",
        what: "commensurability",
        limit: secs(30),
        run: commensurability_classes,
    },
    Criterion {
        id: "AC10",
        what: "square tilings cover a centered window",
        limit: secs(60),
        run: coverage,
    },
    Criterion {
        id: "AC11",
        what: "seeded commands are deterministic",
        limit: secs(120),
        run: determinism,
    },
];

fn main() -> ExitCode {
    let only: Vec<String> = std::env::args().skip(1).filter(|a| a.starts_with("AC")).collect();
    let mut failed = 0;
    for c in CRITERIA.iter().filter(|c| only.is_empty() || only.iter().any(|o| o == c.id)) {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(c.run)).unwrap_or_else(|_| Err(anyhow!("panicked")));
        let took = start.elapsed();
        let (pass, detail) = match outcome {
            Ok(d) if took <= c.limit => (true, d),
            Ok(d) => (false, format!("{d}; over the {}s limit", c.limit.as_secs())),
            Err(e) => (false, format!("{e:#}")),
        };
        failed += usize::from(!pass);
        let verdict = if pass { "PASS" } else { "FAIL" };
        println!("{:<5} {verdict}  {} ({:.2}s): {detail}", c.id, c.what, took.as_secs_f64());
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}

fn builtin(name: &str) -> IfsSpec {
    SpecFile::builtin(name).unwrap().to_ifs().unwrap()
}

fn box_tile(spec: &IfsSpec) -> TileShape {
    TileShape::Box(attractor_hull(spec).unwrap().bounding_box())
}

fn interval_ends(t: &Tiling) -> Vec<(f64, f64)> {
    t.tiles()
        .iter()
        .map(|tile| (tile.transform.apply(&[0.0])[0], tile.transform.apply(&[1.0])[0]))
        .collect()
}

fn dyadic_closed_forms() -> Result<String> {
    let spec = builtin("dyadic-1d");
    let one = Address::constant(1);
    let mut worst: f64 = 0.0;
    for k in 0..=5 {
        let prefix = one.prefix(k);
        let unit = tiling_prefix(&spec, spec.cost_function(), TileShape::interval(0.0, 1.0)?, &prefix)?;
        let wide = tiling_prefix(&spec, spec.cost_function(), TileShape::interval(-1.0 / 3.0, 4.0 / 3.0)?, &prefix)?;
        // 2^k x maps the cut set of words of length k + 1 onto n = 1 … 2^(k+1)
        let n_max = 1usize << (k + 1);
        ensure!(
            unit.len() == n_max && wide.len() == n_max,
            "k = {k}: {} tiles, expected {n_max}",
            unit.len()
        );
        for (n, ((a, b), tile)) in (1..=n_max).zip(interval_ends(&unit).into_iter().zip(wide.tiles())) {
            let n = n as f64;
            let lo = tile.transform.apply(&[-1.0 / 3.0])[0];
            let hi = tile.transform.apply(&[4.0 / 3.0])[0];
            for err in [
                a - (n - 1.0) / 2.0,
                b - n / 2.0,
                lo - (-1.0 / 6.0 + (n - 1.0) / 2.0),
                hi - (1.0 / 6.0 + n / 2.0),
            ] {
                worst = worst.max(err.abs());
            }
        }
    }
    ensure!(worst < 1e-12, "endpoint error {worst:e}");
    Ok(format!("k ≤ 5, worst endpoint error {worst:e}"))
}

fn sort_key(s: &Similitude) -> Vec<i64> {
    s.entries().map(|v| (v * 1e9).round() as i64).collect()
}

fn first_level_tiling() -> Result<String> {
    for (name, _) in BUILTIN_SPECS {
        let spec = builtin(name);
        let t = tiling_prefix(&spec, spec.cost_function(), box_tile(&spec), &Word::empty())?;
        let mut got = t.transforms();
        let mut want = spec.maps().to_vec();
        got.sort_by_key(sort_key);
        want.sort_by_key(sort_key);
        ensure!(got.len() == want.len(), "{name}: {} tiles for {} maps", got.len(), want.len());
        for (g, w) in got.iter().zip(&want) {
            ensure!(g.approx_eq(w, 0.0), "{name}: {g} is not {w}");
        }
    }
    Ok(format!("{} bundled specs", BUILTIN_SPECS.len()))
}

fn random_word(rng: &mut ChaCha8Rng, m: usize, len: usize) -> Word {
    Word::new((0..len).map(|_| rng.gen_range(1..=m as u8)).collect()).unwrap()
}

fn nesting() -> Result<String> {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut levels = 0;
    for n in 0..50 {
        let (name, _) = BUILTIN_SPECS[n % BUILTIN_SPECS.len()];
        let spec = builtin(name);
        let m = spec.len();
        let costs: Vec<f64> = (0..m).map(|_| rng.gen_range(1.0..2.0)).collect();
        let cf = CostFunction::new(costs)?;
        let pre = rng.gen_range(0..4);
        let per = rng.gen_range(1..4);
        let a = Address::new(random_word(&mut rng, m, pre), random_word(&mut rng, m, per))?;
        let k = rng.gen_range(1..=6);
        tiling_sequence(&spec, &cf, box_tile(&spec), &a, k).map_err(|e| anyhow!("{name} {a} {:?} k = {k}: {e}", cf.costs()))?;
        levels += k;
    }
    Ok(format!("50 configurations, {levels} inclusions, no violations"))
}

fn dimension() -> Result<String> {
    let mut worst: f64 = 0.0;
    for (name, _) in BUILTIN_SPECS {
        let r = builtin(name).ratios();
        let d = moran_dimension(&r)?;
        worst = worst.max((r.iter().map(|x| x.powf(d)).sum::<f64>() - 1.0).abs());
    }
    ensure!(worst < 1e-12, "residual {worst:e}");
    let dyadic = moran_dimension(&builtin("dyadic-1d").ratios())?;
    ensure!((dyadic - 1.0).abs() < 1e-12, "dyadic dimension {dyadic}");
    let sierpinski = moran_dimension(&builtin("sierpinski").ratios())?;
    ensure!(
        (sierpinski - 3f64.ln() / 2f64.ln()).abs() < 1e-10,
        "Sierpinski dimension {sierpinski}"
    );
    Ok(format!("worst residual {worst:e}, Sierpinski {sierpinski:.10}"))
}

fn sierpinski_estimate(resolution: usize) -> Result<CentralSetEstimate> {
    let spec = builtin("sierpinski");
    let mut p = CentralSetParams::for_spec(&spec, resolution)?;
    p.neighbor_depth = 4;
    p.seed = 1;
    Ok(estimate_central_set(&spec, &p)?)
}

/// Signed distance to the regular hexagon about the centroid of the
/// triangle whose alternate vertices are the triangle's corners; positive inside.
fn hexagon_depth(p: &[f64]) -> f64 {
    let (x, y) = (p[0] - 0.5, p[1] - 3f64.sqrt() / 6.0);
    (0..6)
        .map(|k| {
            let a = k as f64 * std::f64::consts::PI / 3.0;
            0.5 - (x * a.cos() + y * a.sin())
        })
        .fold(f64::INFINITY, f64::min)
}

fn sierpinski_central_set() -> Result<String> {
    let fine = sierpinski_estimate(1024)?;
    let coarse = sierpinski_estimate(512)?;
    let band = 2.0 * fine.mask.pixel_diagonal();
    let mut wrong = 0;
    for j in 0..fine.mask.height() {
        for i in 0..fine.mask.width() {
            let d = hexagon_depth(&fine.mask.center(i, j));
            if d.abs() > band && fine.mask.is_on(i, j) != (d > 0.0) {
                wrong += 1;
            }
        }
    }
    ensure!(wrong == 0, "{wrong} pixels disagree with the hexagon outside the band");
    let change = (fine.area() - coarse.area()).abs() / fine.area();
    ensure!(change < 0.02, "area moved by {:.2}% between 512 and 1024", 100.0 * change);
    let report = feasibility_check(&builtin("sierpinski"), &fine);
    ensure!(
        report.passed,
        "{}: {} containment violations beyond the band",
        report.verdict(),
        report.containment_beyond_band
    );
    Ok(format!(
        "area {:.4} (hexagon {:.4}), change {:.3}%, {} containment violations all within the band",
        fine.area(),
        3f64.sqrt() / 2.0,
        100.0 * change,
        report.containment_violations
    ))
}

fn central_tilings_disjoint() -> Result<String> {
    let spec = builtin("sierpinski");
    let shape = tile_shape_from_mask(&sierpinski_estimate(1024)?)?;
    let mut pairs = 0;
    let mut runs = 0;
    for a in ["(1)", "(12)", "(123)", "2(31)"] {
        let a: Address = a.parse()?;
        for k in 0..=4 {
            let t = tiling_prefix(&spec, spec.cost_function(), shape.clone(), &a.prefix(k))?;
            let r = overlap_report(&t, 1024)?;
            ensure!(r.overlapping() == 0, "Ξ({a}|{k}): {} overlapping pairs", r.overlapping());
            pairs += r.touching();
            runs += 1;
        }
    }
    Ok(format!("{runs} tilings, {pairs} touching pairs, none overlapping"))
}

/// A word of the given total cost with digits drawn at random, or `None`
/// when the draw overshoots.
fn word_of_cost(rng: &mut ChaCha8Rng, spec: &IfsSpec, cost: u32) -> Option<Word> {
    let exps = spec.integer_exponents().ok()?;
    let mut digits = Vec::new();
    let mut left = cost as i64;
    while left > 0 {
        let d = rng.gen_range(1..=spec.len() as u8);
        left -= exps[d as usize - 1] as i64;
        digits.push(d);
    }
    (left == 0).then(|| Word::new(digits).unwrap())
}

fn same_sets(a: &[Similitude], b: &[Similitude]) -> bool {
    a.len() == b.len()
        && a.iter().all(|s| b.iter().any(|t| s.approx_eq(t, 1e-9)))
        && b.iter().all(|s| a.iter().any(|t| s.approx_eq(t, 1e-9)))
}

fn shift_equivalence() -> Result<String> {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let k_max = 4;
    let mut done = 0;
    while done < 20 {
        let name = if done % 2 == 0 { "dyadic-1d" } else { "golden" };
        let spec = builtin(name);
        let cost = rng.gen_range(1..=3);
        let (Some(u), Some(v)) = (word_of_cost(&mut rng, &spec, cost), word_of_cost(&mut rng, &spec, cost)) else {
            continue;
        };
        let (pre, per) = (rng.gen_range(0..3), rng.gen_range(1..3));
        let tail = Address::new(random_word(&mut rng, spec.len(), pre), random_word(&mut rng, spec.len(), per))?;
        let (i, j) = (tail.prepend(&u), tail.prepend(&v));
        let (p, q) = (u.len(), v.len());
        let shape = box_tile(&spec);
        let e = shift_equivalence_check(&spec, spec.cost_function(), shape.clone(), &i, &j, p, q, k_max)
            .map_err(|err| anyhow!("{name}: i = {i}, j = {j}, p = {p}, q = {q}: {err}"))?;
        // independent pairing of the two transform sets
        for r in 0..=k_max {
            let left = tiling_prefix(&spec, spec.cost_function(), shape.clone(), &i.prefix(p + r))?.transforms();
            let right: Vec<Similitude> = tiling_prefix(&spec, spec.cost_function(), shape.clone(), &j.prefix(q + r))?
                .transforms()
                .iter()
                .map(|t| e.compose(t))
                .collect::<cotile::Result<_>>()?;
            ensure!(same_sets(&left, &right), "{name}: i = {i}, j = {j}: sets differ at level {r}");
        }
        done += 1;
    }
    Ok(format!("{done} instances, k_max = {k_max}"))
}

fn canonical_relation() -> Result<String> {
    for name in ["golden", "quartic"] {
        let spec = builtin(name);
        for a in ["(1)", "(12)"] {
            let a: Address = a.parse()?;
            for k in 0..=4 {
                ensure!(canonical_relation_check(&spec, &a, k, box_tile(&spec))?, "{name} {a} k = {k}");
            }
        }
    }
    let spec = builtin("golden");
    let counts: Vec<usize> = (0..=12)
        .map(|k| canonical_tiling(&spec, k, box_tile(&spec)).map(|t| t.len()))
        .collect::<cotile::Result<_>>()?;
    ensure!(counts[..2] == [2, 3], "T_0, T_1 have {} and {} tiles", counts[0], counts[1]);
    ensure!(counts.windows(3).all(|w| w[2] == w[1] + w[0]), "counts {counts:?}");
    Ok(format!("golden counts {counts:?}"))
}

fn commensurability_classes() -> Result<String> {
    let golden = builtin("golden");
    let s = (5f64.sqrt() - 1.0) / 2.0;
    for k in 2..=8 {
        match commensurability(&canonical_tiling(&golden, k, box_tile(&golden))?) {
            Commensurability::Commensurate { ratio } if (ratio - s).abs() < 1e-9 => {}
            other => bail!("golden T_{k}: {other:?}"),
        }
    }
    let fern = SpecFile::builtin("fern").unwrap().to_ifs_forced()?;
    let t = tiling_prefix(&fern, fern.cost_function(), box_tile(&fern), &Address::constant(1).prefix(16))?;
    let class = commensurability(&t);
    ensure!(class == Commensurability::Incommensurate, "fern: {class:?}");
    Ok(format!("golden ratio {s:.12}, fern incommensurate over {} tiles", t.len()))
}

fn coverage() -> Result<String> {
    let spec = builtin("square-4map");
    let square = TileShape::polygon(vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]])?;
    let a = Address::disjunctive(4, 2);
    let window = Window::new(vec![-0.5, -0.5], vec![1.5, 1.5])?;
    let mut last = 0.0;
    for k in 0..=6 {
        let t = tiling_prefix(&spec, spec.cost_function(), square.clone(), &a.prefix(k))?;
        last = coverage_fraction(&t, &window, 512, 512)?;
        if last >= 0.999 {
            return Ok(format!("coverage {last} at k = {k} for {a}"));
        }
    }
    bail!("coverage {last} at k = 6")
}

fn run_cotile(dir: &Path, args: &[&str]) -> Result<Vec<u8>> {
    let o = Command::new(env!("CARGO_BIN_EXE_cotile")).current_dir(dir).args(args).output()?;
    ensure!(
        matches!(o.status.code(), Some(0 | 1)),
        "{args:?}: {}",
        String::from_utf8_lossy(&o.stderr)
    );
    Ok(o.stdout)
}

/// Every file in `dir`, sorted by name.
fn contents(dir: &Path) -> Result<Vec<(String, Vec<u8>)>> {
    let mut out = Vec::new();
    for entry in std::fs::read_dir(dir)? {
        let entry = entry?;
        out.push((entry.file_name().to_string_lossy().into_owned(), std::fs::read(entry.path())?));
    }
    out.sort();
    Ok(out)
}

const SEEDED: [&[&str]; 6] = [
    &[
        "attractor",
        "builtin:fern",
        "--points",
        "50000",
        "--seed",
        "7",
        "--out",
        "a.csv",
        "--raster",
        "128x128",
        "--out-mask",
        "a.pgm",
        "--out-svg",
        "a.svg",
    ],
    &[
        "centralset",
        "builtin:sierpinski",
        "--grid",
        "128",
        "--points",
        "100000",
        "--seed",
        "7",
        "--out-mask",
        "c.pgm",
        "--out-margin",
        "m.pgm",
        "--out-boundary",
        "b.csv",
        "--circles",
        "r.csv",
        "--out-svg",
        "c.svg",
        "--check",
    ],
    &[
        "tile",
        "builtin:sierpinski",
        "--tile",
        "central",
        "--grid",
        "128",
        "--points",
        "100000",
        "--seed",
        "7",
        "--address",
        "(12)",
        "--k",
        "2",
        "--out-json",
        "t.json",
        "--out-csv",
        "t.csv",
        "--out-svg",
        "t.svg",
    ],
    &[
        "check",
        "builtin:golden",
        "--suite",
        "nesting",
        "--trials",
        "5",
        "--k",
        "4",
        "--seed",
        "7",
    ],
    &[
        "check",
        "builtin:sierpinski",
        "--suite",
        "feasibility",
        "--grid",
        "128",
        "--points",
        "100000",
        "--seed",
        "7",
    ],
    &[
        "check",
        "builtin:sierpinski",
        "--suite",
        "overlap",
        "--tile",
        "central",
        "--grid",
        "128",
        "--points",
        "100000",
        "--seed",
        "7",
        "--k",
        "2",
    ],
];

fn determinism() -> Result<String> {
    let mut files = 0;
    for args in SEEDED {
        let (a, b) = (tempfile::tempdir()?, tempfile::tempdir()?);
        let (out_a, out_b) = (run_cotile(a.path(), args)?, run_cotile(b.path(), args)?);
        ensure!(out_a == out_b, "{} {}: stdout differs", args[0], args[1]);
        let (fa, fb) = (contents(a.path())?, contents(b.path())?);
        ensure!(fa == fb, "{} {}: output files differ", args[0], args[1]);
        files += fa.len();
    }
    Ok(format!("{} commands, {files} output files byte-identical", SEEDED.len()))
}
