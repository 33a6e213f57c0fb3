use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn cotile(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cotile"))
        .args(args)
        .output()
        .expect("spawn cotile")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[track_caller]
fn ok(args: &[&str]) -> String {
    let o = cotile(args);
    assert_eq!(o.status.code(), Some(0), "{args:?}\n{}", stderr(&o));
    stdout(&o)
}

fn path(dir: &TempDir, name: &str) -> String {
    dir.path().join(name).to_str().unwrap().to_owned()
}

/// The value printed after `label:` on some line of `out`.
fn field<'a>(out: &'a str, label: &str) -> &'a str {
    out.lines()
        .find_map(|l| l.strip_prefix(label).and_then(|r| r.strip_prefix(':')))
        .unwrap_or_else(|| panic!("no {label:?} in\n{out}"))
        .trim()
}

fn read(p: &str) -> String {
    std::fs::read_to_string(p).unwrap()
}

fn golden_path(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name)
}

/// Compares `actual` with a stored file, rewriting it when `COTILE_BLESS` is set.
fn check_golden(name: &str, actual: &str, same: impl Fn(&str, &str) -> bool) {
    let p = golden_path(name);
    if std::env::var_os("COTILE_BLESS").is_some() {
        std::fs::create_dir_all(p.parent().unwrap()).unwrap();
        std::fs::write(&p, actual).unwrap();
        return;
    }
    let want = std::fs::read_to_string(&p).unwrap_or_else(|e| panic!("{}: {e}", p.display()));
    assert!(same(&want, actual), "output differs from {}", p.display());
}

fn json_close(a: &Value, b: &Value) -> bool {
    match (a, b) {
        (Value::Number(x), Value::Number(y)) => (x.as_f64().unwrap() - y.as_f64().unwrap()).abs() < 1e-9,
        (Value::Array(x), Value::Array(y)) => x.len() == y.len() && x.iter().zip(y).all(|(p, q)| json_close(p, q)),
        (Value::Object(x), Value::Object(y)) => x.len() == y.len() && x.iter().all(|(k, v)| y.get(k).is_some_and(|w| json_close(v, w))),
        _ => a == b,
    }
}

fn csv_close(a: &str, b: &str) -> bool {
    let (a, b): (Vec<_>, Vec<_>) = (a.lines().collect(), b.lines().collect());
    a.len() == b.len()
        && a.iter().zip(&b).all(|(x, y)| {
            let (x, y): (Vec<_>, Vec<_>) = (x.split(',').collect(), y.split(',').collect());
            x.len() == y.len()
                && x.iter().zip(&y).all(|(p, q)| match (p.parse::<f64>(), q.parse::<f64>()) {
                    (Ok(p), Ok(q)) => (p - q).abs() < 1e-9,
                    _ => p == q,
                })
        })
}

fn numbers(csv: &str) -> Vec<Vec<f64>> {
    csv.lines()
        .filter_map(|l| l.split(',').map(|v| v.parse::<f64>().ok()).collect::<Option<Vec<_>>>())
        .collect()
}

#[test]
fn dyadic_attractor_stays_in_the_unit_interval() {
    let dir = TempDir::new().unwrap();
    let out = path(&dir, "a.csv");
    ok(&["attractor", "builtin:dyadic-1d", "--points", "10000", "--seed", "3", "--out", &out]);
    let pts = numbers(&read(&out));
    assert_eq!(pts.len(), 10_000);
    assert!(pts.iter().all(|p| p.len() == 1 && p[0] >= -1e-9 && p[0] <= 1.0 + 1e-9));
}

#[test]
fn missing_spec_file_is_a_usage_error() {
    let o = cotile(&["attractor", "no/such/spec.json", "--seed", "1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("no/such/spec.json"), "{}", stderr(&o));
}

#[test]
fn attractor_output_is_reproducible() {
    let dir = TempDir::new().unwrap();
    let run = |tag: &str| {
        let csv = path(&dir, &format!("{tag}.csv"));
        let mask = path(&dir, &format!("{tag}.pgm"));
        ok(&[
            "attractor",
            "builtin:fern",
            "--points",
            "20000",
            "--seed",
            "1",
            "--out",
            &csv,
            "--raster",
            "64x64",
            "--out-mask",
            &mask,
        ]);
        (std::fs::read(&csv).unwrap(), std::fs::read(&mask).unwrap())
    };
    assert_eq!(run("a"), run("b"));
}

fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

#[test]
fn dimension_values() {
    let dim = |name: &str| field(&ok(&["dimension", name]), "dimension").parse::<f64>().unwrap();
    assert!((dim("builtin:dyadic-1d") - 1.0).abs() < 1e-10);
    assert!((dim("builtin:sierpinski") - 1.584_962_500_7).abs() < 1e-10);

    // ratios of the three fern maps, from their matrices
    let spec: Value = serde_json::from_str(&read(concat!(env!("CARGO_MANIFEST_DIR"), "/../core/specs/fern.json"))).unwrap();
    let ratios: Vec<f64> = spec["maps"]
        .as_array()
        .unwrap()
        .iter()
        .map(|m| {
            let a = &m["matrix"];
            let (p, q) = (a[0][0].as_f64().unwrap(), a[1][0].as_f64().unwrap());
            (p * p + q * q).sqrt()
        })
        .collect();
    let oracle = bisect(|d| 1.0 - ratios.iter().map(|r| r.powf(d)).sum::<f64>(), 0.0, 10.0);
    assert!((dim("builtin:fern") - oracle).abs() < 1e-9);
}

#[test]
fn dyadic_neighbors_are_unit_shifts() {
    let maps: Value = serde_json::from_str(&ok(&["neighbors", "builtin:dyadic-1d", "--depth", "1"])).unwrap();
    let mut shifts: Vec<f64> = maps
        .as_array()
        .unwrap()
        .iter()
        .map(|m| {
            assert_eq!(m["matrix"][0][0].as_f64(), Some(1.0));
            m["translation"][0].as_f64().unwrap()
        })
        .collect();
    shifts.sort_by(f64::total_cmp);
    assert_eq!(shifts, [-1.0, 1.0]);
}

#[test]
fn neighbor_depth_zero_is_rejected() {
    assert_eq!(cotile(&["neighbors", "builtin:dyadic-1d", "--depth", "0"]).status.code(), Some(2));
}

#[test]
fn sierpinski_neighbors_match_golden() {
    let dir = TempDir::new().unwrap();
    let out = path(&dir, "n.json");
    let report = ok(&["neighbors", "builtin:sierpinski", "--depth", "4", "--out", &out]);
    assert!(field(&report, "neighbor maps").parse::<usize>().unwrap() > 0);
    let got: Value = serde_json::from_str(&read(&out)).unwrap();
    check_golden("sierpinski-neighbors-4.json", &serde_json::to_string(&got).unwrap(), |w, a| {
        json_close(&serde_json::from_str(w).unwrap(), &serde_json::from_str(a).unwrap())
    });
}

fn mask_pixels(out: &str) -> usize {
    field(out, "mask pixels").parse().unwrap()
}

#[test]
fn sierpinski_central_set_is_a_hexagon() {
    let dir = TempDir::new().unwrap();
    let boundary = path(&dir, "b.csv");
    let out = ok(&[
        "centralset",
        "builtin:sierpinski",
        "--grid",
        "256",
        "--points",
        "200000",
        "--seed",
        "4",
        "--out-boundary",
        &boundary,
        "--check",
    ]);
    let area: f64 = field(&out, "area").parse().unwrap();
    let hexagon = 3f64.sqrt() / 2.0;
    assert!((area - hexagon).abs() < 0.02 * hexagon, "area {area}");
    // every boundary point lies on the hexagon about the centroid, within a few pixels
    let (cx, cy) = (0.5, 3f64.sqrt() / 6.0);
    let apothem = 0.5;
    let px = 1.5 * 1.0 / 256.0;
    for p in numbers(&read(&boundary)) {
        let (x, y) = (p[1] - cx, p[2] - cy);
        let support = (0..6)
            .map(|k| {
                let a = k as f64 * std::f64::consts::PI / 3.0;
                x * a.cos() + y * a.sin()
            })
            .fold(f64::NEG_INFINITY, f64::max);
        assert!((support - apothem).abs() < 3.0 * px, "boundary point ({}, {})", p[1], p[2]);
    }
}

#[test]
fn dyadic_central_set_is_the_open_interval() {
    let dir = TempDir::new().unwrap();
    let mask = path(&dir, "m.pgm");
    let out = ok(&[
        "centralset",
        "builtin:dyadic-1d",
        "--grid",
        "300",
        "--points",
        "20000",
        "--seed",
        "2",
        "--out-mask",
        &mask,
    ]);
    let header: Value = serde_json::from_str(&read(&format!("{mask}.json"))).unwrap();
    let lo = header["window"]["min"][0].as_f64().unwrap();
    let hi = header["window"]["max"][0].as_f64().unwrap();
    let width = header["width"].as_u64().unwrap() as usize;
    let bytes = std::fs::read(&mask).unwrap();
    let pixels = &bytes[bytes.len() - width..];
    let px = (hi - lo) / width as f64;
    for (i, &v) in pixels.iter().enumerate() {
        let x = lo + (i as f64 + 0.5) * px;
        if x > px && x < 1.0 - px {
            assert!(v > 0, "pixel at {x} off");
        } else if x < -px || x > 1.0 + px {
            assert_eq!(v, 0, "pixel at {x} on");
        }
    }
    assert!((field(&out, "area").parse::<f64>().unwrap() - 1.0).abs() < 3.0 * px);
}

#[test]
fn coincident_maps_give_an_empty_central_set() {
    let dir = TempDir::new().unwrap();
    let spec = path(&dir, "twice.json");
    std::fs::write(
        &spec,
        r#"{"name":"twice","dimension":1,"maps":[{"matrix":[[0.5]],"translation":[0.0]},{"matrix":[[0.5]],"translation":[0.0]}],"tile":{"kind":"interval","data":[0.0,1.0]}}"#,
    )
    .unwrap();
    let o = cotile(&["centralset", &spec, "--grid", "128", "--points", "5000", "--seed", "1"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(mask_pixels(&stdout(&o)), 0);
    assert!(stderr(&o).contains("warning"));
}

#[test]
fn dyadic_tile_json_matches_closed_form() {
    let dir = TempDir::new().unwrap();
    let out = path(&dir, "t.json");
    ok(&["tile", "builtin:dyadic-1d", "--address", "(1)", "--k", "3", "--out-json", &out]);
    let doc: Value = serde_json::from_str(&read(&out)).unwrap();
    let tiles = doc["tiles"].as_array().unwrap();
    assert_eq!(tiles.len(), 16);
    for (n, t) in (1..).zip(tiles) {
        let (a, b) = (t["m"][0].as_f64().unwrap(), t["t"][0].as_f64().unwrap());
        assert!((b - (n as f64 - 1.0) / 2.0).abs() < 1e-12);
        assert!((a + b - n as f64 / 2.0).abs() < 1e-12);
    }
}

#[test]
fn quartic_tiling_matches_golden() {
    let dir = TempDir::new().unwrap();
    let out = path(&dir, "q.csv");
    let report = ok(&[
        "tile",
        "builtin:quartic",
        "--address",
        "1111111111111",
        "--k",
        "13",
        "--out-csv",
        &out,
    ]);
    // Π(1^13) is a translate of T_13, whose count is the 15th Fibonacci number
    assert_eq!(field(&report, "tiles"), "987");
    check_golden("quartic-1111111111111.csv", &read(&out), csv_close);
}

#[test]
fn invalid_address_digit_is_a_usage_error() {
    let o = cotile(&["tile", "builtin:dyadic-1d", "--address", "13", "--k", "2"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).starts_with("error:"));
}

#[test]
fn canonical_tilings() {
    assert_eq!(field(&ok(&["canonical", "builtin:golden", "--k", "0"]), "tiles"), "2");
    let out = ok(&["canonical", "builtin:golden", "--k", "10", "--counts"]);
    let counts: Vec<u64> = field(&out, "counts").split_whitespace().map(|v| v.parse().unwrap()).collect();
    assert_eq!(counts[..2], [2, 3]);
    assert!(counts.windows(3).all(|w| w[2] == w[1] + w[0]));
    assert_eq!(cotile(&["canonical", "builtin:fern", "--k", "2"]).status.code(), Some(2));
}

#[test]
fn nesting_suite_passes_on_random_configurations() {
    let out = ok(&[
        "check",
        "builtin:golden",
        "--suite",
        "nesting",
        "--trials",
        "10",
        "--k",
        "5",
        "--seed",
        "9",
    ]);
    assert!(out.contains("PASS"));
}

#[test]
fn overlapping_intervals_are_reported() {
    let o = cotile(&[
        "check",
        "builtin:dyadic-1d",
        "--suite",
        "overlap",
        "--tile",
        "interval:-0.3333333333333333,1.3333333333333333",
        "--k",
        "1",
        "--resolution",
        "6000",
    ]);
    assert_eq!(o.status.code(), Some(1));
    let out = stdout(&o);
    // four intervals of length 5/6 at spacing 1/2, so three overlaps of 1/3
    assert_eq!(field(&out, "overlapping pairs"), "3");
    let measure: f64 = field(&out, "overlap measure").parse().unwrap();
    assert!((measure - 1.0).abs() < 0.01, "{measure}");
}

#[test]
fn feasibility_suite_passes_on_sierpinski() {
    let out = ok(&[
        "check",
        "builtin:sierpinski",
        "--suite",
        "feasibility",
        "--resolution",
        "256",
        "--seed",
        "1",
    ]);
    assert!(out.contains("PASS"));
}

#[test]
fn possibly_overlapping_example_still_reports_metrics() {
    let o = cotile(&[
        "check",
        "builtin:newgrowth",
        "--suite",
        "overlap",
        "--tile",
        "attractor",
        "--k",
        "2",
        "--resolution",
        "256",
    ]);
    assert!(matches!(o.status.code(), Some(0 | 1)), "{}", stderr(&o));
    let out = stdout(&o);
    field(&out, "overlapping pairs").parse::<usize>().unwrap();
    field(&out, "overlap measure").parse::<f64>().unwrap();
}

#[test]
fn unknown_flags_are_usage_errors() {
    assert_eq!(cotile(&["tile", "builtin:golden", "--frobnicate"]).status.code(), Some(2));
    assert_eq!(cotile(&["bogus"]).status.code(), Some(2));
}
