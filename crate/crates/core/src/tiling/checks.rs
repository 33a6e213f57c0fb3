use crate::attractor::{chaos_game, RasterField, Window};
use crate::error::{Error, Result};
use crate::geometry::{dedup_similitudes, Address, CostFunction, IfsSpec, Similitude, INTEGER_EXPONENT_TOLERANCE};

use super::build::{tiling_prefix, Tiling};
use super::shape::TileShape;

/// Tolerance for log-scale comparisons, relative to `max(1, |d|)`.
pub const LOG_SCALE_TOLERANCE: f64 = 1e-9;

/// Largest denominator tried when searching for a common log step.
pub const MAX_STEP_DENOMINATOR: usize = 64;

/// Checks `Π_T(i|p+r) = E·Π_T(j|q+r)` for `r = 0..=k_max` and returns
/// `E = f_{i₁}⁻¹…f_{i_p}⁻¹ f_{j_q}…f_{j₁}`.
#[allow(clippy::too_many_arguments)]
pub fn shift_equivalence_check(
    spec: &IfsSpec,
    cf: &CostFunction,
    shape: TileShape,
    i: &Address,
    j: &Address,
    p: usize,
    q: usize,
    k_max: usize,
) -> Result<Similitude> {
    i.validate(spec.len())?;
    j.validate(spec.len())?;
    if i.shift(p) != j.shift(q) {
        return Err(Error::Precondition(format!("shifted addresses differ: σ^{p} i ≠ σ^{q} j")));
    }
    let exps = spec.exponents();
    if cf.alphabet() != exps.len() || exps.iter().zip(cf.costs()).any(|(a, c)| (a - c).abs() > INTEGER_EXPONENT_TOLERANCE) {
        return Err(Error::Precondition("costs must equal the scale exponents".into()));
    }
    let (ci, cj) = (cf.cost(&i.prefix(p))?, cf.cost(&j.prefix(q))?);
    if (ci - cj).abs() > INTEGER_EXPONENT_TOLERANCE * ci.max(1.0) {
        return Err(Error::Precondition(format!("prefix costs differ: {ci} vs {cj}")));
    }
    let e = spec
        .word_map_inverse(&i.prefix(p))?
        .compose(&spec.word_map_inverse(&j.prefix(q))?.invert())?;
    for r in 0..=k_max {
        let left = tiling_prefix(spec, cf, shape.clone(), &i.prefix(p + r))?;
        let right = tiling_prefix(spec, cf, shape.clone(), &j.prefix(q + r))?.transformed(&e)?;
        if let Some(n) = left.first_missing_in(&right) {
            return Err(Error::SetMismatch(format!(
                "level {r}: tile {} of Π(i|{}) has no partner",
                left.tiles()[n].word_j,
                p + r
            )));
        }
        if let Some(n) = right.first_missing_in(&left) {
            return Err(Error::SetMismatch(format!(
                "level {r}: tile {} of E·Π(j|{}) has no partner",
                right.tiles()[n].word_j,
                q + r
            )));
        }
    }
    Ok(e)
}

#[derive(Clone, Debug, PartialEq)]
pub enum Commensurability {
    /// All tile sizes are powers of `ratio` times a common size.
    Commensurate {
        ratio: f64,
    },
    Incommensurate,
    TooFewTiles,
}

impl Commensurability {
    pub fn is_commensurate(&self) -> bool {
        matches!(self, Commensurability::Commensurate { .. })
    }
}

/// Distinct tile scales in increasing order.
pub fn scale_census(t: &Tiling) -> Vec<f64> {
    let mut logs: Vec<f64> = t.tiles().iter().map(|tile| tile.scale().ln()).collect();
    logs.sort_by(f64::total_cmp);
    let mut out: Vec<f64> = Vec::new();
    for l in logs {
        match out.last() {
            Some(&prev) if (l - prev).abs() <= LOG_SCALE_TOLERANCE * prev.abs().max(1.0) => {}
            _ => out.push(l),
        }
    }
    out.into_iter().map(f64::exp).collect()
}

/// Whether every log-scale difference is an integer multiple of one step
/// `log r`. The step is searched among `d_min / n` for `n ≤ 64`, where
/// `d_min` is the smallest non-zero difference, and the largest step that
/// fits wins. With a single scale `σ` the ratio is `σ` itself.
pub fn commensurability(t: &Tiling) -> Commensurability {
    if t.len() < 2 {
        return Commensurability::TooFewTiles;
    }
    let logs: Vec<f64> = scale_census(t).iter().map(|s| s.ln()).collect();
    if logs.len() == 1 {
        return Commensurability::Commensurate { ratio: logs[0].exp() };
    }
    let diffs: Vec<f64> = logs.iter().map(|l| l - logs[0]).skip(1).collect();
    let d_min = diffs.iter().cloned().fold(f64::INFINITY, f64::min);
    for n in 1..=MAX_STEP_DENOMINATOR {
        let g = d_min / n as f64;
        let fits = diffs.iter().all(|d| {
            let m = (d / g).round();
            (d - m * g).abs() <= LOG_SCALE_TOLERANCE * d.abs().max(1.0)
        });
        if fits {
            return Commensurability::Commensurate { ratio: (-g).exp() };
        }
    }
    Commensurability::Incommensurate
}

/// First `k < l ≤ depth` with `f_{i_l} ∘ … ∘ f_{i_k}(A)` inside the interior
/// of `A`, judged on a raster: every mapped point must sit more than two
/// pixels inside the attractor mask. Returns `None` when no such pair is found
/// or `A` shows no interior at this resolution.
pub fn reversibility_witness(spec: &IfsSpec, address: &Address, depth: usize, resolution: usize) -> Result<Option<(usize, usize)>> {
    address.validate(spec.len())?;
    if !(1..=2).contains(&spec.dim()) {
        return Err(Error::UnsupportedDimension(spec.dim()));
    }
    let hull = crate::attractor::attractor_hull(spec)?;
    let bounds = hull.bounding_box();
    let (w, h) = if spec.dim() == 1 {
        (resolution, 1)
    } else {
        (resolution, resolution)
    };
    let px = bounds.extent(0).max(if spec.dim() == 2 { bounds.extent(1) } else { 0.0 }) / resolution as f64;
    let window = bounds.expanded(2.0 * px).squared();
    let mask = crate::attractor::attractor_mask(spec, &window, w, h, 64)?;
    let (_, inside) = crate::centralset::mask_distances(&mask);
    let px = mask.pixel_size();
    let cloud = chaos_game(spec, 20_000, 50, 0)?.thinned(px / 4.0);
    let depth_at = |p: &[f64]| match mask.pixel_of(p) {
        Some((i, j)) => inside[j * mask.width() + i] * px,
        None => f64::NEG_INFINITY,
    };
    for l in 2..=depth {
        let mut g = Similitude::identity(spec.dim());
        // g = f_{i_l} ∘ … ∘ f_{i_k}, built for k = l, l−1, …, 1
        for k in (1..=l).rev() {
            g = g.compose(spec.map(address.digit(k)))?;
            if k == l {
                continue;
            }
            let ok = cloud.points().all(|p| depth_at(&g.apply(p)) > 2.0 * px);
            if ok {
                return Ok(Some((k, l)));
            }
        }
    }
    Ok(None)
}

/// Outcome of the translation-rigidity heuristic.
#[derive(Clone, Debug, PartialEq)]
pub struct RigidityReport {
    pub candidates: usize,
    pub meetings: usize,
    /// `(k, l, translation)` where `T_k` meets `E T_l` but neither contains the other.
    pub counterexamples: Vec<(u32, u32, Vec<f64>)>,
}

impl RigidityReport {
    pub fn rigid(&self) -> bool {
        self.counterexamples.is_empty()
    }
}

/// Tests rigidity with respect to translations on the canonical tilings
/// `T_1, …, T_{max a_i}`. Candidate translations are those carrying some tile
/// of `T_l` onto a tile of `T_k`; "meets" is decided on a raster of the given
/// resolution over the intersection of the supports. Evidence, not proof.
pub fn rigidity_check(spec: &IfsSpec, shape: TileShape, resolution: usize) -> Result<RigidityReport> {
    let a_max = spec.integer_exponents()?.into_iter().max().unwrap_or(1).max(1);
    let levels: Vec<Tiling> = (1..=a_max)
        .map(|k| super::canonical::canonical_tiling(spec, k, shape.clone()))
        .collect::<Result<_>>()?;
    let mut report = RigidityReport {
        candidates: 0,
        meetings: 0,
        counterexamples: Vec::new(),
    };
    let dim = spec.dim();
    for k in 1..=a_max {
        for l in 1..=a_max {
            let (tk, tl) = (&levels[k as usize - 1], &levels[l as usize - 1]);
            let tol = tk.tolerance().max(tl.tolerance());
            let mut offsets = Vec::new();
            for a in tk.tiles() {
                for b in tl.tiles() {
                    let (la, lb) = (a.transform.linear(), b.transform.linear());
                    if la.iter().zip(lb).all(|(x, y)| (x - y).abs() <= tol) {
                        let t: Vec<f64> = a
                            .transform
                            .translation()
                            .iter()
                            .zip(b.transform.translation())
                            .map(|(x, y)| x - y)
                            .collect();
                        offsets.push(Similitude::translation_by(&t));
                    }
                }
            }
            let reps = dedup_similitudes(&offsets, tol);
            for (n, e) in offsets.iter().enumerate() {
                if reps[n] != n || (k == l && e.translation().iter().all(|v| v.abs() <= tol)) {
                    continue;
                }
                report.candidates += 1;
                let moved = tl.transformed(e)?;
                if !tilings_meet(tk, &moved, resolution) {
                    continue;
                }
                report.meetings += 1;
                if !tk.transforms_within(&moved) && !moved.transforms_within(tk) {
                    report.counterexamples.push((k, l, e.translation()[..dim].to_vec()));
                }
            }
        }
    }
    Ok(report)
}

/// Raster test of "the common tiles cover the intersection of the supports".
fn tilings_meet(a: &Tiling, b: &Tiling, resolution: usize) -> bool {
    let (Some(ba), Some(bb)) = (a.support_bounds(), b.support_bounds()) else {
        return false;
    };
    if !ba.intersects(&bb) {
        return false;
    }
    let lo: Vec<f64> = ba.min.iter().zip(&bb.min).map(|(x, y)| x.max(*y)).collect();
    let hi: Vec<f64> = ba.max.iter().zip(&bb.max).map(|(x, y)| x.min(*y)).collect();
    let Ok(window) = Window::new(lo.clone(), hi.iter().zip(&lo).map(|(h, l)| h.max(l + 1e-12)).collect()) else {
        return false;
    };
    let tol = a.tolerance().max(b.tolerance());
    let theirs = b.transforms();
    let index = crate::geometry::SimilitudeIndex::new(&theirs, tol);
    let common: Vec<_> = a.tiles().iter().filter(|t| index.contains(&t.transform)).collect();
    if common.is_empty() {
        return false;
    }
    let h = if window.dim() == 1 { 1 } else { resolution };
    let Ok(grid) = RasterField::new(window, resolution, h) else {
        return false;
    };
    let band = 2.0 * grid.pixel_size();
    let depth = |t: &Tiling, tile: &super::build::Tile, p: &[f64]| {
        t.shape_of(tile).signed_distance(&tile.transform.invert().apply(p)) * tile.scale()
    };
    let inside = |t: &Tiling, p: &[f64]| t.tiles().iter().any(|tile| depth(t, tile, p) > band);
    (0..grid.len()).all(|n| {
        let p = grid.center(n % grid.width(), n / grid.width());
        !(inside(a, &p) && inside(b, &p)) || common.iter().any(|tile| depth(a, tile, &p) >= -band)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tiling::canonical::canonical_tiling;

    fn golden() -> IfsSpec {
        let s = (5f64.sqrt() - 1.0) / 2.0;
        IfsSpec::new(
            "golden",
            vec![Similitude::linear_1d(s, 0.0).unwrap(), Similitude::linear_1d(s * s, s).unwrap()],
        )
        .unwrap()
    }

    fn unit() -> TileShape {
        TileShape::interval(0.0, 1.0).unwrap()
    }

    #[test]
    fn golden_is_commensurate_with_ratio_s() {
        let spec = golden();
        let t = canonical_tiling(&spec, 5, unit()).unwrap();
        assert_eq!(scale_census(&t).len(), 2);
        match commensurability(&t) {
            Commensurability::Commensurate { ratio } => assert!((ratio - spec.base_scale()).abs() < 1e-9),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn irrational_ratio_is_incommensurate() {
        let spec = IfsSpec::with_costs(
            "x",
            vec![
                Similitude::linear_1d(0.5, 0.0).unwrap(),
                Similitude::linear_1d(1.0 / 3.0, 0.6).unwrap(),
            ],
            // uniform costs would give scales (1/2)(2/3)^b, a single progression
            vec![1.0, 1.5],
        )
        .unwrap();
        let t = tiling_prefix(&spec, spec.cost_function(), unit(), &crate::geometry::Word::repeat(1, 4)).unwrap();
        assert_eq!(commensurability(&t), Commensurability::Incommensurate);
        let single = t.filtered(|tile| tile.word_j.len() == 1 && tile.word_j.digits()[0] == 1);
        assert!(matches!(commensurability(&single), Commensurability::TooFewTiles));
    }

    #[test]
    fn identity_for_equal_addresses() {
        let spec = golden();
        let a: Address = "2(1)".parse().unwrap();
        let e = shift_equivalence_check(&spec, spec.cost_function(), unit(), &a, &a, 1, 1, 3).unwrap();
        assert!(e.approx_eq(&Similitude::identity(1), 1e-12));
    }

    #[test]
    fn golden_shift_pair() {
        let spec = golden();
        let i: Address = "2(1)".parse().unwrap();
        let j: Address = "11(1)".parse().unwrap();
        let e = shift_equivalence_check(&spec, spec.cost_function(), unit(), &i, &j, 1, 2, 4).unwrap();
        assert!(e.is_isometry());
    }

    #[test]
    fn unequal_prefix_costs_rejected() {
        let spec = golden();
        let i: Address = "2(1)".parse().unwrap();
        assert!(matches!(
            shift_equivalence_check(&spec, spec.cost_function(), unit(), &i, &i.shift(1), 1, 0, 1),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn square_address_is_reversible() {
        let spec = IfsSpec::new(
            "square",
            vec![
                Similitude::planar(0.5, 0.0, 0.0, 0.0, 0.5, 0.0).unwrap(),
                Similitude::planar(0.5, 0.0, 0.5, 0.0, 0.5, 0.0).unwrap(),
                Similitude::planar(0.5, 0.0, 0.0, 0.0, 0.5, 0.5).unwrap(),
                Similitude::planar(0.5, 0.0, 0.5, 0.0, 0.5, 0.5).unwrap(),
            ],
        )
        .unwrap();
        let corner = Address::constant(1);
        assert_eq!(reversibility_witness(&spec, &corner, 6, 128).unwrap(), None);
        let mixed = Address::disjunctive(4, 3);
        assert!(reversibility_witness(&spec, &mixed, 12, 128).unwrap().is_some());
    }
}
