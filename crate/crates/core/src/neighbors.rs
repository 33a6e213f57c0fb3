//! Neighbor maps `h = f_i⁻¹ f_j` (with `i₁ ≠ j₁`), the separation constant
//! κ, and the part of the fast basin that lies near the attractor.

use std::collections::HashSet;
use std::io::Write;

use serde::Serialize;

use crate::attractor::{attractor_hull, PointCloud, Provenance, Window};
use crate::error::{Error, Result};
use crate::geometry::{dedup_similitudes, IfsSpec, Similitude, Word};

/// Dedup tolerance, scaled by `1 + diam A`.
pub const NEIGHBOR_TOLERANCE: f64 = 1e-9;

/// Default neighbor word length, matching the depth-4 construction of H.
pub const DEFAULT_NEIGHBOR_DEPTH: usize = 4;

/// One neighbor map with the words that produced it first.
#[derive(Clone, Debug, PartialEq)]
pub struct NeighborMap {
    pub map: Similitude,
    pub word_i: Word,
    pub word_j: Word,
}

/// Deduplicated neighbor maps found up to a word length.
#[derive(Clone, Debug)]
pub struct NeighborSet {
    maps: Vec<NeighborMap>,
    depth: usize,
    tolerance: f64,
    pairs_examined: usize,
    identities: usize,
}

impl NeighborSet {
    pub fn maps(&self) -> &[NeighborMap] {
        &self.maps
    }

    pub fn len(&self) -> usize {
        self.maps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.maps.is_empty()
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    /// Pairs `(i, j)` composed before deduplication.
    pub fn pairs_examined(&self) -> usize {
        self.pairs_examined
    }

    /// Pairs whose map was the identity. Any such pair means two cylinders
    /// coincide, so the open set condition fails.
    pub fn identities_excluded(&self) -> usize {
        self.identities
    }

    pub fn similitudes(&self) -> Vec<Similitude> {
        self.maps.iter().map(|n| n.map.clone()).collect()
    }

    /// Keeps the maps for which `keep` holds.
    pub fn retain<F: FnMut(&NeighborMap) -> bool>(&mut self, keep: F) {
        self.maps.retain(keep);
    }

    /// JSON list of `{matrix, translation, word_i, word_j, lambda}`.
    pub fn write_json<W: Write>(&self, out: W) -> Result<()> {
        #[derive(Serialize)]
        struct Record {
            matrix: Vec<Vec<f64>>,
            translation: Vec<f64>,
            word_i: String,
            word_j: String,
            lambda: f64,
        }
        let records: Vec<Record> = self
            .maps
            .iter()
            .map(|n| Record {
                matrix: n.map.linear().chunks(n.map.dim()).map(<[f64]>::to_vec).collect(),
                translation: n.map.translation().to_vec(),
                word_i: n.word_i.to_string(),
                word_j: n.word_j.to_string(),
                lambda: n.map.ratio(),
            })
            .collect();
        serde_json::to_writer_pretty(out, &records)?;
        Ok(())
    }
}

/// Words of length `1..=depth`, shortest first, lexicographic within a length.
fn words_up_to(alphabet: usize, depth: usize) -> Vec<Word> {
    (1..=depth).flat_map(|l| Word::all_of_length(alphabet, l)).collect()
}

fn diameter_of(spec: &IfsSpec) -> Result<f64> {
    Ok(attractor_hull(spec)?.diameter())
}

/// All maps `f_i⁻¹ f_j` with `1 ≤ |i|, |j| ≤ depth` and `i₁ ≠ j₁`, deduplicated
/// entrywise within `1e−9·(1 + diam A)`. The first pair in (length, lex)
/// order names each map. Identity maps are dropped and counted.
pub fn enumerate_neighbors(spec: &IfsSpec, depth: usize) -> Result<NeighborSet> {
    let words = words_up_to(spec.len(), depth.max(1));
    build_set(spec, depth, &words, &words)
}

/// Like [`enumerate_neighbors`], but keeping only the maps `h` for which
/// `h(ball)` comes within `cutoff` of the attractor's bounding box, where
/// `ball` is the smallest ball around that box.
pub fn enumerate_neighbors_pruned(spec: &IfsSpec, depth: usize, cutoff: f64) -> Result<NeighborSet> {
    let mut set = enumerate_neighbors(spec, depth)?;
    let bbox = attractor_hull(spec)?.bounding_box();
    set.retain(|n| image_ball_gap(&n.map, &bbox) <= cutoff);
    Ok(set)
}

/// The maps `f_i⁻¹ f_j` with `|i| ≤ depth` and `|j| = 1`. Since
/// `f_j(A) ⊆ f_{j₁}(A)`, their images of `A` have the same union as those of
/// the full neighbor set at this depth.
pub fn basin_generators(spec: &IfsSpec, depth: usize) -> Result<NeighborSet> {
    let words = words_up_to(spec.len(), depth.max(1));
    let singles = words_up_to(spec.len(), 1);
    build_set(spec, depth, &words, &singles)
}

fn build_set(spec: &IfsSpec, depth: usize, left: &[Word], right: &[Word]) -> Result<NeighborSet> {
    if depth == 0 {
        return Err(Error::InvalidArgument("neighbor depth must be at least 1".into()));
    }
    let tolerance = NEIGHBOR_TOLERANCE * (1.0 + diameter_of(spec)?);
    let inverses: Vec<Similitude> = left.iter().map(|w| spec.word_map(w).map(|f| f.invert())).collect::<Result<_>>()?;
    let forwards: Vec<Similitude> = right.iter().map(|w| spec.word_map(w)).collect::<Result<_>>()?;
    let identity = Similitude::identity(spec.dim());

    let mut maps = Vec::new();
    let mut pairs_examined = 0;
    let mut identities = 0;
    for (a, wi) in left.iter().enumerate() {
        for (b, wj) in right.iter().enumerate() {
            if wi.digits()[0] == wj.digits()[0] {
                continue;
            }
            pairs_examined += 1;
            let h = inverses[a].compose(&forwards[b])?;
            if h.approx_eq(&identity, tolerance) {
                identities += 1;
                continue;
            }
            maps.push(NeighborMap {
                map: h,
                word_i: wi.clone(),
                word_j: wj.clone(),
            });
        }
    }
    let sims: Vec<Similitude> = maps.iter().map(|n| n.map.clone()).collect();
    let reps = dedup_similitudes(&sims, tolerance);
    let maps = maps
        .into_iter()
        .enumerate()
        .filter(|(k, _)| reps[*k] == *k)
        .map(|(_, n)| n)
        .collect();
    Ok(NeighborSet {
        maps,
        depth,
        tolerance,
        pairs_examined,
        identities,
    })
}

/// Gap between `h(ball)` and `bbox`, where `ball` circumscribes `bbox`.
fn image_ball_gap(h: &Similitude, bbox: &Window) -> f64 {
    let c = bbox.center();
    let r = 0.5 * bbox.diagonal();
    (bbox.distance_to(&h.apply(&c)) - h.ratio() * r).max(0.0)
}

/// The separation constant and the map attaining it.
#[derive(Clone, Debug, PartialEq)]
pub struct Kappa {
    pub value: f64,
    pub index: usize,
}

/// `κ = min_h max_{x ∈ box} |h(x) − x|`. The inner maximum of a convex
/// function over a box is attained at a vertex, so it is computed exactly.
pub fn kappa_estimate(ns: &NeighborSet, reference: &Window) -> Result<Kappa> {
    if ns.is_empty() {
        return Err(Error::Empty("neighbor set"));
    }
    let corners = reference.corners();
    let mut best = Kappa {
        value: f64::INFINITY,
        index: 0,
    };
    for (index, n) in ns.maps.iter().enumerate() {
        let sup = corners
            .iter()
            .map(|x| n.map.apply(x).iter().zip(x).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt())
            .fold(0.0, f64::max);
        if sup < best.value {
            best = Kappa { value: sup, index };
        }
    }
    Ok(best)
}

/// Images `h(a)` of the attractor sample under every neighbor map of the
/// given depth, kept when strictly closer than `cutoff` to the bounding box
/// of the sample.
pub fn fast_basin_slice(spec: &IfsSpec, attractor: &PointCloud, depth: usize, cutoff: f64) -> Result<PointCloud> {
    if attractor.is_empty() {
        return Err(Error::Empty("attractor cloud"));
    }
    let bbox = attractor.bounding_box().ok_or(Error::Empty("attractor cloud"))?;
    let ns = enumerate_neighbors(spec, depth)?;
    let r = 0.5 * bbox.diagonal();
    let mut coords = Vec::new();
    let mut y = vec![0.0; attractor.dim()];
    for n in ns.maps() {
        if bbox.distance_to(&n.map.apply(&bbox.center())) - n.map.ratio() * r >= cutoff {
            continue;
        }
        for p in attractor.points() {
            n.map.apply_into(p, &mut y);
            if bbox.distance_to(&y) < cutoff {
                coords.extend_from_slice(&y);
            }
        }
    }
    PointCloud::new(
        attractor.dim(),
        coords,
        Provenance {
            generator: format!("neighbor images at depth {depth}"),
            seed: attractor.provenance().seed,
            count: ns.len(),
            burn_in: 0,
        },
    )
}

/// Images of `cloud` under `maps`, restricted to points within `reach` of
/// `window` and thinned to one point per grid cell of side `cell`.
pub(crate) fn thinned_images(maps: &[Similitude], cloud: &PointCloud, window: &Window, reach: f64, cell: f64) -> Vec<f64> {
    let dim = cloud.dim();
    let bbox = match cloud.bounding_box() {
        Some(b) => b,
        None => return Vec::new(),
    };
    let c = bbox.center();
    let r = 0.5 * bbox.diagonal();
    let mut seen: HashSet<(i64, i64)> = HashSet::new();
    let mut coords = Vec::new();
    let mut y = vec![0.0; dim];
    for h in maps {
        if window.distance_to(&h.apply(&c)) - h.ratio() * r > reach {
            continue;
        }
        for p in cloud.points() {
            h.apply_into(p, &mut y);
            if window.distance_to(&y) > reach {
                continue;
            }
            let key = ((y[0] / cell).floor() as i64, if dim > 1 { (y[1] / cell).floor() as i64 } else { 0 });
            if seen.insert(key) {
                coords.extend_from_slice(&y);
            }
        }
    }
    coords
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::attractor::chaos_game;

    fn dyadic() -> IfsSpec {
        IfsSpec::new(
            "d",
            vec![Similitude::linear_1d(0.5, 0.0).unwrap(), Similitude::linear_1d(0.5, 0.5).unwrap()],
        )
        .unwrap()
    }

    #[test]
    fn dyadic_depth_one() {
        let ns = enumerate_neighbors(&dyadic(), 1).unwrap();
        assert_eq!(ns.len(), 2);
        let mut t: Vec<f64> = ns.maps().iter().map(|n| n.map.translation()[0]).collect();
        t.sort_by(f64::total_cmp);
        assert_eq!(t, vec![-1.0, 1.0]);
        assert!(ns.maps().iter().all(|n| n.map.linear()[0] == 1.0));
        assert!(enumerate_neighbors(&dyadic(), 0).is_err());
    }

    #[test]
    fn dyadic_kappa_is_one() {
        let ns = enumerate_neighbors(&dyadic(), 4).unwrap();
        let k = kappa_estimate(&ns, &Window::interval(0.0, 1.0).unwrap()).unwrap();
        assert!((k.value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn dyadic_slice_lies_beside_unit_interval() {
        let spec = dyadic();
        let cloud = chaos_game(&spec, 2000, 50, 5).unwrap();
        let h = fast_basin_slice(&spec, &cloud, 1, 10.0).unwrap();
        assert!(!h.is_empty());
        for p in h.points() {
            let x = p[0];
            assert!((1.0 - 1e-9..=2.0 + 1e-9).contains(&x) || (-1.0 - 1e-9..=1e-9).contains(&x), "{x}");
        }
        assert!(fast_basin_slice(&spec, &cloud, 1, 0.0).unwrap().is_empty());
    }

    #[test]
    fn json_export_shape() {
        let ns = enumerate_neighbors(&dyadic(), 1).unwrap();
        let mut buf = Vec::new();
        ns.write_json(&mut buf).unwrap();
        let v: serde_json::Value = serde_json::from_slice(&buf).unwrap();
        assert_eq!(v.as_array().unwrap().len(), 2);
        assert_eq!(v[0]["word_i"], "1");
        assert_eq!(v[0]["word_j"], "2");
        assert_eq!(v[0]["matrix"][0][0], 1.0);
    }
}
