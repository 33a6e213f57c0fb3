use crate::attractor::Window;
use crate::error::{Error, Result};
use crate::geometry::{dedup_similitudes, Address, CostFunction, IfsSpec, Similitude, SimilitudeIndex, Word};

use super::cutset::{visit_cut_set, DEFAULT_CUT_SET_CAP};
use super::shape::TileShape;

/// Relative tolerance for comparing tile transforms.
pub const TRANSFORM_TOLERANCE: f64 = 1e-9;

/// One tile: `transform(shapes[shape])`, with the words that produced it.
#[derive(Clone, Debug, PartialEq)]
pub struct Tile {
    pub transform: Similitude,
    pub shape: usize,
    pub word_i: Word,
    pub word_j: Word,
    /// `c(j|l)`.
    pub cost: f64,
}

impl Tile {
    pub fn scale(&self) -> f64 {
        self.transform.ratio()
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct TilingMeta {
    pub address_prefix: Word,
    pub budget: f64,
}

/// A set of tiles, deduplicated by (transform, shape) and ordered by
/// `(word_i, word_j)`.
#[derive(Clone, Debug)]
pub struct Tiling {
    tiles: Vec<Tile>,
    shapes: Vec<TileShape>,
    meta: TilingMeta,
}

impl Tiling {
    /// Sorts the tiles and drops any whose transform and shape repeat an
    /// earlier tile.
    pub fn new(shapes: Vec<TileShape>, mut tiles: Vec<Tile>, meta: TilingMeta) -> Self {
        tiles.sort_by(|a, b| (&a.word_i, &a.word_j).cmp(&(&b.word_i, &b.word_j)));
        let transforms: Vec<Similitude> = tiles.iter().map(|t| t.transform.clone()).collect();
        let tol = transform_tolerance(&transforms);
        let reps = dedup_similitudes(&transforms, tol);
        let mut keep = vec![true; tiles.len()];
        for k in 0..tiles.len() {
            let r = reps[k];
            if r != k && tiles[r].shape == tiles[k].shape {
                keep[k] = false;
            }
        }
        let mut k = 0;
        tiles.retain(|_| {
            k += 1;
            keep[k - 1]
        });
        Self { tiles, shapes, meta }
    }

    pub fn empty(shape: TileShape) -> Self {
        Self {
            tiles: Vec::new(),
            shapes: vec![shape],
            meta: TilingMeta::default(),
        }
    }

    pub fn tiles(&self) -> &[Tile] {
        &self.tiles
    }

    pub fn shapes(&self) -> &[TileShape] {
        &self.shapes
    }

    pub fn shape_of(&self, tile: &Tile) -> &TileShape {
        &self.shapes[tile.shape]
    }

    pub fn meta(&self) -> &TilingMeta {
        &self.meta
    }

    pub fn len(&self) -> usize {
        self.tiles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tiles.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.shapes[0].dim()
    }

    pub fn transforms(&self) -> Vec<Similitude> {
        self.tiles.iter().map(|t| t.transform.clone()).collect()
    }

    /// Absolute tolerance for transform comparisons in this tiling.
    pub fn tolerance(&self) -> f64 {
        transform_tolerance(&self.transforms())
    }

    /// True when every transform of `self` occurs in `other`.
    pub fn transforms_within(&self, other: &Tiling) -> bool {
        self.first_missing_in(other).is_none()
    }

    /// Index of the first tile of `self` whose transform is absent from `other`.
    pub fn first_missing_in(&self, other: &Tiling) -> Option<usize> {
        let theirs = other.transforms();
        let tol = self.tolerance().max(other.tolerance());
        let index = SimilitudeIndex::new(&theirs, tol);
        self.tiles.iter().position(|t| !index.contains(&t.transform))
    }

    pub fn same_transforms(&self, other: &Tiling) -> bool {
        self.transforms_within(other) && other.transforms_within(self)
    }

    /// `E·Π`: every transform composed on the left with `e`.
    pub fn transformed(&self, e: &Similitude) -> Result<Tiling> {
        let tiles = self
            .tiles
            .iter()
            .map(|t| {
                Ok(Tile {
                    transform: e.compose(&t.transform)?,
                    ..t.clone()
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Tiling {
            tiles,
            shapes: self.shapes.clone(),
            meta: self.meta.clone(),
        })
    }

    /// Bounding box of all tile images.
    pub fn support_bounds(&self) -> Option<Window> {
        self.tiles
            .iter()
            .map(|t| self.shape_of(t).image_bounds(&t.transform))
            .reduce(|a, b| a.union(&b))
    }

    /// Keeps the tiles selected by `keep`.
    pub fn filtered<F: FnMut(&Tile) -> bool>(&self, mut keep: F) -> Tiling {
        Tiling {
            tiles: self.tiles.iter().filter(|t| keep(t)).cloned().collect(),
            shapes: self.shapes.clone(),
            meta: self.meta.clone(),
        }
    }
}

fn transform_tolerance(transforms: &[Similitude]) -> f64 {
    let scale = transforms
        .iter()
        .map(|s| s.translation().iter().map(|v| v.abs()).fold(s.ratio(), f64::max))
        .fold(1.0, f64::max);
    TRANSFORM_TOLERANCE * scale
}

/// `Π_T(i|k) = f_{−(i|k)}({f_{(j|l)}(T) : c(j|l−1) ≤ c(i|k) < c(j|l)})`.
pub fn tiling_prefix(spec: &IfsSpec, cf: &CostFunction, shape: TileShape, prefix: &Word) -> Result<Tiling> {
    tiling_prefix_with_cap(spec, cf, shape, prefix, DEFAULT_CUT_SET_CAP)
}

pub fn tiling_prefix_with_cap(spec: &IfsSpec, cf: &CostFunction, shape: TileShape, prefix: &Word, cap: usize) -> Result<Tiling> {
    if cf.alphabet() != spec.len() {
        return Err(Error::CostCount {
            expected: spec.len(),
            found: cf.alphabet(),
        });
    }
    if shape.dim() != spec.dim() {
        return Err(Error::DimensionMismatch {
            expected: spec.dim(),
            found: shape.dim(),
        });
    }
    let budget = cf.cost(prefix)?;
    let base = spec.word_map_inverse(prefix)?;
    let tiles = cut_images(spec, cf, budget, &base, cap)?
        .into_iter()
        .map(|(word_j, cost, transform)| Tile {
            transform,
            shape: 0,
            word_i: prefix.clone(),
            word_j,
            cost,
        })
        .collect();
    Ok(Tiling::new(
        vec![shape],
        tiles,
        TilingMeta {
            address_prefix: prefix.clone(),
            budget,
        },
    ))
}

/// `(j|l, c(j|l), base ∘ f_{(j|l)})` over the cut set at `budget`.
pub(crate) fn cut_images(
    spec: &IfsSpec,
    cf: &CostFunction,
    budget: f64,
    base: &Similitude,
    cap: usize,
) -> Result<Vec<(Word, f64, Similitude)>> {
    // stack[k] = base ∘ f_{digits[..k]}, reused between consecutive words
    let mut stack: Vec<Similitude> = vec![base.clone()];
    let mut prev: Vec<u8> = Vec::new();
    let mut out = Vec::new();
    let mut failure = None;
    visit_cut_set(cf, budget, cap, |digits, cost| {
        let common = prev.iter().zip(digits).take_while(|(a, b)| a == b).count();
        stack.truncate(common + 1);
        for &d in &digits[common..] {
            match stack[stack.len() - 1].compose(spec.map(d)) {
                Ok(g) => stack.push(g),
                Err(e) => {
                    failure.get_or_insert(e);
                    return;
                }
            }
        }
        prev.clear();
        prev.extend_from_slice(digits);
        out.push((Word::from_digits_unchecked(digits.to_vec()), cost, stack[digits.len()].clone()));
    })?;
    match failure {
        Some(e) => Err(e),
        None => Ok(out),
    }
}

/// `Π_T(i|0), …, Π_T(i|k_max)`, verifying the nesting
/// `Π_T(i|k) ⊆ Π_T(i|k+1)` on transforms as it goes.
pub fn tiling_sequence(spec: &IfsSpec, cf: &CostFunction, shape: TileShape, address: &Address, k_max: usize) -> Result<Vec<Tiling>> {
    address.validate(spec.len())?;
    let mut out: Vec<Tiling> = Vec::with_capacity(k_max + 1);
    for k in 0..=k_max {
        let t = tiling_prefix(spec, cf, shape.clone(), &address.prefix(k))?;
        if let Some(prev) = out.last() {
            if !prev.transforms_within(&t) {
                return Err(Error::NestingViolation { lower: k - 1, upper: k });
            }
        }
        out.push(t);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dyadic() -> IfsSpec {
        IfsSpec::new(
            "d",
            vec![Similitude::linear_1d(0.5, 0.0).unwrap(), Similitude::linear_1d(0.5, 0.5).unwrap()],
        )
        .unwrap()
    }

    fn intervals(t: &Tiling) -> Vec<(f64, f64)> {
        let mut v: Vec<(f64, f64)> = t
            .tiles()
            .iter()
            .map(|tile| {
                let b = t.shape_of(tile).image_bounds(&tile.transform);
                (b.min[0], b.max[0])
            })
            .collect();
        v.sort_by(|a, b| a.0.total_cmp(&b.0));
        v
    }

    #[test]
    fn empty_prefix_gives_first_level_images() {
        let spec = dyadic();
        let t = tiling_prefix(&spec, spec.cost_function(), TileShape::interval(0.0, 1.0).unwrap(), &Word::empty()).unwrap();
        assert_eq!(intervals(&t), vec![(0.0, 0.5), (0.5, 1.0)]);
    }

    #[test]
    fn half_unit_intervals_for_constant_address() {
        let spec = dyadic();
        let shape = TileShape::interval(0.0, 1.0).unwrap();
        let t = tiling_prefix(&spec, spec.cost_function(), shape, &Word::repeat(1, 3)).unwrap();
        let got = intervals(&t);
        assert_eq!(got.len(), 16);
        for (n, (lo, hi)) in got.iter().enumerate() {
            assert_eq!((*lo, *hi), (n as f64 / 2.0, (n + 1) as f64 / 2.0));
        }
    }

    #[test]
    fn duplicate_transforms_collapse() {
        // two identical maps: every word pair repeats
        let f = Similitude::linear_1d(0.5, 0.0).unwrap();
        let spec = IfsSpec::new("dup", vec![f.clone(), f]).unwrap();
        let t = tiling_prefix(
            &spec,
            spec.cost_function(),
            TileShape::interval(0.0, 1.0).unwrap(),
            &Word::repeat(1, 2),
        )
        .unwrap();
        assert_eq!(t.len(), 1);
        assert_eq!(t.tiles()[0].word_j.to_string(), "111");
    }

    #[test]
    fn sequence_is_nested() {
        let spec = dyadic();
        let addr: Address = "12(21)".parse().unwrap();
        let seq = tiling_sequence(&spec, spec.cost_function(), TileShape::interval(0.0, 1.0).unwrap(), &addr, 5).unwrap();
        assert_eq!(seq.len(), 6);
        for w in seq.windows(2) {
            assert!(w[0].transforms_within(&w[1]));
        }
    }
}
