use std::collections::HashSet;
use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::IfsSpec;

use super::raster::Window;

pub const DEFAULT_BURN_IN: usize = 50;
pub const DEFAULT_POINTS: usize = 1_000_000;

/// How a cloud was produced.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub generator: String,
    pub seed: Option<u64>,
    pub count: usize,
    pub burn_in: usize,
}

/// A finite set of points in `ℝⁿ`, stored as a flat coordinate buffer.
#[derive(Clone, Debug, PartialEq)]
pub struct PointCloud {
    dim: usize,
    coords: Vec<f64>,
    provenance: Provenance,
}

impl PointCloud {
    pub fn new(dim: usize, coords: Vec<f64>, provenance: Provenance) -> Result<Self> {
        if dim == 0 || !coords.len().is_multiple_of(dim) {
            return Err(Error::InvalidArgument(format!(
                "{} coordinates do not form {dim}-d points",
                coords.len()
            )));
        }
        if coords.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("non-finite point".into()));
        }
        Ok(Self { dim, coords, provenance })
    }

    pub fn from_points(dim: usize, points: &[Vec<f64>]) -> Result<Self> {
        let coords: Vec<f64> = points.iter().flatten().copied().collect();
        Self::new(
            dim,
            coords,
            Provenance {
                generator: "explicit".into(),
                count: points.len(),
                ..Default::default()
            },
        )
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn points(&self) -> impl Iterator<Item = &[f64]> {
        self.coords.chunks_exact(self.dim)
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    pub fn bounding_box(&self) -> Option<Window> {
        Window::bounding(self.dim, &self.coords)
    }

    /// Keeps the first point falling in each cell of a grid with pitch
    /// `cell`. Distances to the thinned cloud exceed distances to the full
    /// cloud by at most `cell·√n`.
    pub fn thinned(&self, cell: f64) -> PointCloud {
        assert!(cell > 0.0);
        let cell_of = |v: f64| (v / cell).floor() as i64;
        let mut coords = Vec::new();
        if self.dim <= 2 {
            let mut seen = HashSet::with_capacity(self.len() / 4);
            for p in self.points() {
                let key = (cell_of(p[0]), p.get(1).map_or(0, |&y| cell_of(y)));
                if seen.insert(key) {
                    coords.extend_from_slice(p);
                }
            }
        } else {
            let mut seen = HashSet::new();
            for p in self.points() {
                let key: Vec<i64> = p.iter().map(|&v| cell_of(v)).collect();
                if seen.insert(key) {
                    coords.extend_from_slice(p);
                }
            }
        }
        PointCloud {
            dim: self.dim,
            coords,
            provenance: Provenance {
                generator: format!("{} (thinned at {cell:e})", self.provenance.generator),
                ..self.provenance.clone()
            },
        }
    }

    /// One point per line, coordinates separated by commas, printed with
    /// enough digits to round-trip.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        let mut line = String::new();
        for p in self.points() {
            line.clear();
            for (k, v) in p.iter().enumerate() {
                if k > 0 {
                    line.push(',');
                }
                line.push_str(&format!("{v:?}"));
            }
            line.push('\n');
            out.write_all(line.as_bytes())?;
        }
        Ok(())
    }
}

/// Random iteration: `x_{k+1} = f_{u_k}(x_k)` with `u_k` uniform on the maps.
///
/// The orbit starts at the fixed point of `f₁` (which lies on the
/// attractor) and the first `burn_in` iterates are discarded. The generator
/// is ChaCha8 seeded from `seed`, so output is reproducible across runs and
/// platforms.
pub fn chaos_game(spec: &IfsSpec, count: usize, burn_in: usize, seed: u64) -> Result<PointCloud> {
    if count == 0 {
        return Err(Error::InvalidArgument("count must be at least 1".into()));
    }
    let dim = spec.dim();
    let m = spec.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut x = spec.maps()[0]
        .fixed_point()
        .ok_or_else(|| Error::InvalidArgument("first map has no fixed point".into()))?;
    let mut y = vec![0.0; dim];
    let mut coords = Vec::with_capacity(count * dim);
    for step in 0..burn_in + count {
        let u = rng.gen_range(0..m);
        spec.maps()[u].apply_into(&x, &mut y);
        std::mem::swap(&mut x, &mut y);
        if step >= burn_in {
            coords.extend_from_slice(&x);
        }
    }
    PointCloud::new(
        dim,
        coords,
        Provenance {
            generator: format!("chaos game on {}", spec.name()),
            seed: Some(seed),
            count,
            burn_in,
        },
    )
}
