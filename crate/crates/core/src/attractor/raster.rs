use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An axis-aligned box `[min₀, max₀] × … `, in one or two dimensions.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Window {
    pub min: Vec<f64>,
    pub max: Vec<f64>,
}

impl Window {
    pub fn new(min: Vec<f64>, max: Vec<f64>) -> Result<Self> {
        if min.len() != max.len() {
            return Err(Error::DimensionMismatch {
                expected: min.len(),
                found: max.len(),
            });
        }
        if min.is_empty() {
            return Err(Error::Empty("window"));
        }
        if min.iter().zip(&max).any(|(a, b)| !a.is_finite() || !b.is_finite() || a >= b) {
            return Err(Error::InvalidArgument(format!("degenerate window {min:?}..{max:?}")));
        }
        Ok(Self { min, max })
    }

    pub fn interval(lo: f64, hi: f64) -> Result<Self> {
        Self::new(vec![lo], vec![hi])
    }

    pub fn rect(x0: f64, y0: f64, x1: f64, y1: f64) -> Result<Self> {
        Self::new(vec![x0, y0], vec![x1, y1])
    }

    /// Smallest box containing the points of a flat coordinate buffer.
    pub fn bounding(dim: usize, coords: &[f64]) -> Option<Self> {
        if coords.is_empty() {
            return None;
        }
        let mut min = vec![f64::INFINITY; dim];
        let mut max = vec![f64::NEG_INFINITY; dim];
        for p in coords.chunks_exact(dim) {
            for k in 0..dim {
                min[k] = min[k].min(p[k]);
                max[k] = max[k].max(p[k]);
            }
        }
        Some(Self { min, max })
    }

    pub fn dim(&self) -> usize {
        self.min.len()
    }

    pub fn extent(&self, axis: usize) -> f64 {
        self.max[axis] - self.min[axis]
    }

    pub fn center(&self) -> Vec<f64> {
        self.min.iter().zip(&self.max).map(|(a, b)| 0.5 * (a + b)).collect()
    }

    pub fn diagonal(&self) -> f64 {
        self.min.iter().zip(&self.max).map(|(a, b)| (b - a) * (b - a)).sum::<f64>().sqrt()
    }

    pub fn contains(&self, p: &[f64]) -> bool {
        p.iter().zip(self.min.iter().zip(&self.max)).all(|(x, (a, b))| *x >= *a && *x <= *b)
    }

    /// Euclidean distance from `p` to the box (zero inside).
    pub fn distance_to(&self, p: &[f64]) -> f64 {
        p.iter()
            .zip(self.min.iter().zip(&self.max))
            .map(|(x, (a, b))| {
                let d = (a - x).max(x - b).max(0.0);
                d * d
            })
            .sum::<f64>()
            .sqrt()
    }

    pub fn intersects(&self, other: &Window) -> bool {
        self.min
            .iter()
            .zip(&self.max)
            .zip(other.min.iter().zip(&other.max))
            .all(|((a0, a1), (b0, b1))| a0 <= b1 && b0 <= a1)
    }

    pub fn expanded(&self, margin: f64) -> Window {
        Window {
            min: self.min.iter().map(|v| v - margin).collect(),
            max: self.max.iter().map(|v| v + margin).collect(),
        }
    }

    /// Scales the box about its center.
    pub fn scaled(&self, factor: f64) -> Window {
        let c = self.center();
        Window {
            min: self.min.iter().zip(&c).map(|(v, c)| c + (v - c) * factor).collect(),
            max: self.max.iter().zip(&c).map(|(v, c)| c + (v - c) * factor).collect(),
        }
    }

    /// A square (or interval) with the same center whose side is the largest extent.
    pub fn squared(&self) -> Window {
        let side = (0..self.dim()).map(|k| self.extent(k)).fold(0.0, f64::max);
        let c = self.center();
        Window {
            min: c.iter().map(|v| v - side / 2.0).collect(),
            max: c.iter().map(|v| v + side / 2.0).collect(),
        }
    }

    pub fn union(&self, other: &Window) -> Window {
        Window {
            min: self.min.iter().zip(&other.min).map(|(a, b)| a.min(*b)).collect(),
            max: self.max.iter().zip(&other.max).map(|(a, b)| a.max(*b)).collect(),
        }
    }

    /// The `2ⁿ` corners.
    pub fn corners(&self) -> Vec<Vec<f64>> {
        let n = self.dim();
        (0..1usize << n)
            .map(|mask| (0..n).map(|k| if mask >> k & 1 == 1 { self.max[k] } else { self.min[k] }).collect())
            .collect()
    }
}

/// Scalar samples on a pixel grid over a window.
///
/// Rows run top to bottom (row 0 holds the largest `y`), and every sample
/// belongs to its pixel center. One-dimensional fields have a single row.
#[derive(Clone, Debug, PartialEq)]
pub struct RasterField {
    window: Window,
    width: usize,
    height: usize,
    samples: Vec<f64>,
}

impl RasterField {
    pub fn new(window: Window, width: usize, height: usize) -> Result<Self> {
        Self::filled(window, width, height, 0.0)
    }

    pub fn filled(window: Window, width: usize, height: usize, value: f64) -> Result<Self> {
        match window.dim() {
            1 if width >= 2 && height == 1 => {}
            2 if width >= 2 && height >= 2 => {}
            1 | 2 => {
                return Err(Error::InvalidArgument(format!(
                    "bad resolution {width}×{height} for a {}-d window",
                    window.dim()
                )))
            }
            d => return Err(Error::UnsupportedDimension(d)),
        }
        if (0..window.dim()).any(|k| window.extent(k).is_nan() || window.extent(k) <= 0.0) {
            return Err(Error::InvalidArgument("degenerate raster window".into()));
        }
        Ok(Self {
            window,
            width,
            height,
            samples: vec![value; width * height],
        })
    }

    /// A field whose sample at each pixel is `f(center)`, computed row-parallel.
    pub fn from_fn<F>(window: Window, width: usize, height: usize, f: F) -> Result<Self>
    where
        F: Fn(&[f64]) -> f64 + Sync,
    {
        let mut field = Self::new(window, width, height)?;
        let geom = field.geometry();
        field.samples.par_chunks_mut(width).enumerate().for_each(|(j, row)| {
            let mut p = vec![0.0; geom.dim];
            for (i, v) in row.iter_mut().enumerate() {
                geom.center_into(i, j, &mut p);
                *v = f(&p);
            }
        });
        Ok(field)
    }

    pub fn window(&self) -> &Window {
        &self.window
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn samples_mut(&mut self) -> &mut [f64] {
        &mut self.samples
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.samples[j * self.width + i]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.samples[j * self.width + i] = v;
    }

    pub(crate) fn geometry(&self) -> PixelGeometry {
        PixelGeometry::new(&self.window, self.width, self.height)
    }

    /// Pixel pitch along x.
    pub fn pixel_size(&self) -> f64 {
        self.window.extent(0) / self.width as f64
    }

    /// Length of a pixel diagonal (the pitch itself in 1-d).
    pub fn pixel_diagonal(&self) -> f64 {
        let g = self.geometry();
        (g.dx * g.dx + g.dy * g.dy).sqrt()
    }

    /// Area (or length in 1-d) of one pixel.
    pub fn pixel_measure(&self) -> f64 {
        let g = self.geometry();
        if g.dim == 1 {
            g.dx
        } else {
            g.dx * g.dy
        }
    }

    pub fn center(&self, i: usize, j: usize) -> Vec<f64> {
        let mut p = vec![0.0; self.window.dim()];
        self.geometry().center_into(i, j, &mut p);
        p
    }

    /// Pixel containing `p`, if inside the window.
    pub fn pixel_of(&self, p: &[f64]) -> Option<(usize, usize)> {
        self.geometry().pixel_of(p)
    }

    /// Treats samples `> 0.5` as "on".
    pub fn is_on(&self, i: usize, j: usize) -> bool {
        self.get(i, j) > 0.5
    }

    pub fn count_on(&self) -> usize {
        self.samples.iter().filter(|&&v| v > 0.5).count()
    }

    /// Applies `f` to every sample.
    pub fn map<F: Fn(f64) -> f64>(&self, f: F) -> RasterField {
        RasterField {
            window: self.window.clone(),
            width: self.width,
            height: self.height,
            samples: self.samples.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn same_grid(&self, other: &RasterField) -> bool {
        self.window == other.window && self.width == other.width && self.height == other.height
    }

    /// 8-bit binary PGM (`P5`): on pixels white.
    pub fn write_mask_pgm<W: Write>(&self, mut out: W) -> Result<()> {
        write!(out, "P5\n{} {}\n255\n", self.width, self.height)?;
        let bytes: Vec<u8> = self.samples.iter().map(|&v| if v > 0.5 { 255 } else { 0 }).collect();
        out.write_all(&bytes)?;
        Ok(())
    }

    /// 16-bit PGM of a non-negative field quantized against `max_value`
    /// (values above it, including infinities, saturate).
    pub fn write_pgm16<W: Write>(&self, mut out: W, max_value: f64) -> Result<()> {
        write!(out, "P5\n{} {}\n65535\n", self.width, self.height)?;
        let mut bytes = Vec::with_capacity(self.samples.len() * 2);
        for &v in &self.samples {
            let q = if max_value > 0.0 {
                ((v / max_value).clamp(0.0, 1.0) * 65535.0).round() as u16
            } else {
                0
            };
            bytes.extend_from_slice(&q.to_be_bytes());
        }
        out.write_all(&bytes)?;
        Ok(())
    }

    /// Largest finite sample.
    pub fn max_finite(&self) -> f64 {
        self.samples.iter().copied().filter(|v| v.is_finite()).fold(0.0, f64::max)
    }

    /// Window and grid metadata accompanying an exported image.
    pub fn header(&self, kind: &str, max_value: Option<f64>) -> RasterHeader {
        RasterHeader {
            kind: kind.to_string(),
            window: self.window.clone(),
            width: self.width,
            height: self.height,
            row_order: "top-down".to_string(),
            max_value,
        }
    }
}

/// Sidecar JSON describing where a raster lives in the plane.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RasterHeader {
    pub kind: String,
    pub window: Window,
    pub width: usize,
    pub height: usize,
    pub row_order: String,
    pub max_value: Option<f64>,
}

/// Pixel-center arithmetic, copied out of a field so closures can share it.
#[derive(Clone, Copy, Debug)]
pub(crate) struct PixelGeometry {
    pub dim: usize,
    pub x0: f64,
    pub y1: f64,
    pub dx: f64,
    pub dy: f64,
    pub width: usize,
    pub height: usize,
}

impl PixelGeometry {
    pub fn new(window: &Window, width: usize, height: usize) -> Self {
        let dim = window.dim();
        let dx = window.extent(0) / width as f64;
        let (y1, dy) = if dim >= 2 {
            (window.max[1], window.extent(1) / height as f64)
        } else {
            (0.0, 0.0)
        };
        Self {
            dim,
            x0: window.min[0],
            y1,
            dx,
            dy,
            width,
            height,
        }
    }

    #[inline]
    pub fn center_into(&self, i: usize, j: usize, p: &mut [f64]) {
        p[0] = self.x0 + (i as f64 + 0.5) * self.dx;
        if self.dim >= 2 {
            p[1] = self.y1 - (j as f64 + 0.5) * self.dy;
        }
    }

    #[inline]
    pub fn pixel_of(&self, p: &[f64]) -> Option<(usize, usize)> {
        let fi = ((p[0] - self.x0) / self.dx).floor();
        if !(fi >= 0.0 && fi < self.width as f64) {
            return None;
        }
        let j = if self.dim >= 2 {
            let fj = ((self.y1 - p[1]) / self.dy).floor();
            if !(fj >= 0.0 && fj < self.height as f64) {
                return None;
            }
            fj as usize
        } else {
            0
        };
        Some((fi as usize, j))
    }
}

/// Exact Euclidean distance transform on a pixel grid, in pixel units.
///
/// Each output is the distance from the pixel center to the nearest pixel
/// center flagged in `features`, or `+∞` when there are none. Uses the
/// separable lower-envelope algorithm of Felzenszwalb and Huttenlocher.
pub fn euclidean_distance_transform(width: usize, height: usize, features: &[bool]) -> Vec<f64> {
    assert_eq!(features.len(), width * height);
    let inf = f64::INFINITY;
    let mut grid: Vec<f64> = features.iter().map(|&f| if f { 0.0 } else { inf }).collect();

    let mut f = vec![0.0; width.max(height)];
    let mut d = vec![0.0; width.max(height)];
    let mut v = vec![0usize; width.max(height)];
    let mut z = vec![0.0; width.max(height) + 1];

    // columns
    for i in 0..width {
        for j in 0..height {
            f[j] = grid[j * width + i];
        }
        edt_1d(&f[..height], &mut d[..height], &mut v, &mut z);
        for j in 0..height {
            grid[j * width + i] = d[j];
        }
    }
    // rows
    for j in 0..height {
        f[..width].copy_from_slice(&grid[j * width..(j + 1) * width]);
        edt_1d(&f[..width], &mut d[..width], &mut v, &mut z);
        grid[j * width..(j + 1) * width].copy_from_slice(&d[..width]);
    }
    grid.iter().map(|s| s.sqrt()).collect()
}

/// Squared 1-d distance transform of the sampled function `f`.
fn edt_1d(f: &[f64], d: &mut [f64], v: &mut [usize], z: &mut [f64]) {
    let n = f.len();
    let first = match (0..n).find(|&q| f[q].is_finite()) {
        Some(q) => q,
        None => {
            d.iter_mut().for_each(|x| *x = f64::INFINITY);
            return;
        }
    };
    let mut k = 0usize;
    v[0] = first;
    z[0] = f64::NEG_INFINITY;
    z[1] = f64::INFINITY;
    for q in first + 1..n {
        if !f[q].is_finite() {
            continue;
        }
        let parabola = |p: usize| ((f[q] + (q * q) as f64) - (f[p] + (p * p) as f64)) / (2.0 * (q as f64 - p as f64));
        let mut s = parabola(v[k]);
        // z[0] = -inf, so this stops at k = 0 at the latest
        while s <= z[k] {
            k -= 1;
            s = parabola(v[k]);
        }
        k += 1;
        v[k] = q;
        z[k] = s;
        z[k + 1] = f64::INFINITY;
    }
    k = 0;
    for (q, out) in d.iter_mut().enumerate() {
        while z[k + 1] < q as f64 {
            k += 1;
        }
        let p = v[k];
        let diff = q as f64 - p as f64;
        *out = diff * diff + f[p];
    }
}
