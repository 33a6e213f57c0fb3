use rayon::prelude::*;
use serde::Serialize;

use crate::attractor::{RasterField, Window};
use crate::error::Result;
use crate::geometry::Similitude;

use super::build::{Tile, Tiling};
use super::shape::TileShape;

/// Depth beyond which a shared pixel counts as overlap, in pixels.
pub const OVERLAP_BAND: f64 = 2.0;
/// Depth above which a pixel counts as touched by a tile, in pixels.
pub const TOUCH_BAND: f64 = 1.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PairClass {
    Touching,
    Overlapping,
}

/// Two tiles that share at least one pixel within the touching band.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TilePair {
    pub a: usize,
    pub b: usize,
    pub class: PairClass,
    /// Length or area of the pixels inside both tiles.
    pub overlap: f64,
    /// Largest `min(depth_a, depth_b)` over shared pixels.
    pub depth: f64,
}

/// Pairwise intersections of a tiling on a raster; pairs not listed are disjoint.
#[derive(Clone, Debug, Serialize)]
pub struct OverlapReport {
    pub window: Window,
    pub width: usize,
    pub height: usize,
    pub tiles: usize,
    pub pairs: Vec<TilePair>,
}

impl OverlapReport {
    pub fn overlapping(&self) -> usize {
        self.pairs.iter().filter(|p| p.class == PairClass::Overlapping).count()
    }

    pub fn touching(&self) -> usize {
        self.pairs.iter().filter(|p| p.class == PairClass::Touching).count()
    }
}

/// Grid over `window` with `resolution` pixels along the longer side.
fn grid_for(window: &Window, resolution: usize) -> Result<RasterField> {
    if window.dim() == 1 {
        return RasterField::new(window.clone(), resolution, 1);
    }
    let (ex, ey) = (window.extent(0), window.extent(1));
    let (w, h) = if ex >= ey {
        (resolution, ((resolution as f64 * ey / ex).round() as usize).max(1))
    } else {
        (((resolution as f64 * ex / ey).round() as usize).max(1), resolution)
    };
    RasterField::new(window.clone(), w, h)
}

/// `(pixel, depth)` for the pixels near `f(T)` whose depth is at least `floor`.
/// Depth is the signed distance to the tile boundary in world units.
fn tile_depths(shape: &TileShape, f: &Similitude, grid: &RasterField, floor: f64) -> Vec<(usize, f64)> {
    let reach = (-floor).max(0.0);
    let bounds = shape.image_bounds(f).expanded(reach + grid.pixel_diagonal());
    if !bounds.intersects(grid.window()) {
        return Vec::new();
    }
    let (w, h) = (grid.width(), grid.height());
    let win = grid.window();
    let dx = win.extent(0) / w as f64;
    let span = |k: usize, n: usize, d: f64, flip: bool| -> (usize, usize) {
        let (lo, hi) = (bounds.min[k], bounds.max[k]);
        let (a, b) = if flip {
            ((win.max[k] - hi) / d, (win.max[k] - lo) / d)
        } else {
            ((lo - win.min[k]) / d, (hi - win.min[k]) / d)
        };
        let a = a.floor().max(0.0) as usize;
        let b = (b.ceil().max(0.0) as usize).min(n);
        (a.min(n), b)
    };
    let (i0, i1) = span(0, w, dx, false);
    let (j0, j1) = if h == 1 {
        (0, 1)
    } else {
        span(1, h, win.extent(1) / h as f64, true)
    };
    let inv = f.invert();
    let scale = f.ratio();
    let mut out = Vec::new();
    for j in j0..j1 {
        for i in i0..i1 {
            let p = grid.center(i, j);
            let d = shape.signed_distance(&inv.apply(&p)) * scale;
            if d >= floor {
                out.push((j * w + i, d));
            }
        }
    }
    out
}

/// Rasterizes every tile and classifies each pair sharing a pixel:
/// overlapping when some shared pixel is deeper than two pixels inside both,
/// touching otherwise. The raster covers the support with `resolution` pixels
/// along its longer side.
pub fn overlap_report(t: &Tiling, resolution: usize) -> Result<OverlapReport> {
    let Some(support) = t.support_bounds() else {
        let window = t.shapes()[0].bounds();
        return Ok(OverlapReport {
            window,
            width: 0,
            height: 0,
            tiles: 0,
            pairs: Vec::new(),
        });
    };
    let pad = 1e-3 * support.diagonal();
    let grid = grid_for(&support.expanded(pad), resolution)?;
    let px = grid.pixel_size();
    let measure = grid.pixel_measure();
    let floor = -TOUCH_BAND * px;
    let mut entries: Vec<(usize, usize, f64)> = t
        .tiles()
        .par_iter()
        .enumerate()
        .flat_map_iter(|(n, tile)| {
            tile_depths(t.shape_of(tile), &tile.transform, &grid, floor)
                .into_iter()
                .map(move |(pixel, d)| (pixel, n, d))
        })
        .collect();
    entries.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.cmp(&b.1)));

    let mut stats: std::collections::BTreeMap<(usize, usize), (f64, f64)> = Default::default();
    let mut start = 0;
    while start < entries.len() {
        let mut end = start + 1;
        while end < entries.len() && entries[end].0 == entries[start].0 {
            end += 1;
        }
        let run = &entries[start..end];
        for x in 0..run.len() {
            for y in x + 1..run.len() {
                let (da, db) = (run[x].2, run[y].2);
                let e = stats.entry((run[x].1, run[y].1)).or_insert((0.0, f64::NEG_INFINITY));
                if da > 0.0 && db > 0.0 {
                    e.0 += measure;
                }
                e.1 = e.1.max(da.min(db));
            }
        }
        start = end;
    }
    let solid = |n: usize| t.shape_of(&t.tiles()[n]).is_solid();
    let pairs = stats
        .into_iter()
        .map(|((a, b), (overlap, depth))| TilePair {
            a,
            b,
            class: if solid(a) && solid(b) && depth > OVERLAP_BAND * px {
                PairClass::Overlapping
            } else {
                PairClass::Touching
            },
            overlap,
            depth,
        })
        .collect();
    Ok(OverlapReport {
        window: grid.window().clone(),
        width: grid.width(),
        height: grid.height(),
        tiles: t.len(),
        pairs,
    })
}

/// Fraction of the `width × height` pixels of `window` whose centers lie in
/// at least one tile.
pub fn coverage_fraction(t: &Tiling, window: &Window, width: usize, height: usize) -> Result<f64> {
    let grid = RasterField::new(window.clone(), width, height)?;
    let covered = coverage_mask(t, &grid);
    Ok(covered.iter().filter(|&&c| c).count() as f64 / grid.len() as f64)
}

fn coverage_mask(t: &Tiling, grid: &RasterField) -> Vec<bool> {
    let hits: Vec<Vec<usize>> = t
        .tiles()
        .par_iter()
        .map(|tile| {
            tile_depths(t.shape_of(tile), &tile.transform, grid, 0.0)
                .into_iter()
                .map(|(p, _)| p)
                .collect()
        })
        .collect();
    let mut covered = vec![false; grid.len()];
    for p in hits.into_iter().flatten() {
        covered[p] = true;
    }
    covered
}

/// The tiles meeting the closed box `window`.
///
/// Bounding boxes give a coarse filter; intervals, boxes and polygons are
/// then tested exactly, stencils and clouds through their mapped samples.
pub fn patch(t: &Tiling, window: &Window) -> Tiling {
    t.filtered(|tile| meets(t.shape_of(tile), tile, window))
}

fn meets(shape: &TileShape, tile: &Tile, window: &Window) -> bool {
    let f = &tile.transform;
    if !shape.image_bounds(f).intersects(window) {
        return false;
    }
    match shape {
        TileShape::Interval { .. } => true,
        TileShape::Box(b) if b.dim() == 1 => true,
        TileShape::Box(b) => {
            let ring: Vec<[f64; 2]> = [
                [b.min[0], b.min[1]],
                [b.max[0], b.min[1]],
                [b.max[0], b.max[1]],
                [b.min[0], b.max[1]],
            ]
            .into_iter()
            .map(|p| f.apply2(p))
            .collect();
            polygon_meets_box(&ring, window)
        }
        TileShape::Polygon(v) => {
            let ring: Vec<[f64; 2]> = v.iter().map(|&p| f.apply2(p)).collect();
            polygon_meets_box(&ring, window)
        }
        TileShape::Stencil { stencil, .. } => {
            let mask = stencil.mask();
            let slack = 0.5 * mask.pixel_diagonal() * f.ratio();
            let near = window.expanded(slack);
            (0..mask.height()).any(|j| (0..mask.width()).any(|i| mask.is_on(i, j) && near.contains(&f.apply(&mask.center(i, j)))))
        }
        TileShape::Cloud { cloud, .. } => cloud.points().any(|p| window.contains(&f.apply(p))),
    }
}

fn polygon_meets_box(ring: &[[f64; 2]], b: &Window) -> bool {
    if ring.iter().any(|p| b.contains(p)) {
        return true;
    }
    let corners = [
        [b.min[0], b.min[1]],
        [b.max[0], b.min[1]],
        [b.max[0], b.max[1]],
        [b.min[0], b.max[1]],
    ];
    // an edge crossing the box boundary, or the box inside the polygon
    let n = ring.len();
    let crosses = (0..n).any(|k| (0..4).any(|e| segments_intersect(ring[k], ring[(k + 1) % n], corners[e], corners[(e + 1) % 4])));
    crosses || crossing_inside(ring, corners[0])
}

fn segments_intersect(p1: [f64; 2], p2: [f64; 2], q1: [f64; 2], q2: [f64; 2]) -> bool {
    let cross = |o: [f64; 2], a: [f64; 2], b: [f64; 2]| (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
    let (d1, d2) = (cross(q1, q2, p1), cross(q1, q2, p2));
    let (d3, d4) = (cross(p1, p2, q1), cross(p1, p2, q2));
    d1 * d2 <= 0.0 && d3 * d4 <= 0.0
}

/// Even-odd test, independent of orientation.
fn crossing_inside(ring: &[[f64; 2]], p: [f64; 2]) -> bool {
    let n = ring.len();
    let mut inside = false;
    for k in 0..n {
        let (a, b) = (ring[k], ring[(k + 1) % n]);
        if (a[1] > p[1]) != (b[1] > p[1]) && p[0] < a[0] + (p[1] - a[1]) / (b[1] - a[1]) * (b[0] - a[0]) {
            inside = !inside;
        }
    }
    inside
}
