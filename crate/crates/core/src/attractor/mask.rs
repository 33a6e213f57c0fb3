//! Deterministic attractor masks from cylinder images of the convex hull.

use crate::error::{Error, Result};
use crate::geometry::{IfsSpec, Similitude};

use super::hull::{attractor_hull, Hull};
use super::raster::{RasterField, Window};

/// Binary mask of the pixels whose centers lie within half a pixel diagonal
/// of some cylinder image `f_{(i|depth)}(K)`, where `K` is the convex hull of
/// the attractor.
///
/// Branches whose image is already smaller than a quarter pixel stop early;
/// their image contains every deeper one, so the mask can only grow by a
/// fraction of a pixel. A window that misses the attractor yields an empty
/// mask.
pub fn attractor_mask(spec: &IfsSpec, window: &Window, width: usize, height: usize, depth: usize) -> Result<RasterField> {
    if depth == 0 {
        return Err(Error::InvalidArgument("depth must be at least 1".into()));
    }
    if window.dim() != spec.dim() {
        return Err(Error::DimensionMismatch {
            expected: spec.dim(),
            found: window.dim(),
        });
    }
    let mut field = RasterField::new(window.clone(), width, height)?;
    let hull = attractor_hull(spec)?;
    let reach = 0.5 * field.pixel_diagonal();
    let stop = 0.25 * field.pixel_size();
    let inflated = window.expanded(reach);
    let diameter = hull.diameter();

    let mut stack: Vec<(Similitude, usize)> = vec![(Similitude::identity(spec.dim()), 0)];
    while let Some((f, level)) = stack.pop() {
        let image = transform_hull(&hull, &f);
        if !image.bounding_box().intersects(&inflated) {
            continue;
        }
        if level == depth || diameter * f.ratio() <= stop {
            paint(&mut field, &image, reach);
            continue;
        }
        for g in spec.maps() {
            stack.push((f.compose(g)?, level + 1));
        }
    }
    Ok(field)
}

fn transform_hull(hull: &Hull, f: &Similitude) -> Hull {
    match hull {
        Hull::Interval { lo, hi } => {
            let (a, b) = (f.apply(&[*lo])[0], f.apply(&[*hi])[0]);
            Hull::Interval {
                lo: a.min(b),
                hi: a.max(b),
            }
        }
        Hull::Polygon(v) => {
            let mut w: Vec<[f64; 2]> = v.iter().map(|&p| f.apply2(p)).collect();
            if f.orientation() < 0.0 {
                w.reverse();
            }
            Hull::Polygon(w)
        }
    }
}

/// Distance from `p` to a convex polygon (zero inside).
pub fn polygon_distance(poly: &[[f64; 2]], p: [f64; 2]) -> f64 {
    let n = poly.len();
    if n == 1 {
        return ((p[0] - poly[0][0]).powi(2) + (p[1] - poly[0][1]).powi(2)).sqrt();
    }
    let mut inside = n >= 3;
    let mut best = f64::INFINITY;
    for k in 0..n {
        let a = poly[k];
        let b = poly[(k + 1) % n];
        let (ex, ey) = (b[0] - a[0], b[1] - a[1]);
        let (px, py) = (p[0] - a[0], p[1] - a[1]);
        if ex * py - ey * px < 0.0 {
            inside = false;
        }
        let len2 = ex * ex + ey * ey;
        let t = if len2 > 0.0 {
            ((px * ex + py * ey) / len2).clamp(0.0, 1.0)
        } else {
            0.0
        };
        let (dx, dy) = (px - t * ex, py - t * ey);
        best = best.min((dx * dx + dy * dy).sqrt());
    }
    if inside {
        0.0
    } else {
        best
    }
}

fn paint(field: &mut RasterField, image: &Hull, reach: f64) {
    let geom = field.geometry();
    let bb = image.bounding_box().expanded(reach);
    let width = field.width();
    // pixel index ranges overlapping the inflated box
    let i0 = (((bb.min[0] - geom.x0) / geom.dx) - 0.5).floor().max(0.0) as usize;
    let i1 = ((((bb.max[0] - geom.x0) / geom.dx) - 0.5).ceil().max(0.0) as usize).min(width - 1);
    let (j0, j1) = if geom.dim >= 2 {
        let j0 = (((geom.y1 - bb.max[1]) / geom.dy) - 0.5).floor().max(0.0) as usize;
        let j1 = ((((geom.y1 - bb.min[1]) / geom.dy) - 0.5).ceil().max(0.0) as usize).min(field.height() - 1);
        (j0, j1)
    } else {
        (0, 0)
    };
    let mut p = [0.0; 2];
    let samples = field.samples_mut();
    for j in j0..=j1 {
        for i in i0..=i1 {
            let idx = j * width + i;
            if samples[idx] > 0.5 {
                continue;
            }
            geom.center_into(i, j, &mut p[..geom.dim]);
            let d = match image {
                Hull::Interval { lo, hi } => (lo - p[0]).max(p[0] - hi).max(0.0),
                Hull::Polygon(v) => polygon_distance(v, p),
            };
            if d <= reach {
                samples[idx] = 1.0;
            }
        }
    }
}
