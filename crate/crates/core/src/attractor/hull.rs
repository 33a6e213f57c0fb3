//! Convex hull of an attractor, computed as the fixed point of
//! `P ↦ conv(f₁(P) ∪ … ∪ f_m(P))`.
//!
//! `conv(F(conv A)) = conv(A)`, so iterating from any convex body that
//! contains the attractor converges to its hull geometrically, at rate
//! `max λ_i`.

use crate::error::{Error, Result};
use crate::geometry::IfsSpec;

use super::raster::Window;

const MAX_ITERATIONS: usize = 2000;

/// Convex hull of an attractor in one or two dimensions.
#[derive(Clone, Debug, PartialEq)]
pub enum Hull {
    Interval {
        lo: f64,
        hi: f64,
    },
    /// Counter-clockwise vertices.
    Polygon(Vec<[f64; 2]>),
}

impl Hull {
    pub fn bounding_box(&self) -> Window {
        match self {
            Hull::Interval { lo, hi } => Window {
                min: vec![*lo],
                max: vec![*hi],
            },
            Hull::Polygon(v) => {
                let flat: Vec<f64> = v.iter().flatten().copied().collect();
                Window::bounding(2, &flat).expect("non-empty hull")
            }
        }
    }

    pub fn diameter(&self) -> f64 {
        match self {
            Hull::Interval { lo, hi } => hi - lo,
            Hull::Polygon(v) => {
                let mut d: f64 = 0.0;
                for a in v {
                    for b in v {
                        d = d.max(((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt());
                    }
                }
                d
            }
        }
    }
}

/// Radius `R` of a ball about `center` that every map sends into itself.
pub fn invariant_radius(spec: &IfsSpec, center: &[f64]) -> f64 {
    spec.maps()
        .iter()
        .map(|f| {
            let moved = f.apply(center);
            let d = moved.iter().zip(center).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
            d / (1.0 - f.ratio())
        })
        .fold(0.0, f64::max)
}

pub fn attractor_hull(spec: &IfsSpec) -> Result<Hull> {
    let center = spec.maps()[0]
        .fixed_point()
        .ok_or_else(|| Error::InvalidArgument("first map has no fixed point".into()))?;
    let r = invariant_radius(spec, &center).max(1e-12);
    match spec.dim() {
        1 => {
            let (mut lo, mut hi) = (center[0] - r, center[0] + r);
            for _ in 0..MAX_ITERATIONS {
                let (mut nlo, mut nhi) = (f64::INFINITY, f64::NEG_INFINITY);
                for f in spec.maps() {
                    for x in [lo, hi] {
                        let y = f.apply(&[x])[0];
                        nlo = nlo.min(y);
                        nhi = nhi.max(y);
                    }
                }
                let done = nlo == lo && nhi == hi;
                lo = nlo;
                hi = nhi;
                if done {
                    break;
                }
            }
            Ok(Hull::Interval { lo, hi })
        }
        2 => {
            let (cx, cy) = (center[0], center[1]);
            let mut poly = vec![[cx - r, cy - r], [cx + r, cy - r], [cx + r, cy + r], [cx - r, cy + r]];
            let scale = 1.0 + 2.0 * r;
            let mut stable = 0;
            for _ in 0..MAX_ITERATIONS {
                let mut pts = Vec::with_capacity(poly.len() * spec.len());
                for f in spec.maps() {
                    pts.extend(poly.iter().map(|&p| f.apply2(p)));
                }
                let next = simplify(convex_hull(pts), 1e-13 * scale);
                let change = hausdorff_vertices(&poly, &next);
                poly = next;
                if change <= 1e-15 * scale {
                    stable += 1;
                    if stable >= 3 {
                        break;
                    }
                } else {
                    stable = 0;
                }
            }
            Ok(Hull::Polygon(poly))
        }
        d => Err(Error::UnsupportedDimension(d)),
    }
}

/// Andrew's monotone chain; counter-clockwise, collinear points dropped.
pub fn convex_hull(mut pts: Vec<[f64; 2]>) -> Vec<[f64; 2]> {
    pts.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }
    let cross = |o: [f64; 2], a: [f64; 2], b: [f64; 2]| (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
    let mut lower: Vec<[f64; 2]> = Vec::new();
    for &p in &pts {
        while lower.len() >= 2 && cross(lower[lower.len() - 2], lower[lower.len() - 1], p) <= 0.0 {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<[f64; 2]> = Vec::new();
    for &p in pts.iter().rev() {
        while upper.len() >= 2 && cross(upper[upper.len() - 2], upper[upper.len() - 1], p) <= 0.0 {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

// Drops vertices whose distance to the chord of their neighbours is below
// `eps`; keeps vertex counts bounded for hulls with curved boundaries.
fn simplify(poly: Vec<[f64; 2]>, eps: f64) -> Vec<[f64; 2]> {
    if poly.len() <= 3 {
        return poly;
    }
    let mut out: Vec<[f64; 2]> = Vec::with_capacity(poly.len());
    let n = poly.len();
    for i in 0..n {
        let prev = *out.last().unwrap_or(&poly[(i + n - 1) % n]);
        let next = poly[(i + 1) % n];
        let p = poly[i];
        let (ex, ey) = (next[0] - prev[0], next[1] - prev[1]);
        let len = (ex * ex + ey * ey).sqrt();
        let dist = if len > 0.0 {
            ((p[0] - prev[0]) * ey - (p[1] - prev[1]) * ex).abs() / len
        } else {
            0.0
        };
        if dist > eps || n - (i - out.len()) <= 3 {
            out.push(p);
        }
    }
    if out.len() < 3 {
        poly
    } else {
        out
    }
}

fn hausdorff_vertices(a: &[[f64; 2]], b: &[[f64; 2]]) -> f64 {
    let one_way = |x: &[[f64; 2]], y: &[[f64; 2]]| {
        x.iter()
            .map(|p| {
                y.iter()
                    .map(|q| ((p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2)).sqrt())
                    .fold(f64::INFINITY, f64::min)
            })
            .fold(0.0, f64::max)
    };
    one_way(a, b).max(one_way(b, a))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Similitude;

    #[test]
    fn dyadic_hull_is_unit_interval() {
        let spec = IfsSpec::new(
            "d",
            vec![Similitude::linear_1d(0.5, 0.0).unwrap(), Similitude::linear_1d(0.5, 0.5).unwrap()],
        )
        .unwrap();
        match attractor_hull(&spec).unwrap() {
            Hull::Interval { lo, hi } => {
                assert!(lo.abs() < 1e-14 && (hi - 1.0).abs() < 1e-14, "{lo} {hi}");
            }
            h => panic!("{h:?}"),
        }
    }

    #[test]
    fn square_and_triangle_hulls() {
        let maps = [(0.0, 0.0), (0.5, 0.0), (0.0, 0.5), (0.5, 0.5)]
            .iter()
            .map(|&(e, g)| Similitude::planar(0.5, 0.0, e, 0.0, 0.5, g).unwrap())
            .collect();
        let square = IfsSpec::new("sq", maps).unwrap();
        let bb = attractor_hull(&square).unwrap().bounding_box();
        for k in 0..2 {
            assert!(bb.min[k].abs() < 1e-12 && (bb.max[k] - 1.0).abs() < 1e-12);
        }

        let h = 3f64.sqrt() / 4.0;
        let tri = IfsSpec::new(
            "s",
            vec![
                Similitude::planar(0.5, 0.0, 0.0, 0.0, 0.5, 0.0).unwrap(),
                Similitude::planar(0.5, 0.0, 0.5, 0.0, 0.5, 0.0).unwrap(),
                Similitude::planar(0.5, 0.0, 0.25, 0.0, 0.5, h).unwrap(),
            ],
        )
        .unwrap();
        match attractor_hull(&tri).unwrap() {
            Hull::Polygon(v) => {
                assert_eq!(v.len(), 3, "{v:?}");
                let want = [[0.0, 0.0], [1.0, 0.0], [0.5, 2.0 * h]];
                for w in want {
                    assert!(v.iter().any(|p| (p[0] - w[0]).abs() < 1e-12 && (p[1] - w[1]).abs() < 1e-12));
                }
            }
            h => panic!("{h:?}"),
        }
    }
}
