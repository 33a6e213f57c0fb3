use std::fmt;
use std::sync::Arc;

use serde_json::{json, Value};

use crate::attractor::{attractor_hull, attractor_mask, polygon_distance, Hull, KdTree, PointCloud, Window};
use crate::centralset::Stencil;
use crate::error::{Error, Result};
use crate::geometry::{IfsSpec, Similitude};

/// The closed set `T` whose images make up a tiling.
#[derive(Clone)]
pub enum TileShape {
    Interval {
        lo: f64,
        hi: f64,
    },
    Box(Window),
    /// Simple polygon, counter-clockwise.
    Polygon(Vec<[f64; 2]>),
    Stencil {
        label: String,
        stencil: Arc<Stencil>,
    },
    Cloud {
        label: String,
        cloud: Arc<PointCloud>,
        tree: Arc<KdTree>,
    },
}

impl fmt::Debug for TileShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TileShape::Interval { lo, hi } => write!(f, "Interval[{lo}, {hi}]"),
            TileShape::Box(w) => write!(f, "Box({:?}, {:?})", w.min, w.max),
            TileShape::Polygon(v) => write!(f, "Polygon({v:?})"),
            TileShape::Stencil { label, stencil } => {
                write!(f, "Stencil({label}, {} on pixels)", stencil.mask().count_on())
            }
            TileShape::Cloud { label, cloud, .. } => write!(f, "Cloud({label}, {} points)", cloud.len()),
        }
    }
}

impl TileShape {
    pub fn interval(lo: f64, hi: f64) -> Result<Self> {
        if lo.is_nan() || hi.is_nan() || lo >= hi {
            return Err(Error::InvalidArgument(format!("empty interval [{lo}, {hi}]")));
        }
        Ok(TileShape::Interval { lo, hi })
    }

    /// A simple polygon with at least three vertices; stored counter-clockwise.
    pub fn polygon(mut vertices: Vec<[f64; 2]>) -> Result<Self> {
        if vertices.len() < 3 {
            return Err(Error::InvalidArgument("a polygon needs at least three vertices".into()));
        }
        if signed_area(&vertices) < 0.0 {
            vertices.reverse();
        }
        if signed_area(&vertices) <= 0.0 || !is_simple(&vertices) {
            return Err(Error::InvalidArgument("polygon is degenerate or self-intersecting".into()));
        }
        Ok(TileShape::Polygon(vertices))
    }

    pub fn cloud(label: impl Into<String>, cloud: PointCloud) -> Self {
        let tree = KdTree::build(&cloud);
        TileShape::Cloud {
            label: label.into(),
            cloud: Arc::new(cloud),
            tree: Arc::new(tree),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            TileShape::Interval { .. } => "interval",
            TileShape::Box(_) => "box",
            TileShape::Polygon(_) => "polygon",
            TileShape::Stencil { .. } => "stencil",
            TileShape::Cloud { .. } => "attractor-cloud",
        }
    }

    pub fn label(&self) -> String {
        match self {
            TileShape::Stencil { label, .. } | TileShape::Cloud { label, .. } => label.clone(),
            other => other.kind().to_string(),
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            TileShape::Interval { .. } => 1,
            TileShape::Box(w) => w.dim(),
            TileShape::Polygon(_) => 2,
            TileShape::Stencil { stencil, .. } => stencil.dim(),
            TileShape::Cloud { cloud, .. } => cloud.dim(),
        }
    }

    /// Whether tiles of this shape have an interior that can overlap.
    pub fn is_solid(&self) -> bool {
        !matches!(self, TileShape::Cloud { .. })
    }

    pub fn bounds(&self) -> Window {
        match self {
            TileShape::Interval { lo, hi } => Window {
                min: vec![*lo],
                max: vec![*hi],
            },
            TileShape::Box(w) => w.clone(),
            TileShape::Polygon(v) => {
                let flat: Vec<f64> = v.iter().flatten().copied().collect();
                Window::bounding(2, &flat).expect("non-empty polygon")
            }
            TileShape::Stencil { stencil, .. } => stencil.bounds().clone(),
            TileShape::Cloud { cloud, .. } => cloud.bounding_box().expect("non-empty cloud"),
        }
    }

    /// Bounding box of `f(T)`.
    pub fn image_bounds(&self, f: &Similitude) -> Window {
        let pts: Vec<f64> = match self {
            TileShape::Polygon(v) => v.iter().flat_map(|&p| f.apply2(p)).collect(),
            _ => self.bounds().corners().iter().flat_map(|c| f.apply(c)).collect(),
        };
        Window::bounding(self.dim(), &pts).expect("non-empty")
    }

    /// Signed distance to the boundary in the shape's own frame, positive
    /// inside. Clouds have no interior and report minus the distance to the
    /// nearest point.
    pub fn signed_distance(&self, p: &[f64]) -> f64 {
        match self {
            TileShape::Interval { lo, hi } => (p[0] - lo).min(hi - p[0]),
            TileShape::Box(w) => {
                if w.contains(p) {
                    (0..w.dim())
                        .map(|k| (p[k] - w.min[k]).min(w.max[k] - p[k]))
                        .fold(f64::INFINITY, f64::min)
                } else {
                    -w.distance_to(p)
                }
            }
            TileShape::Polygon(v) => {
                let q = [p[0], p[1]];
                let d = edge_distance(v, q);
                if winding_inside(v, q) {
                    d
                } else {
                    -d
                }
            }
            TileShape::Stencil { stencil, .. } => stencil.signed_distance(p),
            TileShape::Cloud { tree, .. } => -tree.nearest_distance(p),
        }
    }

    /// Length (1-d) or area of the shape; zero for clouds.
    pub fn measure(&self) -> f64 {
        match self {
            TileShape::Interval { lo, hi } => hi - lo,
            TileShape::Box(w) => (0..w.dim()).map(|k| w.extent(k)).product(),
            TileShape::Polygon(v) => signed_area(v),
            TileShape::Stencil { stencil, .. } => stencil.measure(),
            TileShape::Cloud { .. } => 0.0,
        }
    }

    /// Outline polylines in the shape's own frame (endpoint pairs in 1-d).
    pub fn outline(&self) -> Vec<Vec<[f64; 2]>> {
        match self {
            TileShape::Interval { lo, hi } => vec![vec![[*lo, 0.0], [*hi, 0.0]]],
            TileShape::Box(w) if w.dim() == 1 => vec![vec![[w.min[0], 0.0], [w.max[0], 0.0]]],
            TileShape::Box(w) => {
                let (x0, y0, x1, y1) = (w.min[0], w.min[1], w.max[0], w.max[1]);
                vec![vec![[x0, y0], [x1, y0], [x1, y1], [x0, y1], [x0, y0]]]
            }
            TileShape::Polygon(v) => {
                let mut ring = v.clone();
                ring.push(v[0]);
                vec![ring]
            }
            TileShape::Stencil { stencil, .. } => stencil.outline(),
            TileShape::Cloud { .. } => Vec::new(),
        }
    }

    /// JSON description for the shape table of an exported tiling.
    pub fn to_json(&self) -> Value {
        let data = match self {
            TileShape::Interval { lo, hi } => json!([lo, hi]),
            TileShape::Box(w) => json!({ "min": w.min, "max": w.max }),
            TileShape::Polygon(v) => json!(v),
            TileShape::Stencil { stencil, .. } => {
                let m = stencil.mask();
                json!({
                    "window": m.window(),
                    "width": m.width(),
                    "height": m.height(),
                    "on_pixels": m.count_on(),
                    "measure": stencil.measure(),
                })
            }
            TileShape::Cloud { cloud, .. } => json!({ "points": cloud.len() }),
        };
        json!({ "kind": self.kind(), "label": self.label(), "data": data })
    }
}

fn signed_area(v: &[[f64; 2]]) -> f64 {
    let n = v.len();
    (0..n)
        .map(|k| {
            let (a, b) = (v[k], v[(k + 1) % n]);
            a[0] * b[1] - a[1] * b[0]
        })
        .sum::<f64>()
        / 2.0
}

fn segments_cross(p1: [f64; 2], p2: [f64; 2], q1: [f64; 2], q2: [f64; 2]) -> bool {
    let orient = |a: [f64; 2], b: [f64; 2], c: [f64; 2]| (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]);
    let (d1, d2) = (orient(q1, q2, p1), orient(q1, q2, p2));
    let (d3, d4) = (orient(p1, p2, q1), orient(p1, p2, q2));
    (d1 > 0.0) != (d2 > 0.0) && (d3 > 0.0) != (d4 > 0.0) && d1 != 0.0 && d2 != 0.0 && d3 != 0.0 && d4 != 0.0
}

fn is_simple(v: &[[f64; 2]]) -> bool {
    let n = v.len();
    for a in 0..n {
        for b in a + 1..n {
            // adjacent edges share a vertex
            if b == a + 1 || (a == 0 && b == n - 1) {
                continue;
            }
            if segments_cross(v[a], v[(a + 1) % n], v[b], v[(b + 1) % n]) {
                return false;
            }
        }
    }
    true
}

fn edge_distance(v: &[[f64; 2]], p: [f64; 2]) -> f64 {
    let n = v.len();
    (0..n)
        .map(|k| polygon_distance(&[v[k], v[(k + 1) % n]], p))
        .fold(f64::INFINITY, f64::min)
}

fn winding_inside(v: &[[f64; 2]], p: [f64; 2]) -> bool {
    let n = v.len();
    let mut inside = false;
    for k in 0..n {
        let (a, b) = (v[k], v[(k + 1) % n]);
        if (a[1] > p[1]) != (b[1] > p[1]) {
            let x = a[0] + (p[1] - a[1]) / (b[1] - a[1]) * (b[0] - a[0]);
            if p[0] < x {
                inside = !inside;
            }
        }
    }
    inside
}

/// The attractor as a tile shape.
///
/// When the attractor fills its convex hull at the given resolution the
/// hull itself is returned (an interval or a polygon), which is exact.
/// Otherwise the attractor mask over the hull's bounding box becomes a
/// stencil.
pub fn attractor_shape(spec: &IfsSpec, resolution: usize) -> Result<TileShape> {
    let hull = attractor_hull(spec)?;
    let bbox = hull.bounding_box();
    let pad = 2.0 * (0..bbox.dim()).map(|k| bbox.extent(k)).fold(0.0, f64::max) / resolution as f64;
    let window = bbox.expanded(pad);
    let height = if spec.dim() == 1 { 1 } else { resolution };
    let mask = attractor_mask(spec, &window, resolution, height, 64)?;
    let mut inside = 0usize;
    let mut filled = 0usize;
    let mut centers = vec![0.0; spec.dim()];
    for j in 0..height {
        for i in 0..resolution {
            centers.copy_from_slice(&mask.center(i, j));
            let in_hull = match &hull {
                Hull::Interval { lo, hi } => centers[0] >= *lo && centers[0] <= *hi,
                Hull::Polygon(v) => polygon_distance(v, [centers[0], centers[1]]) == 0.0,
            };
            if in_hull {
                inside += 1;
                if mask.is_on(i, j) {
                    filled += 1;
                }
            }
        }
    }
    if inside > 0 && filled as f64 >= 0.999 * inside as f64 {
        return match hull {
            Hull::Interval { lo, hi } => TileShape::interval(lo, hi),
            Hull::Polygon(v) => TileShape::polygon(v),
        };
    }
    Ok(TileShape::Stencil {
        label: "attractor".into(),
        stencil: Arc::new(Stencil::from_mask(mask)?),
    })
}
