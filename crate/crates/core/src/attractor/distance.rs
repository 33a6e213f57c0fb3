//! Exact nearest-point distances from raster pixels to a point cloud.

use rayon::prelude::*;

use crate::error::{Error, Result};

use super::chaos::PointCloud;
use super::raster::{RasterField, Window};

const LEAF_SIZE: usize = 8;

/// A static kd-tree over the points of a cloud, for exact nearest-neighbour
/// queries.
pub struct KdTree {
    dim: usize,
    // points reordered so each node owns a contiguous range
    coords: Vec<f64>,
    nodes: Vec<Node>,
    // per node: `dim` minima then `dim` maxima of its points
    boxes: Vec<f64>,
}

#[derive(Clone, Copy)]
struct Node {
    start: usize,
    end: usize,
    // children indices, or usize::MAX for a leaf
    left: usize,
    right: usize,
}

impl KdTree {
    pub fn build(cloud: &PointCloud) -> Self {
        let dim = cloud.dim();
        let mut idx: Vec<usize> = (0..cloud.len()).collect();
        let mut nodes = Vec::new();
        if !idx.is_empty() {
            build_node(cloud, &mut idx, 0, cloud.len(), &mut nodes);
        }
        let mut coords = Vec::with_capacity(cloud.coords().len());
        for &i in &idx {
            coords.extend_from_slice(cloud.point(i));
        }
        let mut boxes = Vec::with_capacity(2 * dim * nodes.len());
        for n in &nodes {
            let pts = &coords[n.start * dim..n.end * dim];
            for a in 0..dim {
                boxes.push(pts.iter().skip(a).step_by(dim).copied().fold(f64::INFINITY, f64::min));
            }
            for a in 0..dim {
                boxes.push(pts.iter().skip(a).step_by(dim).copied().fold(f64::NEG_INFINITY, f64::max));
            }
        }
        Self { dim, coords, nodes, boxes }
    }

    /// Squared distance from `q` to the bounding box of node `n`.
    fn box_distance2(&self, n: usize, q: &[f64]) -> f64 {
        let b = &self.boxes[2 * self.dim * n..2 * self.dim * (n + 1)];
        let (lo, hi) = b.split_at(self.dim);
        let mut d2 = 0.0;
        for a in 0..self.dim {
            let v = q[a];
            let e = if v < lo[a] {
                lo[a] - v
            } else if v > hi[a] {
                v - hi[a]
            } else {
                0.0
            };
            d2 += e * e;
        }
        d2
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    /// Distance from `q` to the nearest point, `+∞` for an empty tree.
    pub fn nearest_distance(&self, q: &[f64]) -> f64 {
        self.nearest_within(q, f64::INFINITY).sqrt()
    }

    /// Squared distance to the nearest point, or `bound2` if nothing is
    /// strictly closer than `sqrt(bound2)`.
    pub fn nearest_within(&self, q: &[f64], bound2: f64) -> f64 {
        let mut best = bound2;
        if !self.nodes.is_empty() {
            self.search(0, q, &mut best);
        }
        best
    }

    fn search(&self, n: usize, q: &[f64], best: &mut f64) {
        let node = self.nodes[n];
        if node.left == usize::MAX {
            let pts = &self.coords[node.start * self.dim..node.end * self.dim];
            if self.dim == 2 {
                for p in pts.chunks_exact(2) {
                    let (dx, dy) = (p[0] - q[0], p[1] - q[1]);
                    let d2 = dx * dx + dy * dy;
                    if d2 < *best {
                        *best = d2;
                    }
                }
            } else {
                for p in pts.chunks_exact(self.dim) {
                    let d2: f64 = p.iter().zip(q).map(|(a, b)| (a - b) * (a - b)).sum();
                    if d2 < *best {
                        *best = d2;
                    }
                }
            }
            return;
        }
        let (dl, dr) = (self.box_distance2(node.left, q), self.box_distance2(node.right, q));
        let ((near, dn), (far, df)) = if dl <= dr {
            ((node.left, dl), (node.right, dr))
        } else {
            ((node.right, dr), (node.left, dl))
        };
        if dn < *best {
            self.search(near, q, best);
        }
        if df < *best {
            self.search(far, q, best);
        }
    }
}

fn build_node(cloud: &PointCloud, idx: &mut [usize], start: usize, end: usize, nodes: &mut Vec<Node>) -> usize {
    let me = nodes.len();
    nodes.push(Node {
        start,
        end,
        left: usize::MAX,
        right: usize::MAX,
    });
    if end - start <= LEAF_SIZE {
        return me;
    }
    let dim = cloud.dim();
    let slice = &mut idx[start..end];
    // split on the axis of largest spread
    let mut axis = 0;
    let mut spread = -1.0;
    for a in 0..dim {
        let (lo, hi) = slice.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &i| {
            let v = cloud.point(i)[a];
            (lo.min(v), hi.max(v))
        });
        if hi - lo > spread {
            spread = hi - lo;
            axis = a;
        }
    }
    if spread <= 0.0 {
        return me;
    }
    let mid = slice.len() / 2;
    slice.select_nth_unstable_by(mid, |&a, &b| cloud.point(a)[axis].total_cmp(&cloud.point(b)[axis]));
    let left = build_node(cloud, idx, start, start + mid, nodes);
    let right = build_node(cloud, idx, start + mid, end, nodes);
    nodes[me] = Node { start, end, left, right };
    me
}

/// Distance from every pixel center of the grid to the nearest cloud point.
pub fn distance_field(cloud: &PointCloud, window: &Window, width: usize, height: usize) -> Result<RasterField> {
    if cloud.is_empty() {
        return Err(Error::Empty("point cloud"));
    }
    if cloud.dim() != window.dim() {
        return Err(Error::DimensionMismatch {
            expected: window.dim(),
            found: cloud.dim(),
        });
    }
    let tree = KdTree::build(cloud);
    distance_field_from_tree(&tree, window, width, height)
}

pub fn distance_field_from_tree(tree: &KdTree, window: &Window, width: usize, height: usize) -> Result<RasterField> {
    let mut field = RasterField::new(window.clone(), width, height)?;
    let geom = field.geometry();
    // Along a row the distance changes by at most the pixel pitch, which
    // bounds each search by the previous answer.
    let step = geom.dx * (1.0 + 1e-9);
    field.samples_mut().par_chunks_mut(width).enumerate().for_each(|(j, row)| {
        let mut p = vec![0.0; geom.dim];
        let mut prev = f64::INFINITY;
        for (i, v) in row.iter_mut().enumerate() {
            geom.center_into(i, j, &mut p);
            let b = prev + step;
            *v = tree.nearest_within(&p, b * b).sqrt();
            prev = *v;
        }
    });
    Ok(field)
}

/// Nearest distances for an arbitrary list of query points.
pub fn nearest_distances(tree: &KdTree, queries: &[Vec<f64>]) -> Vec<f64> {
    queries.par_iter().map(|q| tree.nearest_distance(q)).collect()
}
