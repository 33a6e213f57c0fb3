use std::collections::HashMap;
use std::io::Write;

use crate::attractor::{KdTree, RasterField};
use crate::error::{Error, Result};

use super::estimate::{CentralSetEstimate, MARGIN_EPSILON};

/// Zero level of the margin `d(·,H) − d(·,A)`, as polylines in world
/// coordinates. In one dimension every polyline is a single point `[x, 0]`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct BoundaryCurve {
    pub polylines: Vec<Vec<[f64; 2]>>,
}

impl BoundaryCurve {
    pub fn is_empty(&self) -> bool {
        self.polylines.is_empty()
    }

    pub fn points(&self) -> impl Iterator<Item = [f64; 2]> + '_ {
        self.polylines.iter().flatten().copied()
    }

    /// One point per line as `polyline,x,y`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "polyline,x,y")?;
        for (k, line) in self.polylines.iter().enumerate() {
            for p in line {
                writeln!(out, "{k},{:?},{:?}", p[0], p[1])?;
            }
        }
        Ok(())
    }

    /// SVG path data in world coordinates: `M x y L x y …`, closed with `Z`
    /// when a polyline returns to its start.
    pub fn path_data(&self) -> String {
        let mut d = String::new();
        for line in &self.polylines {
            for (k, p) in line.iter().enumerate() {
                if !d.is_empty() {
                    d.push(' ');
                }
                d.push_str(&format!("{}{} {}", if k == 0 { 'M' } else { 'L' }, fmt_num(p[0]), fmt_num(p[1])));
            }
            if line.len() > 2 && line.first() == line.last() {
                d.push_str(" Z");
            }
        }
        d
    }
}

pub(crate) fn fmt_num(v: f64) -> String {
    let s = format!("{v:.9}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".to_string()
    } else {
        s.to_string()
    }
}

/// Marching-squares contour of the margin at the mask threshold, with
/// crossings interpolated linearly along pixel edges.
pub fn extract_boundary(c: &CentralSetEstimate) -> Result<BoundaryCurve> {
    if c.is_empty() {
        return Err(Error::Empty("central set mask"));
    }
    Ok(contour(&c.margin, MARGIN_EPSILON))
}

/// Level-`level` contour of a field; infinite samples are clamped.
pub fn contour(field: &RasterField, level: f64) -> BoundaryCurve {
    let big = 1e6 * (1.0 + field.max_finite());
    let v = |i: usize, j: usize| (field.get(i, j) - level).clamp(-big, big);
    let (w, h) = (field.width(), field.height());
    if h == 1 {
        let mut polylines = Vec::new();
        for i in 0..w - 1 {
            let (a, b) = (v(i, 0), v(i + 1, 0));
            if (a > 0.0) != (b > 0.0) {
                let t = a / (a - b);
                let x0 = field.center(i, 0)[0];
                let x1 = field.center(i + 1, 0)[0];
                polylines.push(vec![[x0 + t * (x1 - x0), 0.0]]);
            }
        }
        return BoundaryCurve { polylines };
    }

    // Edge ids: horizontal edge (i,j)-(i+1,j) is 2·(j·w + i), vertical edge
    // (i,j)-(i,j+1) is 2·(j·w + i) + 1.
    let hid = |i: usize, j: usize| 2 * (j * w + i);
    let vid = |i: usize, j: usize| 2 * (j * w + i) + 1;
    let point_on = |e: usize| -> [f64; 2] {
        let cell = e / 2;
        let (i, j) = (cell % w, cell / w);
        let (i2, j2) = if e.is_multiple_of(2) { (i + 1, j) } else { (i, j + 1) };
        let (a, b) = (v(i, j), v(i2, j2));
        let t = a / (a - b);
        let p = field.center(i, j);
        let q = field.center(i2, j2);
        [p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])]
    };

    let mut segments: Vec<(usize, usize)> = Vec::new();
    for j in 0..h - 1 {
        for i in 0..w - 1 {
            // corners: 0 = (i,j), 1 = (i+1,j), 2 = (i+1,j+1), 3 = (i,j+1)
            let vals = [v(i, j), v(i + 1, j), v(i + 1, j + 1), v(i, j + 1)];
            let inside = vals.map(|x| x > 0.0);
            let edges = [hid(i, j), vid(i + 1, j), hid(i, j + 1), vid(i, j)];
            let crossing: Vec<usize> = (0..4).filter(|&k| inside[k] != inside[(k + 1) % 4]).collect();
            match crossing.len() {
                2 => segments.push((edges[crossing[0]], edges[crossing[1]])),
                4 => {
                    let center = vals.iter().sum::<f64>() / 4.0;
                    // join around the corners that share the center's state
                    if (center > 0.0) == inside[0] {
                        segments.push((edges[0], edges[1]));
                        segments.push((edges[2], edges[3]));
                    } else {
                        segments.push((edges[3], edges[0]));
                        segments.push((edges[1], edges[2]));
                    }
                }
                _ => {}
            }
        }
    }
    let polylines = chain(&segments)
        .into_iter()
        .map(|ids| ids.into_iter().map(point_on).collect())
        .collect();
    BoundaryCurve { polylines }
}

/// Joins segments sharing edge ids into polylines; closed loops repeat
/// their first id at the end.
fn chain(segments: &[(usize, usize)]) -> Vec<Vec<usize>> {
    let mut adj: HashMap<usize, Vec<usize>> = HashMap::new();
    for (k, &(a, b)) in segments.iter().enumerate() {
        adj.entry(a).or_default().push(k);
        adj.entry(b).or_default().push(k);
    }
    let mut used = vec![false; segments.len()];
    let mut lines = Vec::new();
    let other = |k: usize, e: usize| if segments[k].0 == e { segments[k].1 } else { segments[k].0 };
    let walk = |start: usize, first: usize, used: &mut Vec<bool>| {
        let mut ids = vec![start];
        let mut k = first;
        let mut at = start;
        loop {
            used[k] = true;
            at = other(k, at);
            ids.push(at);
            match adj[&at].iter().find(|&&s| !used[s]) {
                Some(&s) => k = s,
                None => break,
            }
        }
        ids
    };
    // open chains start at ids with a single segment
    let mut starts: Vec<usize> = adj.iter().filter(|(_, v)| v.len() == 1).map(|(&e, _)| e).collect();
    starts.sort_unstable();
    for e in starts {
        let k = adj[&e][0];
        if !used[k] {
            lines.push(walk(e, k, &mut used));
        }
    }
    for k in 0..segments.len() {
        if !used[k] {
            lines.push(walk(segments[k].0, k, &mut used));
        }
    }
    lines
}

/// A circle centered on the boundary that touches both `A` and `H`.
#[derive(Clone, Debug, PartialEq)]
pub struct TouchingCircle {
    pub center: [f64; 2],
    pub radius: f64,
}

/// For every `stride`-th boundary point, the largest circle about it that
/// avoids the attractor sample.
pub fn touching_circles(c: &CentralSetEstimate, boundary: &BoundaryCurve, stride: usize) -> Vec<TouchingCircle> {
    let tree = KdTree::build(&c.attractor);
    let dim = c.attractor.dim();
    boundary
        .points()
        .step_by(stride.max(1))
        .map(|p| TouchingCircle {
            center: p,
            radius: tree.nearest_distance(&p[..dim]),
        })
        .collect()
}
