use std::sync::Arc;

use crate::attractor::{RasterField, Window};
use crate::error::{Error, Result};
use crate::tiling::TileShape;

use super::boundary::contour;
use super::estimate::CentralSetEstimate;
use super::feasibility::mask_distances;

/// A raster shape with a signed distance field, positive inside.
///
/// The boundary sits halfway between on and off pixel centers, so an on
/// pixel has distance at least half a pixel and an off pixel at most minus
/// half a pixel. Everything outside the grid is outside the shape.
#[derive(Clone, Debug, PartialEq)]
pub struct Stencil {
    mask: RasterField,
    signed: Vec<f64>,
    bounds: Window,
}

impl Stencil {
    pub fn from_mask(mask: RasterField) -> Result<Self> {
        if mask.count_on() == 0 {
            return Err(Error::Empty("stencil mask"));
        }
        let (to_on, to_off) = mask_distances(&mask);
        let px = mask.pixel_size();
        let signed = (0..mask.len())
            .map(|k| {
                if mask.samples()[k] > 0.5 {
                    to_off[k] * px - 0.5 * px
                } else {
                    -(to_on[k] * px - 0.5 * px)
                }
            })
            .collect();
        let bounds = on_bounds(&mask);
        Ok(Self { mask, signed, bounds })
    }

    pub fn mask(&self) -> &RasterField {
        &self.mask
    }

    pub fn dim(&self) -> usize {
        self.mask.window().dim()
    }

    /// Area (length in 1-d) of the on pixels.
    pub fn measure(&self) -> f64 {
        self.mask.count_on() as f64 * self.mask.pixel_measure()
    }

    /// Box spanned by the on pixels, to their outer edges.
    pub fn bounds(&self) -> &Window {
        &self.bounds
    }

    pub fn signed_distance(&self, p: &[f64]) -> f64 {
        let window = self.mask.window();
        let gap = window.distance_to(p);
        let clamped: Vec<f64> = p
            .iter()
            .zip(window.min.iter().zip(&window.max))
            .map(|(v, (lo, hi))| {
                // stay strictly inside so the pixel lookup succeeds
                let eps = 1e-12 * (hi - lo);
                v.clamp(lo + eps, hi - eps)
            })
            .collect();
        let (i, j) = self.mask.pixel_of(&clamped).expect("clamped into the window");
        let sd = self.signed[j * self.mask.width() + i];
        if gap > 0.0 {
            sd.min(0.0) - gap
        } else {
            sd
        }
    }

    /// Closed outlines (a pair of endpoints per run in 1-d).
    pub fn outline(&self) -> Vec<Vec<[f64; 2]>> {
        let px = self.mask.pixel_size();
        let (w, h) = (self.mask.width(), self.mask.height());
        if h == 1 {
            let mut out = Vec::new();
            let mut start: Option<f64> = None;
            for i in 0..=w {
                let on = i < w && self.mask.is_on(i, 0);
                let edge = self.mask.window().min[0] + i as f64 * px;
                match (on, start) {
                    (true, None) => start = Some(edge),
                    (false, Some(s)) => {
                        out.push(vec![[s, 0.0], [edge, 0.0]]);
                        start = None;
                    }
                    _ => {}
                }
            }
            return out;
        }
        let py = self.mask.window().extent(1) / h as f64;
        let window = Window {
            min: vec![self.mask.window().min[0] - px, self.mask.window().min[1] - py],
            max: vec![self.mask.window().max[0] + px, self.mask.window().max[1] + py],
        };
        let mut padded = RasterField::filled(window, w + 2, h + 2, -0.5 * px).expect("valid padded grid");
        for j in 0..h {
            for i in 0..w {
                padded.set(i + 1, j + 1, self.signed[j * w + i]);
            }
        }
        contour(&padded, 0.0).polylines
    }
}

fn on_bounds(mask: &RasterField) -> Window {
    let (w, h) = (mask.width(), mask.height());
    let (mut i0, mut i1, mut j0, mut j1) = (usize::MAX, 0, usize::MAX, 0);
    for j in 0..h {
        for i in 0..w {
            if mask.is_on(i, j) {
                i0 = i0.min(i);
                i1 = i1.max(i);
                j0 = j0.min(j);
                j1 = j1.max(j);
            }
        }
    }
    let win = mask.window();
    let dx = win.extent(0) / w as f64;
    let x = [win.min[0] + i0 as f64 * dx, win.min[0] + (i1 + 1) as f64 * dx];
    if h == 1 {
        return Window {
            min: vec![x[0]],
            max: vec![x[1]],
        };
    }
    let dy = win.extent(1) / h as f64;
    Window {
        min: vec![x[0], win.max[1] - (j1 + 1) as f64 * dy],
        max: vec![x[1], win.max[1] - j0 as f64 * dy],
    }
}

/// The estimated central set as a tile shape, in the attractor's frame.
pub fn tile_shape_from_mask(c: &CentralSetEstimate) -> Result<TileShape> {
    let stencil = Stencil::from_mask(c.mask.clone())?;
    Ok(TileShape::Stencil {
        label: "central open set".into(),
        stencil: Arc::new(stencil),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_mask_is_its_window() {
        let w = Window::rect(0.0, 0.0, 2.0, 1.0).unwrap();
        let m = RasterField::filled(w.clone(), 20, 10, 1.0).unwrap();
        let s = Stencil::from_mask(m).unwrap();
        assert_eq!(s.bounds(), &w);
        assert!((s.measure() - 2.0).abs() < 1e-12);
        assert!((s.signed_distance(&[0.05, 0.5]) - 0.05).abs() < 1e-12);
        assert!((s.signed_distance(&[1.0, 0.55]) - 0.45).abs() < 1e-12);
        assert!(s.signed_distance(&[3.0, 0.5]) < -0.9);
        let outline = s.outline();
        assert_eq!(outline.len(), 1);
        for p in &outline[0] {
            assert!(w.expanded(1e-9).contains(p) && !w.scaled(0.9).contains(p));
        }
    }

    #[test]
    fn interval_stencil() {
        let w = Window::interval(-0.5, 1.5).unwrap();
        let m = RasterField::from_fn(w, 200, 1, |p| if (0.0..1.0).contains(&p[0]) { 1.0 } else { 0.0 }).unwrap();
        let s = Stencil::from_mask(m).unwrap();
        let b = s.bounds();
        assert!(b.min[0].abs() < 1e-12 && (b.max[0] - 1.0).abs() < 1e-12);
        assert_eq!(s.outline().len(), 1);
        assert!(s.signed_distance(&[0.5]) > 0.49 && s.signed_distance(&[1.2]) < -0.19);
    }
}
