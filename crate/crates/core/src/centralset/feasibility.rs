use serde::Serialize;

use crate::attractor::{euclidean_distance_transform, RasterField};
use crate::geometry::IfsSpec;

use super::estimate::CentralSetEstimate;

/// Width, in pixels, of the band around the boundary inside which raster
/// discrepancies are attributed to discretization.
pub const BOUNDARY_BAND: f64 = 2.0;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PairOverlap {
    pub i: usize,
    pub j: usize,
    /// Pixels inside both images.
    pub pixels: usize,
    /// Pixels deeper than the band inside both images.
    pub beyond_band: usize,
}

/// Raster evidence for `F(C) ⊂ C` and `f_i(C) ∩ f_j(C) = ∅`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FeasibilityReport {
    pub mask_pixels: usize,
    /// Images `f_i(x)` of on-pixel centers that land on an off pixel.
    pub containment_violations: usize,
    /// Those of them farther than the band from every on pixel.
    pub containment_beyond_band: usize,
    pub containment_fraction: f64,
    pub overlaps: Vec<PairOverlap>,
    pub passed: bool,
}

impl FeasibilityReport {
    pub fn verdict(&self) -> &'static str {
        if self.passed {
            "OSC evidence: passes"
        } else {
            "OSC evidence: fails"
        }
    }
}

/// Pixel-unit distance to the nearest pixel of the opposite state, with the
/// area outside the grid treated as off.
pub(crate) fn mask_distances(mask: &RasterField) -> (Vec<f64>, Vec<f64>) {
    let (w, h) = (mask.width(), mask.height());
    // one pixel of off padding on each side (only along x in 1-d)
    let pad_y = usize::from(h > 1);
    let (pw, ph) = (w + 2, h + 2 * pad_y);
    let mut on = vec![false; pw * ph];
    for j in 0..h {
        for i in 0..w {
            on[(j + pad_y) * pw + i + 1] = mask.is_on(i, j);
        }
    }
    let off: Vec<bool> = on.iter().map(|b| !b).collect();
    let to_on = euclidean_distance_transform(pw, ph, &on);
    let to_off = euclidean_distance_transform(pw, ph, &off);
    let crop = |v: &[f64]| {
        let mut out = Vec::with_capacity(w * h);
        for j in 0..h {
            out.extend_from_slice(&v[(j + pad_y) * pw + 1..(j + pad_y) * pw + 1 + w]);
        }
        out
    };
    (crop(&to_on), crop(&to_off))
}

/// Checks the central-set estimate for feasibility at raster tolerance.
///
/// Containment: every on-pixel center is mapped by each `f_i`; a hit on an
/// off pixel is a violation, and counts as beyond the band when that pixel is
/// more than [`BOUNDARY_BAND`] pixels from the mask. Disjointness: a pixel
/// lies in `f_i(C̃)` when `f_i⁻¹` of its center falls on the mask, at depth
/// `λ_i ·` (distance to the nearest off pixel); pairs sharing pixels deeper
/// than the band in both images fail.
pub fn feasibility_check(spec: &IfsSpec, c: &CentralSetEstimate) -> FeasibilityReport {
    let mask = &c.mask;
    let mask_pixels = mask.count_on();
    if mask_pixels == 0 {
        return FeasibilityReport {
            mask_pixels,
            containment_violations: 0,
            containment_beyond_band: 0,
            containment_fraction: 0.0,
            overlaps: Vec::new(),
            passed: false,
        };
    }
    let (w, h) = (mask.width(), mask.height());
    let (to_on, to_off) = mask_distances(mask);
    let px = mask.pixel_size();
    let dim = spec.dim();

    let mut violations = 0;
    let mut beyond = 0;
    let mut y = vec![0.0; dim];
    for j in 0..h {
        for i in 0..w {
            if !mask.is_on(i, j) {
                continue;
            }
            let x = mask.center(i, j);
            for f in spec.maps() {
                f.apply_into(&x, &mut y);
                match mask.pixel_of(&y) {
                    Some((a, b)) if mask.is_on(a, b) => {}
                    Some((a, b)) => {
                        violations += 1;
                        if to_on[b * w + a] > BOUNDARY_BAND {
                            beyond += 1;
                        }
                    }
                    None => {
                        violations += 1;
                        if mask.window().distance_to(&y) > BOUNDARY_BAND * px {
                            beyond += 1;
                        }
                    }
                }
            }
        }
    }

    // inside depth in world units of f⁻¹(x) for every pixel and every map
    let inverses: Vec<_> = spec.maps().iter().map(|f| f.invert()).collect();
    let depth_of = |k: usize, p: &[f64], buf: &mut Vec<f64>| -> f64 {
        inverses[k].apply_into(p, buf);
        match mask.pixel_of(buf) {
            Some((a, b)) if mask.is_on(a, b) => spec.maps()[k].ratio() * to_off[b * w + a] * px,
            _ => 0.0,
        }
    };
    let m = spec.len();
    let mut overlaps: Vec<PairOverlap> = Vec::new();
    for a in 0..m {
        for b in a + 1..m {
            overlaps.push(PairOverlap {
                i: a + 1,
                j: b + 1,
                pixels: 0,
                beyond_band: 0,
            });
        }
    }
    let band = BOUNDARY_BAND * px;
    let mut depths = vec![0.0; m];
    let mut buf = vec![0.0; dim];
    for j in 0..h {
        for i in 0..w {
            let p = mask.center(i, j);
            for (k, d) in depths.iter_mut().enumerate() {
                *d = depth_of(k, &p, &mut buf);
            }
            let mut slot = 0;
            for a in 0..m {
                for b in a + 1..m {
                    let (da, db) = (depths[a], depths[b]);
                    if da > 0.0 && db > 0.0 {
                        overlaps[slot].pixels += 1;
                        if da.min(db) > band {
                            overlaps[slot].beyond_band += 1;
                        }
                    }
                    slot += 1;
                }
            }
        }
    }
    let passed = beyond == 0 && overlaps.iter().all(|o| o.beyond_band == 0);
    FeasibilityReport {
        mask_pixels,
        containment_violations: violations,
        containment_beyond_band: beyond,
        containment_fraction: violations as f64 / (mask_pixels * m) as f64,
        overlaps,
        passed,
    }
}
