use crate::error::{Error, Result};

/// Similarity dimension: the unique `D > 0` with `Σ λ_i^D = 1`.
///
/// `D ↦ Σ λ_i^D` is strictly decreasing and convex, so a Newton step that
/// leaves the current bracket is replaced by bisection.
pub fn moran_dimension(ratios: &[f64]) -> Result<f64> {
    if ratios.len() < 2 {
        return Err(Error::TooFewMaps(ratios.len()));
    }
    for (index, &ratio) in ratios.iter().enumerate() {
        if !(ratio > 0.0 && ratio < 1.0) {
            return Err(Error::NonContractive { index, ratio });
        }
    }
    let logs: Vec<f64> = ratios.iter().map(|r| r.ln()).collect();
    let g = |d: f64| logs.iter().map(|l| (l * d).exp()).sum::<f64>() - 1.0;
    let dg = |d: f64| logs.iter().map(|l| l * (l * d).exp()).sum::<f64>();

    // g(0) = m − 1 > 0; grow the upper end until g < 0.
    let (mut lo, mut hi) = (0.0, 1.0);
    while g(hi) > 0.0 {
        lo = hi;
        hi *= 2.0;
    }
    let mut d = 0.5 * (lo + hi);
    for _ in 0..200 {
        let v = g(d);
        if v == 0.0 {
            return Ok(d);
        }
        if v > 0.0 {
            lo = d;
        } else {
            hi = d;
        }
        let step = d - v / dg(d);
        let next = if step > lo && step < hi { step } else { 0.5 * (lo + hi) };
        if (next - d).abs() <= 4.0 * f64::EPSILON * d.max(1.0) {
            d = next;
            break;
        }
        d = next;
    }
    Ok(d)
}
