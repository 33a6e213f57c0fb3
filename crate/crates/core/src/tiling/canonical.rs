use crate::error::{Error, Result};
use crate::geometry::{Address, CostFunction, IfsSpec, Similitude, Word};

use super::build::{cut_images, tiling_prefix, Tile, Tiling, TilingMeta};
use super::cutset::DEFAULT_CUT_SET_CAP;
use super::shape::TileShape;

/// Costs equal to the integer scale exponents `a_i`.
pub fn exponent_costs(spec: &IfsSpec) -> Result<CostFunction> {
    let a = spec.integer_exponents()?;
    CostFunction::new(a.into_iter().map(f64::from).collect())
}

/// `T_k = s^{−k}{f_{(j|l)}(T) : c(j|l−1) ≤ k < c(j|l)}` with `c_i = a_i`.
///
/// Every tile has size `s^{c(j|l) − k}` with `c(j|l) − k ∈ {1, …, max a_i}`.
pub fn canonical_tiling(spec: &IfsSpec, k: u32, shape: TileShape) -> Result<Tiling> {
    let cf = exponent_costs(spec)?;
    if shape.dim() != spec.dim() {
        return Err(Error::DimensionMismatch {
            expected: spec.dim(),
            found: shape.dim(),
        });
    }
    let s = spec.base_scale();
    let base = Similitude::scaling(spec.dim(), s.powi(-(k as i32)));
    let budget = f64::from(k);
    let tiles = cut_images(spec, &cf, budget, &base, DEFAULT_CUT_SET_CAP)?
        .into_iter()
        .map(|(word_j, cost, transform)| Tile {
            transform,
            shape: 0,
            word_i: Word::empty(),
            word_j,
            cost,
        })
        .collect();
    Ok(Tiling::new(
        vec![shape],
        tiles,
        TilingMeta {
            address_prefix: Word::empty(),
            budget,
        },
    ))
}

/// Checks `Π_T(i|k) = f_{−(i|k)} s^{c(i|k)} T_{c(i|k)}` on transforms, and that
/// `f_{−(i|k)} s^{c(i|k)}` is an isometry.
pub fn canonical_relation_check(spec: &IfsSpec, address: &Address, k: usize, shape: TileShape) -> Result<bool> {
    address.validate(spec.len())?;
    let cf = exponent_costs(spec).map_err(|e| Error::Precondition(format!("costs must be integer exponents: {e}")))?;
    let prefix = address.prefix(k);
    let c = cf.cost(&prefix)?.round() as u32;
    let pi = tiling_prefix(spec, &cf, shape.clone(), &prefix)?;
    let t_c = canonical_tiling(spec, c, shape)?;
    let e = spec
        .word_map_inverse(&prefix)?
        .compose(&Similitude::scaling(spec.dim(), spec.base_scale().powi(c as i32)))?;
    if !e.is_isometry() {
        return Ok(false);
    }
    Ok(pi.same_transforms(&t_c.transformed(&e)?))
}
