use crate::error::{Error, Result};

use super::similitude::Similitude;
use super::word::Word;

/// Tolerance used to decide that a scale exponent is an integer.
pub const INTEGER_EXPONENT_TOLERANCE: f64 = 1e-9;

/// Additive per-symbol costs: `c(i₁…i_k) = c_{i₁} + … + c_{i_k}`, `c(∅) = 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct CostFunction {
    costs: Vec<f64>,
}

impl CostFunction {
    pub fn new(costs: Vec<f64>) -> Result<Self> {
        if costs.is_empty() {
            return Err(Error::Empty("costs"));
        }
        for (index, &value) in costs.iter().enumerate() {
            if !(value > 0.0 && value.is_finite()) {
                return Err(Error::InvalidCost { index, value });
            }
        }
        Ok(Self { costs })
    }

    pub fn costs(&self) -> &[f64] {
        &self.costs
    }

    pub fn alphabet(&self) -> usize {
        self.costs.len()
    }

    pub fn symbol(&self, digit: u8) -> f64 {
        self.costs[digit as usize - 1]
    }

    pub fn min_cost(&self) -> f64 {
        self.costs.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn cost(&self, w: &Word) -> Result<f64> {
        w.validate(self.costs.len())?;
        Ok(w.digits().iter().map(|&d| self.symbol(d)).sum())
    }
}

/// An iterated function system of contractive similitudes with a cost per map.
#[derive(Clone, Debug, PartialEq)]
pub struct IfsSpec {
    name: String,
    maps: Vec<Similitude>,
    costs: CostFunction,
}

impl IfsSpec {
    /// Builds a spec whose costs are the scale exponents `a_i`.
    pub fn new(name: impl Into<String>, maps: Vec<Similitude>) -> Result<Self> {
        let exps = scale_exponents(&maps)?;
        Self::with_costs(name, maps, exps)
    }

    pub fn with_costs(name: impl Into<String>, maps: Vec<Similitude>, costs: Vec<f64>) -> Result<Self> {
        if maps.len() < 2 {
            return Err(Error::TooFewMaps(maps.len()));
        }
        let dim = maps[0].dim();
        for (index, f) in maps.iter().enumerate() {
            if f.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: f.dim(),
                });
            }
            let ratio = f.ratio();
            if !(ratio > 0.0 && ratio < 1.0) {
                return Err(Error::NonContractive { index, ratio });
            }
        }
        if costs.len() != maps.len() {
            return Err(Error::CostCount {
                expected: maps.len(),
                found: costs.len(),
            });
        }
        Ok(Self {
            name: name.into(),
            maps,
            costs: CostFunction::new(costs)?,
        })
    }

    /// Same maps, different costs.
    pub fn reweighted(&self, costs: Vec<f64>) -> Result<Self> {
        Self::with_costs(self.name.clone(), self.maps.clone(), costs)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.maps[0].dim()
    }

    pub fn len(&self) -> usize {
        self.maps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.maps.is_empty()
    }

    pub fn maps(&self) -> &[Similitude] {
        &self.maps
    }

    pub fn map(&self, digit: u8) -> &Similitude {
        &self.maps[digit as usize - 1]
    }

    pub fn cost_function(&self) -> &CostFunction {
        &self.costs
    }

    pub fn ratios(&self) -> Vec<f64> {
        self.maps.iter().map(Similitude::ratio).collect()
    }

    /// `s = max λ_i`.
    pub fn base_scale(&self) -> f64 {
        self.maps.iter().map(Similitude::ratio).fold(0.0, f64::max)
    }

    /// Exponents `a_i` with `λ_i = s^{a_i}`.
    pub fn exponents(&self) -> Vec<f64> {
        scale_exponents(&self.maps).expect("validated on construction")
    }

    /// The exponents rounded to integers, when all of them are integers
    /// within [`INTEGER_EXPONENT_TOLERANCE`].
    pub fn integer_exponents(&self) -> Result<Vec<u32>> {
        let exps = self.exponents();
        if exps.iter().all(|a| (a - a.round()).abs() <= INTEGER_EXPONENT_TOLERANCE) {
            Ok(exps.iter().map(|a| a.round() as u32).collect())
        } else {
            Err(Error::NonIntegerExponents(exps))
        }
    }

    /// True when every cost equals the corresponding scale exponent.
    pub fn costs_are_exponents(&self) -> bool {
        self.exponents()
            .iter()
            .zip(self.costs.costs())
            .all(|(a, c)| (a - c).abs() <= INTEGER_EXPONENT_TOLERANCE)
    }

    /// `f_w = f_{w₁} ∘ f_{w₂} ∘ … ∘ f_{w_k}`; the identity for the empty word.
    pub fn word_map(&self, w: &Word) -> Result<Similitude> {
        w.validate(self.len())?;
        let mut acc = Similitude::identity(self.dim());
        for &d in w.digits() {
            acc = acc.compose(self.map(d))?;
        }
        Ok(acc)
    }

    /// `f_{−w} = f_{w₁}⁻¹ ∘ f_{w₂}⁻¹ ∘ … ∘ f_{w_k}⁻¹`.
    ///
    /// This is the composition exactly as written, which is the inverse of
    /// `f_{w_k} ∘ … ∘ f_{w₁}` and not of `f_w`. It is the order for which
    /// `f_{−(i|k+1)} ∘ f_{i_{k+1}} = f_{−(i|k)}`, the identity that makes the
    /// tilings `Π_T(i|k)` nested in `k`. For constant words both readings agree.
    pub fn word_map_inverse(&self, w: &Word) -> Result<Similitude> {
        w.validate(self.len())?;
        let mut acc = Similitude::identity(self.dim());
        for &d in w.digits() {
            acc = acc.compose(&self.map(d).invert())?;
        }
        Ok(acc)
    }

    /// Conjugated system `{S f_i S⁻¹}` with the same costs.
    pub fn conjugate(&self, s: &Similitude) -> Result<Self> {
        let maps = self.maps.iter().map(|f| f.conjugate_by(s)).collect::<Result<Vec<_>>>()?;
        Self::with_costs(self.name.clone(), maps, self.costs.costs().to_vec())
    }
}

fn scale_exponents(maps: &[Similitude]) -> Result<Vec<f64>> {
    if maps.is_empty() {
        return Err(Error::TooFewMaps(0));
    }
    for (index, f) in maps.iter().enumerate() {
        let ratio = f.ratio();
        if !(ratio > 0.0 && ratio < 1.0) {
            return Err(Error::NonContractive { index, ratio });
        }
    }
    let s = maps.iter().map(Similitude::ratio).fold(0.0, f64::max);
    Ok(maps.iter().map(|f| f.ratio().ln() / s.ln()).collect())
}
