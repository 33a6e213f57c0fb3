use std::fmt;

use crate::error::{Error, Result};

/// Relative tolerance used when checking `MᵀM = λ²I`.
pub const SIMILARITY_TOLERANCE: f64 = 1e-9;

/// An affine map `x ↦ M·x + t` whose linear part is a scaled orthogonal
/// matrix, `MᵀM = λ²I` with `λ > 0`.
///
/// The linear part is kept as a general row-major matrix, so reflections and
/// rotations need no special casing. The ratio `λ` is cached.
#[derive(Clone, Debug, PartialEq)]
pub struct Similitude {
    dim: usize,
    linear: Vec<f64>,
    translation: Vec<f64>,
    ratio: f64,
}

impl Similitude {
    /// Builds and validates a similitude from a row-major `dim × dim` matrix
    /// and a translation vector.
    pub fn new(linear: Vec<f64>, translation: Vec<f64>) -> Result<Self> {
        let dim = translation.len();
        if dim == 0 {
            return Err(Error::Empty("translation"));
        }
        if linear.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                found: linear.len(),
            });
        }
        if linear.iter().chain(&translation).any(|v| !v.is_finite()) {
            return Err(Error::NotSimilitude("non-finite entry".into()));
        }
        let ratio = similarity_ratio(dim, &linear)?;
        Ok(Self {
            dim,
            linear,
            translation,
            ratio,
        })
    }

    /// Builds a planar map from the `[a b e; c d g]` layout, i.e.
    /// `(x, y) ↦ (a·x + b·y + e, c·x + d·y + g)`.
    pub fn planar(a: f64, b: f64, e: f64, c: f64, d: f64, g: f64) -> Result<Self> {
        Self::new(vec![a, b, c, d], vec![e, g])
    }

    /// `x ↦ a·x + b` on the line.
    pub fn linear_1d(a: f64, b: f64) -> Result<Self> {
        Self::new(vec![a], vec![b])
    }

    pub fn identity(dim: usize) -> Self {
        Self::scaling(dim, 1.0)
    }

    /// Uniform scaling about the origin. `factor` must be positive.
    pub fn scaling(dim: usize, factor: f64) -> Self {
        assert!(factor > 0.0 && factor.is_finite(), "scale factor must be positive");
        let mut linear = vec![0.0; dim * dim];
        for i in 0..dim {
            linear[i * dim + i] = factor;
        }
        Self {
            dim,
            linear,
            translation: vec![0.0; dim],
            ratio: factor,
        }
    }

    pub fn translation_by(offset: &[f64]) -> Self {
        let mut s = Self::identity(offset.len());
        s.translation.copy_from_slice(offset);
        s
    }

    /// Planar rotation by `angle` radians scaled by `factor`, about the origin.
    pub fn rotation_2d(angle: f64, factor: f64) -> Self {
        let (sin, cos) = angle.sin_cos();
        Self {
            dim: 2,
            linear: vec![factor * cos, -factor * sin, factor * sin, factor * cos],
            translation: vec![0.0, 0.0],
            ratio: factor,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Row-major linear part.
    pub fn linear(&self) -> &[f64] {
        &self.linear
    }

    pub fn translation(&self) -> &[f64] {
        &self.translation
    }

    /// The contraction (or expansion) ratio `λ`.
    pub fn ratio(&self) -> f64 {
        self.ratio
    }

    pub fn is_isometry(&self) -> bool {
        (self.ratio - 1.0).abs() <= SIMILARITY_TOLERANCE
    }

    /// Sign of the determinant; negative for maps that include a reflection.
    pub fn orientation(&self) -> f64 {
        determinant(self.dim, &self.linear).signum()
    }

    /// The matrix entries followed by the translation entries.
    pub fn entries(&self) -> impl Iterator<Item = f64> + '_ {
        self.linear.iter().chain(self.translation.iter()).copied()
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.dim];
        self.apply_into(x, &mut out);
        out
    }

    /// Writes `self(x)` into `out`. Both slices must have length `dim`.
    #[inline]
    pub fn apply_into(&self, x: &[f64], out: &mut [f64]) {
        let n = self.dim;
        debug_assert_eq!(x.len(), n);
        for (i, o) in out.iter_mut().enumerate() {
            let row = &self.linear[i * n..(i + 1) * n];
            *o = row.iter().zip(x).map(|(a, b)| a * b).sum::<f64>() + self.translation[i];
        }
    }

    #[inline]
    pub fn apply2(&self, p: [f64; 2]) -> [f64; 2] {
        debug_assert_eq!(self.dim, 2);
        let m = &self.linear;
        [
            m[0] * p[0] + m[1] * p[1] + self.translation[0],
            m[2] * p[0] + m[3] * p[1] + self.translation[1],
        ]
    }

    /// `self ∘ other`, the map `x ↦ self(other(x))`.
    pub fn compose(&self, other: &Similitude) -> Result<Similitude> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: other.dim,
            });
        }
        let n = self.dim;
        let mut linear = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                linear[i * n + j] = (0..n).map(|k| self.linear[i * n + k] * other.linear[k * n + j]).sum();
            }
        }
        let mut translation = vec![0.0; n];
        self.apply_into(&other.translation, &mut translation);
        Ok(Similitude {
            dim: n,
            linear,
            translation,
            ratio: self.ratio * other.ratio,
        })
    }

    /// Inverse map. For a similitude `M⁻¹ = Mᵀ / λ²`.
    pub fn invert(&self) -> Similitude {
        let n = self.dim;
        let inv_sq = 1.0 / (self.ratio * self.ratio);
        let mut linear = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                linear[i * n + j] = self.linear[j * n + i] * inv_sq;
            }
        }
        let mut translation = vec![0.0; n];
        for (i, t) in translation.iter_mut().enumerate() {
            *t = -(0..n).map(|k| linear[i * n + k] * self.translation[k]).sum::<f64>();
        }
        Similitude {
            dim: n,
            linear,
            translation,
            ratio: 1.0 / self.ratio,
        }
    }

    /// Entrywise comparison with an absolute tolerance.
    pub fn approx_eq(&self, other: &Similitude, tol: f64) -> bool {
        self.dim == other.dim && self.entries().zip(other.entries()).all(|(a, b)| (a - b).abs() <= tol)
    }

    /// Largest absolute entry, used to scale comparison tolerances.
    pub fn magnitude(&self) -> f64 {
        self.entries().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Re-checks `MᵀM = λ²I` against the cached ratio.
    pub fn check_similarity(&self, rel_tol: f64) -> bool {
        let n = self.dim;
        let lam2 = self.ratio * self.ratio;
        for i in 0..n {
            for j in 0..n {
                let g: f64 = (0..n).map(|k| self.linear[k * n + i] * self.linear[k * n + j]).sum();
                let want = if i == j { lam2 } else { 0.0 };
                if (g - want).abs() > rel_tol * lam2 {
                    return false;
                }
            }
        }
        true
    }

    /// The unique fixed point of a contraction, `(I − M)x = t`.
    pub fn fixed_point(&self) -> Option<Vec<f64>> {
        let n = self.dim;
        let mut a = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                a[i * n + j] = if i == j { 1.0 } else { 0.0 } - self.linear[i * n + j];
            }
        }
        solve_linear(n, a, self.translation.clone())
    }

    /// Conjugate `s ∘ self ∘ s⁻¹`.
    pub fn conjugate_by(&self, s: &Similitude) -> Result<Similitude> {
        s.compose(self)?.compose(&s.invert())
    }
}

impl fmt::Display for Similitude {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.dim;
        write!(f, "[")?;
        for i in 0..n {
            if i > 0 {
                write!(f, "; ")?;
            }
            for j in 0..n {
                write!(f, "{} ", self.linear[i * n + j])?;
            }
            write!(f, "{}", self.translation[i])?;
        }
        write!(f, "]")
    }
}

fn similarity_ratio(n: usize, m: &[f64]) -> Result<f64> {
    // Gram matrix MᵀM must be λ²I.
    let mut gram = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            gram[i * n + j] = (0..n).map(|k| m[k * n + i] * m[k * n + j]).sum();
        }
    }
    let lam2 = (0..n).map(|i| gram[i * n + i]).sum::<f64>() / n as f64;
    if lam2.is_nan() || lam2 <= 0.0 {
        return Err(Error::NotSimilitude("singular linear part".into()));
    }
    for i in 0..n {
        for j in 0..n {
            let want = if i == j { lam2 } else { 0.0 };
            let dev = (gram[i * n + j] - want).abs();
            if dev > SIMILARITY_TOLERANCE * lam2 {
                return Err(Error::NotSimilitude(format!(
                    "MᵀM deviates from λ²I by {:.3e} (relative) at ({i}, {j})",
                    dev / lam2
                )));
            }
        }
    }
    Ok(lam2.sqrt())
}

fn determinant(n: usize, m: &[f64]) -> f64 {
    match n {
        1 => m[0],
        2 => m[0] * m[3] - m[1] * m[2],
        _ => {
            let mut a = m.to_vec();
            let mut det = 1.0;
            for col in 0..n {
                let pivot = (col..n)
                    .max_by(|&x, &y| a[x * n + col].abs().total_cmp(&a[y * n + col].abs()))
                    .unwrap();
                if a[pivot * n + col] == 0.0 {
                    return 0.0;
                }
                if pivot != col {
                    for k in 0..n {
                        a.swap(pivot * n + k, col * n + k);
                    }
                    det = -det;
                }
                det *= a[col * n + col];
                for r in col + 1..n {
                    let factor = a[r * n + col] / a[col * n + col];
                    for k in col..n {
                        a[r * n + k] -= factor * a[col * n + k];
                    }
                }
            }
            det
        }
    }
}

/// Gaussian elimination with partial pivoting.
pub(crate) fn solve_linear(n: usize, mut a: Vec<f64>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    for col in 0..n {
        let pivot = (col..n).max_by(|&x, &y| a[x * n + col].abs().total_cmp(&a[y * n + col].abs()))?;
        if a[pivot * n + col].abs() < 1e-300 {
            return None;
        }
        if pivot != col {
            for k in 0..n {
                a.swap(pivot * n + k, col * n + k);
            }
            b.swap(pivot, col);
        }
        for r in 0..n {
            if r != col {
                let factor = a[r * n + col] / a[col * n + col];
                if factor != 0.0 {
                    for k in col..n {
                        a[r * n + k] -= factor * a[col * n + k];
                    }
                    b[r] -= factor * b[col];
                }
            }
        }
    }
    Some((0..n).map(|i| b[i] / a[i * n + i]).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() < 1e-12
    }

    #[test]
    fn rejects_shear() {
        assert!(matches!(
            Similitude::planar(1.0, 0.5, 0.0, 0.0, 1.0, 0.0),
            Err(Error::NotSimilitude(_))
        ));
        assert!(Similitude::new(vec![1.0, 0.0], vec![0.0, 0.0]).is_err());
    }

    #[test]
    fn reflection_is_accepted() {
        let f = Similitude::planar(-0.25, 0.0, 1.0, 0.0, 0.25, 0.0).unwrap();
        assert!(close(f.ratio(), 0.25));
        assert_eq!(f.orientation(), -1.0);
    }

    #[test]
    fn quarter_turns_compose_to_half_turn() {
        let f = Similitude::rotation_2d(FRAC_PI_2, 0.5);
        let g = f.compose(&f).unwrap();
        let want = Similitude::planar(-0.25, 0.0, 0.0, 0.0, -0.25, 0.0).unwrap();
        assert!(g.approx_eq(&want, 1e-15));
        assert!(close(g.ratio(), 0.25));
    }

    #[test]
    fn identity_is_neutral() {
        let f = Similitude::planar(0.3, -0.4, 1.0, 0.4, 0.3, 2.0).unwrap();
        let id = Similitude::identity(2);
        assert_eq!(f.compose(&id).unwrap(), f);
        assert_eq!(id.compose(&f).unwrap(), f);
    }

    #[test]
    fn dyadic_composition_and_inverse() {
        let f1 = Similitude::linear_1d(0.5, 0.0).unwrap();
        let f2 = Similitude::linear_1d(0.5, 0.5).unwrap();
        // f1(f2(x)) = ((x + 1) / 2) / 2
        let h = f1.compose(&f2).unwrap();
        assert_eq!(h.linear(), &[0.25]);
        assert_eq!(h.translation(), &[0.25]);
        let inv2 = f2.invert();
        assert_eq!(inv2.linear(), &[2.0]);
        assert_eq!(inv2.translation(), &[-1.0]);
        assert_eq!(f1.invert().apply(&[3.0]), vec![6.0]);
        assert_eq!(Similitude::identity(1).invert(), Similitude::identity(1));
    }

    #[test]
    fn dimension_mismatch() {
        let a = Similitude::identity(1);
        let b = Similitude::identity(2);
        assert!(matches!(a.compose(&b), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn fixed_point_of_contraction() {
        let f = Similitude::planar(0.5, 0.0, 0.5, 0.0, 0.5, 0.0).unwrap();
        let p = f.fixed_point().unwrap();
        assert!(close(p[0], 1.0) && close(p[1], 0.0));
    }

    #[test]
    fn general_dimension_algebra() {
        // a 3-d rotation about z scaled by 0.5
        let f = Similitude::new(vec![0.0, -0.5, 0.0, 0.5, 0.0, 0.0, 0.0, 0.0, 0.5], vec![1.0, 2.0, 3.0]).unwrap();
        let id = f.invert().compose(&f).unwrap();
        assert!(id.approx_eq(&Similitude::identity(3), 1e-12));
        assert_eq!(f.orientation(), 1.0);
    }
}
