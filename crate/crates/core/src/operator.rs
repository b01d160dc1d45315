//! The model parameter, truncated sections of `A₊`, and the coefficient data
//! of the Heun and Sturm–Liouville forms.
//!
//! Rows are indexed `1..=N` as in `l²(Z₊)`. Storage is 0-based: `diag[i]` is
//! row `i + 1`, `sub[i]` sits at (row `i + 2`, column `i + 1`) and `sup[i]` at
//! (row `i + 1`, column `i + 2`).

use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{NumericalError, ParamError};

/// Tolerance for the `1/ε ∉ Z` hypothesis.
pub const RESONANCE_TOL: f64 = 1e-9;

/// Validated parameter `0 < ε < 2`.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub struct Epsilon(f64);

impl Epsilon {
    pub fn new(epsilon: f64) -> Result<Self, ParamError> {
        if epsilon.is_finite() && epsilon > 0.0 && epsilon < 2.0 {
            Ok(Epsilon(epsilon))
        } else {
            Err(ParamError::EpsilonOutOfRange(epsilon))
        }
    }

    /// Validation for theorem-level routines: additionally rejects `1/ε`
    /// within [`RESONANCE_TOL`] of an integer.
    pub fn theorem(epsilon: f64) -> Result<Self, ParamError> {
        let e = Self::new(epsilon)?;
        match e.resonance() {
            Some(integer) => Err(ParamError::ResonantEpsilon { epsilon, integer }),
            None => Ok(e),
        }
    }

    #[inline]
    pub fn value(self) -> f64 {
        self.0
    }

    /// The integer `1/ε` is close to, if any.
    pub fn resonance(self) -> Option<i64> {
        let inv = 1.0 / self.0;
        let nearest = libm::round(inv);
        ((inv - nearest).abs() <= RESONANCE_TOL).then_some(nearest as i64)
    }

    /// Davies exponent `c = 1 + 1/ε`.
    #[inline]
    pub fn davies_exponent(self) -> f64 {
        1.0 + 1.0 / self.0
    }
}

/// Coefficient `(ε/2)·n·(n−1)` coupling row `n` to `v_{n−1}`.
#[inline]
pub fn entry_sub(epsilon: f64, n: usize) -> f64 {
    debug_assert!(n >= 1);
    0.5 * epsilon * (n * (n - 1)) as f64
}

/// Coefficient `−(ε/2)·n·(n+1)` coupling row `n` to `v_{n+1}`.
#[inline]
pub fn entry_sup(epsilon: f64, n: usize) -> f64 {
    debug_assert!(n >= 1);
    -0.5 * epsilon * (n * (n + 1)) as f64
}

/// Which block of `A` a section represents.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum OperatorKind {
    /// Section of `A₊`.
    Plus,
    /// Section of `A₋`, re-indexed by `n ↦ −n`.
    Minus,
    /// Arbitrary tridiagonal data.
    Custom,
}

/// Banded `N×N` tridiagonal matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct TridiagonalOperator {
    epsilon: f64,
    kind: OperatorKind,
    sub: Vec<f64>,
    diag: Vec<f64>,
    sup: Vec<f64>,
}

impl TridiagonalOperator {
    /// Arbitrary tridiagonal matrix; `sub` and `sup` must have length `N − 1`.
    pub fn from_parts(
        epsilon: f64,
        sub: Vec<f64>,
        diag: Vec<f64>,
        sup: Vec<f64>,
    ) -> Result<Self, ParamError> {
        let n = diag.len();
        if n == 0 {
            return Err(ParamError::EmptySection);
        }
        if sub.len() != n - 1 || sup.len() != n - 1 {
            return Err(ParamError::Invalid(alloc::format!(
                "off-diagonals must have length {} (got {} and {})",
                n - 1,
                sub.len(),
                sup.len()
            )));
        }
        if sub.iter().chain(&diag).chain(&sup).any(|x| !x.is_finite()) {
            return Err(ParamError::Invalid("non-finite matrix entry".into()));
        }
        Ok(TridiagonalOperator { epsilon, kind: OperatorKind::Custom, sub, diag, sup })
    }

    #[inline]
    pub fn size(&self) -> usize {
        self.diag.len()
    }

    #[inline]
    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    #[inline]
    pub fn kind(&self) -> OperatorKind {
        self.kind
    }

    #[inline]
    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    #[inline]
    pub fn sub(&self) -> &[f64] {
        &self.sub
    }

    #[inline]
    pub fn sup(&self) -> &[f64] {
        &self.sup
    }

    /// Entry at 1-based `(row, col)`; zero outside the band.
    pub fn get(&self, row: usize, col: usize) -> f64 {
        let n = self.size();
        assert!((1..=n).contains(&row) && (1..=n).contains(&col), "index out of range");
        if row == col {
            self.diag[row - 1]
        } else if row == col + 1 {
            self.sub[col - 1]
        } else if col == row + 1 {
            self.sup[row - 1]
        } else {
            0.0
        }
    }

    /// Row-sum (infinity) norm.
    pub fn norm_inf(&self) -> f64 {
        let n = self.size();
        (0..n)
            .map(|i| {
                let mut s = self.diag[i].abs();
                if i > 0 {
                    s += self.sub[i - 1].abs();
                }
                if i + 1 < n {
                    s += self.sup[i].abs();
                }
                s
            })
            .fold(0.0, f64::max)
    }

    /// `T·v` for a complex vector.
    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        let n = self.size();
        assert_eq!(v.len(), n);
        (0..n)
            .map(|i| {
                let mut y = v[i] * self.diag[i];
                if i > 0 {
                    y += v[i - 1] * self.sub[i - 1];
                }
                if i + 1 < n {
                    y += v[i + 1] * self.sup[i];
                }
                y
            })
            .collect()
    }

    /// Dense row-major copy, for small checks.
    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let n = self.size();
        (1..=n).map(|r| (1..=n).map(|c| self.get(r, c)).collect()).collect()
    }

    pub(crate) fn with_kind(mut self, kind: OperatorKind) -> Self {
        self.kind = kind;
        self
    }
}

/// Leading `N×N` section of `A₊`.
pub fn build_truncated(epsilon: f64, n: usize) -> Result<TridiagonalOperator, ParamError> {
    let e = Epsilon::new(epsilon)?.value();
    if n == 0 {
        return Err(ParamError::EmptySection);
    }
    let diag = (1..=n).map(|k| k as f64).collect();
    let sub = (2..=n).map(|k| entry_sub(e, k)).collect();
    let sup = (1..n).map(|k| entry_sup(e, k)).collect();
    Ok(TridiagonalOperator { epsilon: e, kind: OperatorKind::Plus, sub, diag, sup })
}

/// Section of `A₋` on rows `−1..−N`, re-indexed by `m = −n`.
///
/// The entries come from the row formula of `A` at negative `n`:
/// row `n` couples `v_{n−1}` with `(ε/2)n(n−1)` and `v_{n+1}` with
/// `−(ε/2)n(n+1)`. Under `m = −n`, `v_{n−1}` becomes index `m + 1`.
pub fn reflect_minus(t: &TridiagonalOperator) -> TridiagonalOperator {
    let e = t.epsilon;
    let n = t.size();
    let row = |m: usize| -(m as f64);
    let diag = (1..=n).map(row).collect();
    // Row m, column m + 1: coefficient of v_{n−1} at n = −m.
    let sup = (1..n)
        .map(|m| {
            let k = row(m);
            0.5 * e * (k * (k - 1.0))
        })
        .collect();
    // Row m, column m − 1: coefficient of v_{n+1} at n = −m.
    let sub = (2..=n)
        .map(|m| {
            let k = row(m);
            -0.5 * e * (k * (k + 1.0))
        })
        .collect();
    TridiagonalOperator { epsilon: e, kind: OperatorKind::Minus, sub, diag, sup }
}

/// The seven constants of the Heun form of the generating-function ODE.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HeunParams {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub delta: f64,
    pub eps_h: f64,
    pub a: f64,
    pub mu: Complex64,
    pub epsilon: f64,
    pub lambda: Complex64,
}

impl HeunParams {
    /// `γ + δ + ε_H − (α + β + 1)`.
    pub fn fuchs_defect(&self) -> f64 {
        self.gamma + self.delta + self.eps_h - (self.alpha + self.beta + 1.0)
    }
}

pub fn heun_parameters(epsilon: f64, lambda: Complex64) -> Result<HeunParams, ParamError> {
    let e = Epsilon::new(epsilon)?.value();
    let inv = 1.0 / e;
    Ok(HeunParams {
        alpha: 1.0,
        beta: 0.0,
        gamma: 0.0,
        delta: 1.0 + inv,
        eps_h: 1.0 - inv,
        a: -1.0,
        mu: lambda * (2.0 / e),
        epsilon: e,
        lambda,
    })
}

/// Coefficients of `−(p u′)′ + q u = μ w u` on `(0, 1)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SlCoefficients {
    epsilon: f64,
}

#[inline]
fn pow_pos(base: f64, s: f64) -> f64 {
    // Real branch on the cut plane; base = 0 gives 0 for s > 0.
    libm::exp(s * libm::log(base))
}

impl SlCoefficients {
    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    /// `p(z) = (1−z)^{1+1/ε} (1+z)^{1−1/ε}`.
    pub fn p(&self, z: f64) -> f64 {
        let inv = 1.0 / self.epsilon;
        pow_pos(1.0 - z, 1.0 + inv) * pow_pos(1.0 + z, 1.0 - inv)
    }

    pub fn q(&self, _z: f64) -> f64 {
        0.0
    }

    /// `w(z) = z^{−1} (1−z)^{1/ε} (1+z)^{−1/ε}`; pole at `z = 0`.
    pub fn w(&self, z: f64) -> Result<f64, NumericalError> {
        if z == 0.0 {
            return Err(NumericalError::WeightPole);
        }
        Ok(self.zw(z) / z)
    }

    /// `z·w(z)`, continuous on `[0, 1]` with value 1 at 0.
    pub fn zw(&self, z: f64) -> f64 {
        let inv = 1.0 / self.epsilon;
        pow_pos(1.0 - z, inv) * pow_pos(1.0 + z, -inv)
    }
}

pub fn sl_coefficients(epsilon: f64) -> Result<SlCoefficients, ParamError> {
    Ok(SlCoefficients { epsilon: Epsilon::new(epsilon)?.value() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn entries_by_hand() {
        assert_eq!(entry_sub(1.0, 1), 0.0);
        assert_eq!(entry_sub(0.5, 3), 1.5);
        assert_eq!(entry_sub(2.0, 2), 2.0);
        assert_eq!(entry_sup(1.0, 1), -1.0);
        assert_eq!(entry_sup(0.5, 2), -1.5);
        assert_eq!(entry_sup(0.0, 5), 0.0);
    }

    #[test]
    fn small_sections() {
        let t = build_truncated(0.3, 2).unwrap();
        let d = t.to_dense();
        assert_eq!(d[0][0], 1.0);
        assert!((d[0][1] + 0.3).abs() < 1e-15);
        assert!((d[1][0] - 0.3).abs() < 1e-15);
        assert_eq!(d[1][1], 2.0);

        let one = build_truncated(0.9, 1).unwrap();
        assert_eq!(one.to_dense(), vec![vec![1.0]]);

        let t3 = build_truncated(0.5, 3).unwrap();
        assert_eq!((t3.get(2, 1), t3.get(2, 2), t3.get(2, 3)), (0.5, 2.0, -1.5));
    }

    #[test]
    fn rejects_bad_input() {
        assert!(build_truncated(0.5, 0).is_err());
        assert!(build_truncated(2.0, 3).is_err());
        assert!(build_truncated(0.0, 3).is_err());
        assert!(build_truncated(f64::NAN, 3).is_err());
        assert!(matches!(
            Epsilon::theorem(0.5),
            Err(ParamError::ResonantEpsilon { integer: 2, .. })
        ));
        assert!(Epsilon::theorem(0.7).is_ok());
        assert!(Epsilon::theorem(1.0 / 3.0).is_err());
    }

    #[test]
    fn reflection_entries() {
        let t = build_truncated(0.3, 1).unwrap();
        assert_eq!(reflect_minus(&t).to_dense(), vec![vec![-1.0]]);
        let t = build_truncated(0.3, 2).unwrap();
        assert_eq!(reflect_minus(&t).diag(), &[-1.0, -2.0]);
    }

    #[test]
    fn reflection_is_negation_of_plus_section() {
        let t = build_truncated(0.7, 9).unwrap();
        let m = reflect_minus(&t);
        for r in 1..=9 {
            for c in 1..=9 {
                assert_eq!(m.get(r, c), -t.get(r, c));
            }
        }
    }

    #[test]
    fn heun_examples() {
        let h = heun_parameters(0.5, Complex64::new(1.0, 0.0)).unwrap();
        assert_eq!((h.delta, h.eps_h, h.mu.re), (3.0, -1.0, 4.0));
        let h = heun_parameters(1.0, Complex64::new(0.0, 0.0)).unwrap();
        assert_eq!((h.delta, h.eps_h, h.mu), (2.0, 0.0, Complex64::new(0.0, 0.0)));
        let h = heun_parameters(0.4, Complex64::new(2.0, 0.0)).unwrap();
        assert!((h.mu.re - 10.0).abs() < 1e-14);
        assert_eq!((h.alpha, h.beta, h.gamma, h.a), (1.0, 0.0, 0.0, -1.0));
    }

    #[test]
    fn sl_examples() {
        let c = sl_coefficients(1.0).unwrap();
        assert!((c.p(0.5) - 0.25).abs() < 1e-15);
        assert!((c.w(0.5).unwrap() - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(c.p(0.0), 1.0);
        assert_eq!(c.p(1.0), 0.0);
        assert_eq!(c.zw(1.0), 0.0);
        assert_eq!(c.zw(0.0), 1.0);
        assert_eq!(c.w(0.0), Err(NumericalError::WeightPole));
        let c = sl_coefficients(0.3).unwrap();
        assert!(c.p(1.0 - 1e-9) < 1e-20);
        assert!(c.w(1.0 - 1e-9).unwrap() < 1e-20);
    }

    proptest! {
        #[test]
        fn diagonal_is_row_index(eps in 0.01f64..1.99, n in 1usize..300) {
            let t = build_truncated(eps, n).unwrap();
            for (i, d) in t.diag().iter().enumerate() {
                prop_assert_eq!(*d, (i + 1) as f64);
            }
        }

        #[test]
        fn off_diagonal_pairs_have_equal_magnitude(eps in 0.01f64..1.99, n in 2usize..200) {
            let t = build_truncated(eps, n).unwrap();
            for k in 1..n {
                prop_assert_eq!(t.get(k + 1, k), -t.get(k, k + 1));
            }
        }

        #[test]
        fn fuchs_relation(eps in 0.01f64..1.99, re in -50.0f64..50.0, im in -5.0f64..5.0) {
            let h = heun_parameters(eps, Complex64::new(re, im)).unwrap();
            prop_assert!(h.fuchs_defect().abs() <= 4.0 * f64::EPSILON * h.delta.abs().max(1.0));
        }

        #[test]
        fn sl_weights_positive(eps in 0.05f64..1.99, z in 1e-9f64..0.999_999) {
            let c = sl_coefficients(eps).unwrap();
            prop_assert!(c.p(z) > 0.0);
            prop_assert!(c.w(z).unwrap() > 0.0);
        }

        #[test]
        fn zw_tends_to_one_at_origin(eps in 0.05f64..1.99, z in 1e-14f64..1e-10) {
            let c = sl_coefficients(eps).unwrap();
            prop_assert!((c.zw(z) - 1.0).abs() < 1e-8);
        }
    }
}
