//! Galerkin discretization of `−(p u′)′ = μ w u` on `(0, 1)`.
//!
//! Trial functions are `φ_j(z) = z·P_j(2z−1)`, so every one vanishes at 0 and
//! the `z⁻¹` pole of `w` cancels against one factor of `z` before quadrature.
//! With `x = 2z − 1` and `α = 1/ε` the entries are
//!
//! ```text
//! M_ij = 2^{−α−2} ∫ (1−x)^α (1+x) · (1+z)^{−α} P_i P_j dx
//! S_ij = 2^{−α−2} ∫ (1−x)^{α+1}   · (1+z)^{1−α} φ′_i φ′_j dx,   φ′ = P + 2z·P′
//! ```
//!
//! and each uses the Gauss–Jacobi rule for its own endpoint factor, leaving
//! integrands analytic on `[−1, 1]`. The pencil is symmetric definite, so the
//! computed `μ` are real by construction; `λ = εμ/2`.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{NumericalError, ParamError, Result};
use crate::linalg::{cholesky, dot, generalized_symmetric_eigen, mat_vec, Matrix};
use crate::operator::Epsilon;
use crate::quadrature::JacobiWeight;

/// Polynomial family behind the trial functions.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Basis {
    /// Orthogonal for the mass weight `(1−x)^{1/ε}(1+x)`; keeps the mass
    /// matrix close to diagonal.
    #[default]
    Jacobi,
    Legendre,
}

impl Basis {
    pub fn name(self) -> &'static str {
        match self {
            Basis::Jacobi => "jacobi",
            Basis::Legendre => "legendre",
        }
    }

    fn weight(self, epsilon: f64) -> JacobiWeight {
        match self {
            Basis::Jacobi => JacobiWeight::new(1.0 / epsilon, 1.0),
            Basis::Legendre => JacobiWeight::new(0.0, 0.0),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SlOptions {
    pub basis: Basis,
    /// Gauss nodes beyond the dimension; the check reruns with twice as many.
    pub extra_nodes: usize,
    pub quadrature_tol: f64,
}

impl Default for SlOptions {
    fn default() -> Self {
        SlOptions { basis: Basis::Jacobi, extra_nodes: 40, quadrature_tol: 1e-12 }
    }
}

/// How the matrices were integrated.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadratureInfo {
    pub nodes: usize,
    /// Largest entry change between `nodes/2` and `nodes` points, relative to
    /// `sqrt(|a_ii·a_jj|)`.
    pub change: f64,
}

#[derive(Clone, Debug)]
pub struct SturmLiouvilleSystem {
    pub epsilon: f64,
    pub dimension: usize,
    pub stiffness: Matrix,
    pub mass: Matrix,
    pub basis: Basis,
    pub quadrature: QuadratureInfo,
}

pub fn lambda_from_mu(epsilon: f64, mu: f64) -> f64 {
    epsilon * mu / 2.0
}

pub fn assemble(epsilon: f64, k: usize) -> Result<SturmLiouvilleSystem> {
    assemble_with(epsilon, k, &SlOptions::default())
}

pub fn assemble_with(epsilon: f64, k: usize, opts: &SlOptions) -> Result<SturmLiouvilleSystem> {
    let e = Epsilon::new(epsilon)?.value();
    if k == 0 {
        return Err(ParamError::EmptySection.into());
    }
    let q = k + opts.extra_nodes;
    let (s1, m1) = integrate(e, k, q, opts.basis)?;
    let (s2, m2) = integrate(e, k, 2 * q, opts.basis)?;
    let mut worst = (0.0, 0, 0);
    for (a, b) in [(&s1, &s2), (&m1, &m2)] {
        for i in 0..k {
            for j in 0..=i {
                let scale = libm::sqrt((b[i][i] * b[j][j]).abs()).max(f64::MIN_POSITIVE);
                let change = (a[i][j] - b[i][j]).abs() / scale;
                if !(change <= worst.0) {
                    worst = (change, i, j);
                }
            }
        }
    }
    if !(worst.0 <= opts.quadrature_tol) {
        return Err(NumericalError::Quadrature { row: worst.1, col: worst.2, change: worst.0 }.into());
    }
    Ok(SturmLiouvilleSystem {
        epsilon: e,
        dimension: k,
        stiffness: s2,
        mass: m2,
        basis: opts.basis,
        quadrature: QuadratureInfo { nodes: 2 * q, change: worst.0 },
    })
}

/// `P_0..P_{k−1}` at `x` and their `x`-derivatives, scaled so `P_0 = 1`.
fn basis_values(w: &JacobiWeight, x: f64, k: usize) -> (Vec<f64>, Vec<f64>) {
    let (mut p, mut dp) = w.orthonormal_with_derivative(x, k);
    let p0 = p[0];
    for v in p.iter_mut().chain(dp.iter_mut()) {
        *v /= p0;
    }
    (p, dp)
}

fn integrate(e: f64, k: usize, q: usize, basis: Basis) -> Result<(Matrix, Matrix)> {
    let alpha = 1.0 / e;
    let pre = libm::exp2(-alpha - 2.0);
    let bw = basis.weight(e);
    let mut mass = Accumulator::new(k);
    let mut stiff = Accumulator::new(k);

    let rule = JacobiWeight::new(alpha, 1.0).gauss(q)?;
    for (&x, &wt) in rule.nodes.iter().zip(&rule.weights) {
        let z = 0.5 * (1.0 + x);
        let f = pre * wt * libm::pow(1.0 + z, -alpha);
        let (p, _) = basis_values(&bw, x, k);
        mass.add(&p, f);
    }

    let rule = JacobiWeight::new(alpha + 1.0, 0.0).gauss(q)?;
    for (&x, &wt) in rule.nodes.iter().zip(&rule.weights) {
        let z = 0.5 * (1.0 + x);
        let f = pre * wt * libm::pow(1.0 + z, 1.0 - alpha);
        let (p, dp) = basis_values(&bw, x, k);
        let d: Vec<f64> = p.iter().zip(&dp).map(|(a, b)| a + 2.0 * z * b).collect();
        stiff.add(&d, f);
    }
    Ok((stiff.finish(), mass.finish()))
}

/// `Σ f·v·vᵀ` over the nodes, lower triangle with Neumaier compensation.
struct Accumulator {
    sum: Matrix,
    carry: Matrix,
}

impl Accumulator {
    fn new(k: usize) -> Self {
        Accumulator { sum: vec![vec![0.0; k]; k], carry: vec![vec![0.0; k]; k] }
    }

    fn add(&mut self, v: &[f64], f: f64) {
        for i in 0..v.len() {
            let fi = f * v[i];
            let (srow, crow) = (&mut self.sum[i], &mut self.carry[i]);
            for j in 0..=i {
                let x = fi * v[j];
                let t = srow[j] + x;
                crow[j] += if srow[j].abs() >= x.abs() { (srow[j] - t) + x } else { (x - t) + srow[j] };
                srow[j] = t;
            }
        }
    }

    fn finish(self) -> Matrix {
        let mut a = self.sum;
        let k = a.len();
        for i in 0..k {
            for j in 0..=i {
                a[i][j] += self.carry[i][j];
            }
        }
        for i in 0..k {
            for j in 0..i {
                a[j][i] = a[i][j];
            }
        }
        a
    }
}

#[derive(Clone, Debug)]
pub struct SlEigenpair {
    pub mu: f64,
    /// Coefficients in the trial basis, mass-normalized, with `u′(0) > 0`.
    pub coeffs: Vec<f64>,
}

/// The `count` smallest `μ`, ascending.
pub fn sl_spectrum(sys: &SturmLiouvilleSystem, count: usize) -> Result<Vec<f64>> {
    Ok(sl_eigenpairs(sys, count)?.into_iter().map(|p| p.mu).collect())
}

pub fn sl_eigenpairs(sys: &SturmLiouvilleSystem, count: usize) -> Result<Vec<SlEigenpair>> {
    if count > sys.dimension {
        return Err(ParamError::Invalid(alloc::format!(
            "count {count} exceeds the Galerkin dimension {}",
            sys.dimension
        ))
        .into());
    }
    let eig = generalized_symmetric_eigen(&sys.stiffness, &sys.mass)?;
    let w = sys.basis.weight(sys.epsilon);
    let (at_zero, _) = basis_values(&w, -1.0, sys.dimension);
    Ok(eig
        .values
        .into_iter()
        .zip(eig.vectors)
        .take(count)
        .map(|(mu, mut coeffs)| {
            if dot(&coeffs, &at_zero) < 0.0 {
                for c in coeffs.iter_mut() {
                    *c = -*c;
                }
            }
            SlEigenpair { mu, coeffs }
        })
        .collect())
}

/// `cᵀ·M·c`, the discrete `∫ w |u|²`.
pub fn weighted_norm_sq(coeffs: &[f64], sys: &SturmLiouvilleSystem) -> f64 {
    dot(coeffs, &mat_vec(&sys.mass, coeffs))
}

/// `u(z)` and `u′(z)` for trial coefficients `coeffs`.
pub fn eval_trial(sys: &SturmLiouvilleSystem, coeffs: &[f64], z: f64) -> (f64, f64) {
    let (p, dp) = basis_values(&sys.basis.weight(sys.epsilon), 2.0 * z - 1.0, coeffs.len());
    let mut u = 0.0;
    let mut du = 0.0;
    for (j, c) in coeffs.iter().enumerate() {
        u += c * z * p[j];
        du += c * (p[j] + 2.0 * z * dp[j]);
    }
    (u, du)
}

/// Confirms the mass matrix factors; the route's real spectrum rests on it.
pub fn mass_is_positive_definite(sys: &SturmLiouvilleSystem) -> bool {
    cholesky(&sys.mass).is_ok()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::sl_coefficients;
    use proptest::prelude::*;

    const LN2: f64 = core::f64::consts::LN_2;

    /// Eigenvalues at ε = 0.5 from the closed matrix section (N = 2000).
    const MATRIX_HALF: [f64; 10] = [
        1.1672345030601249,
        2.9684447822260976,
        5.4826776370039804,
        8.7135448540103077,
        12.661760180966936,
        17.327551658966668,
        22.711011383700199,
        28.812182509492993,
        35.631087488832671,
        43.167738954934987,
    ];

    #[test]
    fn one_dimensional_closed_form() {
        let sys = assemble(1.0, 1).unwrap();
        let mass = 1.5 - 2.0 * LN2;
        assert!((sys.stiffness[0][0] - 1.0 / 3.0).abs() < 1e-14);
        assert!((sys.mass[0][0] - mass).abs() < 1e-14);
        let mu = sl_spectrum(&sys, 1).unwrap()[0];
        assert!((mu - (1.0 / 3.0) / mass).abs() < 1e-12 * mu);
        assert!((weighted_norm_sq(&[1.0], &sys) - mass).abs() < 1e-14);
        assert_eq!(weighted_norm_sq(&[0.0], &sys), 0.0);
    }

    #[test]
    fn legendre_basis_spans_the_same_space() {
        let a = assemble(0.7, 12).unwrap();
        let b = assemble_with(0.7, 12, &SlOptions { basis: Basis::Legendre, ..SlOptions::default() })
            .unwrap();
        let ma = sl_spectrum(&a, 4).unwrap();
        let mb = sl_spectrum(&b, 4).unwrap();
        for (x, y) in ma.iter().zip(&mb) {
            assert!((x - y).abs() < 1e-9 * x, "{x} {y}");
        }
    }

    #[test]
    fn entries_match_direct_integration() {
        // Oracle: composite midpoint sums of p·φ′φ′ and w·φφ in z.
        let e = 0.7;
        let sys = assemble(e, 4).unwrap();
        let c = sl_coefficients(e).unwrap();
        let n = 200_000;
        let h = 1.0 / n as f64;
        let phi = |j: usize, z: f64| {
            let (u, du) = eval_trial(&sys, &unit(4, j), z);
            (u, du)
        };
        for (i, j) in [(0, 0), (1, 0), (3, 2)] {
            let (mut s, mut m) = (0.0, 0.0);
            for t in 0..n {
                let z = (t as f64 + 0.5) * h;
                let (ui, dui) = phi(i, z);
                let (uj, duj) = phi(j, z);
                s += c.p(z) * dui * duj * h;
                m += c.w(z).unwrap() * ui * uj * h;
            }
            assert!((s - sys.stiffness[i][j]).abs() < 1e-7, "S {i}{j}");
            assert!((m - sys.mass[i][j]).abs() < 1e-7, "M {i}{j}");
        }
    }

    fn unit(k: usize, j: usize) -> Vec<f64> {
        let mut v = vec![0.0; k];
        v[j] = 1.0;
        v
    }

    #[test]
    fn lambda_from_mu_examples() {
        assert_eq!(lambda_from_mu(0.5, 4.0), 1.0);
        assert_eq!(lambda_from_mu(0.9, 0.0), 0.0);
        assert_eq!(lambda_from_mu(2.0, 3.0), 3.0);
    }

    #[test]
    fn matrices_are_symmetric() {
        let sys = assemble(0.7, 30).unwrap();
        for i in 0..30 {
            for j in 0..30 {
                let scale = sys.stiffness[i][j].abs().max(1e-300);
                assert!((sys.stiffness[i][j] - sys.stiffness[j][i]).abs() <= 1e-14 * scale);
                assert!((sys.mass[i][j] - sys.mass[j][i]).abs() <= 1e-14 * sys.mass[i][j].abs());
            }
        }
    }

    #[test]
    fn mass_factors_up_to_two_hundred() {
        for &e in &[0.3, 0.7, 1.3] {
            let sys = assemble(e, 200).unwrap();
            assert!(mass_is_positive_definite(&sys), "eps {e}");
            assert!(sys.quadrature.change <= 1e-12);
        }
    }

    #[test]
    fn matches_matrix_eigenvalues() {
        let sys = assemble(0.5, 200).unwrap();
        let mu = sl_spectrum(&sys, 10).unwrap();
        for w in mu.windows(2) {
            assert!(w[0] < w[1]);
        }
        for (m, want) in mu.iter().zip(MATRIX_HALF) {
            let lam = lambda_from_mu(0.5, *m);
            assert!((lam - want).abs() <= 1e-6 * want, "{lam} vs {want}");
        }
    }

    #[test]
    fn first_eigenvalue_decreases_with_dimension() {
        let mut prev = f64::INFINITY;
        for k in [10, 20, 40, 80] {
            let mu = sl_spectrum(&assemble(0.7, k).unwrap(), 1).unwrap()[0];
            assert!(mu <= prev * (1.0 + 1e-13), "K {k}: {mu} > {prev}");
            prev = mu;
        }
    }

    #[test]
    fn grid_convergence() {
        let spectra: Vec<Vec<f64>> = [10, 20, 40]
            .iter()
            .map(|&k| sl_spectrum(&assemble(1.3, k).unwrap(), 3).unwrap())
            .collect();
        for j in 0..3 {
            let d1 = (spectra[0][j] - spectra[1][j]).abs();
            let d2 = (spectra[1][j] - spectra[2][j]).abs();
            assert!(d2 <= 0.1 * d1 || d2 <= 1e-12 * spectra[2][j], "mode {j}: {d1} {d2}");
        }
    }

    #[test]
    fn boundary_flux_vanishes() {
        let e = 0.7;
        let sys = assemble(e, 60).unwrap();
        let c = sl_coefficients(e).unwrap();
        for pair in sl_eigenpairs(&sys, 3).unwrap() {
            let z = 1.0 - 1e-4;
            let (u, du) = eval_trial(&sys, &pair.coeffs, z);
            let (u_mid, _) = eval_trial(&sys, &pair.coeffs, 0.5);
            assert!((c.p(z) * du * u).abs() <= 1e-5 * u_mid * u_mid);
            assert!(eval_trial(&sys, &pair.coeffs, 1e-3).0 > 0.0);
        }
    }

    #[test]
    fn rejects_bad_input() {
        assert!(assemble(0.0, 3).is_err());
        assert!(assemble(0.5, 0).is_err());
        let sys = assemble(0.5, 3).unwrap();
        assert!(sl_spectrum(&sys, 4).is_err());
    }

    #[test]
    fn too_few_nodes_is_reported() {
        let opts = SlOptions { extra_nodes: 0, quadrature_tol: 1e-15, ..SlOptions::default() };
        match assemble_with(0.3, 2, &opts) {
            Err(crate::Error::Numerical(NumericalError::Quadrature { row, col, .. })) => {
                assert!(row < 2 && col <= row)
            }
            other => panic!("{other:?}"),
        }
    }

    proptest! {
        #[test]
        fn stiffness_is_self_adjoint(
            x in proptest::collection::vec(-1.0f64..1.0, 8),
            y in proptest::collection::vec(-1.0f64..1.0, 8),
        ) {
            let sys = assemble(0.9, 8).unwrap();
            let a = dot(&x, &mat_vec(&sys.stiffness, &y));
            let b = dot(&y, &mat_vec(&sys.stiffness, &x));
            prop_assert!((a - b).abs() <= 1e-13 * (1.0 + a.abs()));
        }

        #[test]
        fn weighted_norm_is_positive(c in proptest::collection::vec(-1.0f64..1.0, 10)) {
            prop_assume!(c.iter().any(|v| *v != 0.0));
            let sys = assemble(1.3, 10).unwrap();
            prop_assert!(weighted_norm_sq(&c, &sys) > 0.0);
        }
    }
}
