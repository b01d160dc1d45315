//! Frobenius solutions of Heun's equation
//!
//! ```text
//! P₂(z)·u″ + P₁(z)·u′ + P₀(z)·u = 0,
//! P₂ = z(z−1)(z−a),  P₁ = γ(z−1)(z−a) + δz(z−a) + ε_H·z(z−1),  P₀ = αβz − q,
//! ```
//!
//! about `z = 0` (exponents 0 and 1) and `z = 1` (exponents 0 and `−1/ε`), and
//! the least-squares connection `u = a·u₁ + b·u₂` on the overlap of the two
//! unit discs. At an eigenvalue the exponent-1 solution at 0 is the generating
//! function of the eigenvector, which is finite at 1, so `b` vanishes.
//!
//! The recursion at each center comes from substituting a generic series into
//! the equation with the coefficient polynomials re-expanded in the local
//! variable (`t = z` or `t = 1 − z`), so nothing is transcribed by hand.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{NumericalError, ParamError, Result};
use crate::operator::{Epsilon, HeunParams};

/// Coefficients computed by default; evaluation stops earlier once terms
/// fall below [`TERM_TOL`].
pub const DEFAULT_TERMS: usize = 400;
pub const TERM_TOL: f64 = 1e-14;
/// Largest condition number accepted by [`connection_fit`].
pub const MAX_COND: f64 = 1e8;

type Poly = [Complex64; 4];

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// Product of linear factors `(z − r)` as a cubic-or-less coefficient array.
fn linear_product(roots: &[f64]) -> Poly {
    let mut p = [ONE, ZERO, ZERO, ZERO];
    for &r in roots {
        let mut q = [ZERO; 4];
        for k in 0..3 {
            q[k + 1] += p[k];
            q[k] -= p[k] * r;
        }
        p = q;
    }
    p
}

fn poly_add(a: Poly, b: Poly, s: Complex64) -> Poly {
    let mut c = a;
    for k in 0..4 {
        c[k] += s * b[k];
    }
    c
}

/// `p(1 − s)` in powers of `s`.
fn reflect(p: &Poly) -> Poly {
    let mut out = [ZERO; 4];
    let binom = [[1.0, 0.0, 0.0, 0.0], [1.0, 1.0, 0.0, 0.0], [1.0, 2.0, 1.0, 0.0], [1.0, 3.0, 3.0, 1.0]];
    for (k, pk) in p.iter().enumerate() {
        for j in 0..=k {
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            out[j] += pk * (sign * binom[k][j]);
        }
    }
    out
}

/// The equation in a local variable `t`: `A₂u_tt + A₁u_t + A₀u = 0`.
#[derive(Clone, Copy, Debug)]
struct LocalEquation {
    a2: Poly,
    a1: Poly,
    a0: Poly,
}

impl LocalEquation {
    fn global(p: &HeunParams) -> Self {
        let a2 = linear_product(&[0.0, 1.0, p.a]);
        let a1 = poly_add(
            poly_add(
                [ZERO; 4],
                linear_product(&[1.0, p.a]),
                re(p.gamma),
            ),
            linear_product(&[0.0, p.a]),
            re(p.delta),
        );
        let a1 = poly_add(a1, linear_product(&[0.0, 1.0]), re(p.eps_h));
        let a0 = [-p.mu, re(p.alpha * p.beta), ZERO, ZERO];
        LocalEquation { a2, a1, a0 }
    }

    /// Same equation in `s = 1 − z`; `d/dz = −d/ds` flips the sign of `A₁`.
    fn at_one(p: &HeunParams) -> Self {
        let g = Self::global(p);
        let mut a1 = reflect(&g.a1);
        for c in a1.iter_mut() {
            *c = -*c;
        }
        LocalEquation { a2: reflect(&g.a2), a1, a0: reflect(&g.a0) }
    }

    fn get(p: &Poly, i: isize) -> Complex64 {
        if (0..4).contains(&i) {
            p[i as usize]
        } else {
            ZERO
        }
    }

    /// Coefficient of `c_k` in the equation for the power `t^{m+ρ−1}`.
    fn term(&self, m: usize, k: usize, rho: f64) -> Complex64 {
        let d = m as isize - k as isize;
        let x = k as f64 + rho;
        Self::get(&self.a2, d + 1) * (x * (x - 1.0))
            + Self::get(&self.a1, d) * x
            + Self::get(&self.a0, d - 1)
    }

    fn indicial(&self, x: f64) -> Complex64 {
        self.a2[1] * (x * (x - 1.0)) + self.a1[0] * x
    }

    /// `c_0 = 1` and the recursion for `c_m`, failing where the indicial
    /// polynomial vanishes.
    fn series(&self, rho: f64, k: usize) -> core::result::Result<Vec<Complex64>, usize> {
        let mut c = vec![ZERO; k];
        c[0] = ONE;
        for m in 1..k {
            let i = self.indicial(m as f64 + rho);
            let x = m as f64 + rho;
            if i.norm() <= 1e-9 * (1.0 + x * x) {
                return Err(m);
            }
            let mut s = ZERO;
            for j in m.saturating_sub(3)..m {
                s += self.term(m, j, rho) * c[j];
            }
            c[m] = -s / i;
        }
        Ok(c)
    }
}

/// Logarithmic part `scale·u₁·ln t` of a resonant second solution.
#[derive(Clone, Debug, PartialEq)]
pub struct LogTerm {
    pub scale: Complex64,
    /// Coefficients of `u₁`.
    pub regular: Vec<Complex64>,
}

/// `u(z) = t^exponent·Σ coeffs[m]·t^m (+ log term)`, `t = z − center` at 0 and
/// `t = 1 − z` at 1.
#[derive(Clone, Debug, PartialEq)]
pub struct FrobeniusSeries {
    pub center: f64,
    pub exponent: f64,
    pub coeffs: Vec<Complex64>,
    pub radius: f64,
    pub log: Option<LogTerm>,
}

/// Value and `z`-derivatives at a point, with the number of terms summed.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SeriesValue {
    pub value: Complex64,
    pub d1: Complex64,
    pub d2: Complex64,
    pub terms: usize,
    /// The last two summed terms were below [`TERM_TOL`] relative to the sum.
    pub converged: bool,
}

/// `Σ c_m t^m` with its first two `t`-derivatives, summed until two
/// consecutive terms are negligible.
fn power_sum(c: &[Complex64], t: Complex64) -> (Complex64, Complex64, Complex64, usize, bool) {
    let (mut s0, mut s1, mut s2) = (ZERO, ZERO, ZERO);
    let mut tm = ONE;
    let mut tm1 = ZERO;
    let mut tm2 = ZERO;
    let mut quiet = 0;
    for (m, cm) in c.iter().enumerate() {
        let term = cm * tm;
        s0 += term;
        s1 += cm * tm1 * m as f64;
        s2 += cm * tm2 * (m as f64 * (m as f64 - 1.0));
        let small = term.norm() <= TERM_TOL * s0.norm()
            && (cm * tm1 * m as f64).norm() <= TERM_TOL * s1.norm().max(s0.norm());
        quiet = if small { quiet + 1 } else { 0 };
        if quiet >= 2 {
            return (s0, s1, s2, m + 1, true);
        }
        tm2 = tm1;
        tm1 = tm;
        tm *= t;
    }
    (s0, s1, s2, c.len(), false)
}

impl FrobeniusSeries {
    /// Evaluates at `z` (inside the disc of convergence).
    pub fn eval(&self, z: Complex64) -> SeriesValue {
        let (t, dir) = if self.center == 0.0 { (z, 1.0) } else { (ONE - z, -1.0) };
        let (s0, s1, s2, mut terms, mut converged) = power_sum(&self.coeffs, t);
        let r = self.exponent;
        let tr = if r == 0.0 {
            ONE
        } else if r == libm::round(r) {
            t.powi(r as i32)
        } else {
            t.powf(r)
        };
        // d/dt of t^r·S.
        let mut u = tr * s0;
        let mut ut = tr * (s1 + s0 * r / t);
        let mut utt = tr * (s2 + s1 * (2.0 * r) / t + s0 * (r * (r - 1.0)) / (t * t));
        if let Some(log) = &self.log {
            let (g0, g1, g2, n, ok) = power_sum(&log.regular, t);
            terms = terms.max(n);
            converged &= ok;
            let ln = t.ln();
            u += log.scale * g0 * ln;
            ut += log.scale * (g1 * ln + g0 / t);
            utt += log.scale * (g2 * ln + g1 * 2.0 / t - g0 / (t * t));
        }
        SeriesValue { value: u, d1: ut * dir, d2: utt, terms, converged }
    }
}

/// Branch at `z = 0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExponentAtZero {
    /// The generating-function branch, `u ~ z`.
    One,
    /// Not constructed: the exponents differ by an integer and this branch
    /// may need a logarithm.
    Zero,
}

/// Branch at `z = 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExponentAtOne {
    /// `u₁`, finite at 1.
    Zero,
    /// `u₂ ~ (1−z)^{−1/ε}`.
    MinusInvEps,
}

fn check_terms(k: usize) -> Result<()> {
    if k < 4 {
        return Err(ParamError::Invalid(alloc::format!("series needs at least 4 terms, got {k}")).into());
    }
    Ok(())
}

/// Exponent-1 solution at 0 with `c_0 = 1`.
pub fn series_at_0(params: &HeunParams, k: usize) -> Result<FrobeniusSeries> {
    series_at_0_branch(params, ExponentAtZero::One, k)
}

pub fn series_at_0_branch(
    params: &HeunParams,
    branch: ExponentAtZero,
    k: usize,
) -> Result<FrobeniusSeries> {
    check_terms(k)?;
    if branch == ExponentAtZero::Zero {
        return Err(ParamError::Invalid(
            "only the exponent-1 branch at z = 0 is constructed (exponents 0 and 1 differ by an integer)".into(),
        )
        .into());
    }
    let rho = 1.0 - params.gamma;
    let coeffs = LocalEquation::global(params)
        .series(rho, k)
        .map_err(|m| NumericalError::Other(alloc::format!("indicial polynomial vanishes at m = {m}")))?;
    Ok(FrobeniusSeries { center: 0.0, exponent: rho, coeffs, radius: 1.0, log: None })
}

/// Either branch at 1, for non-resonant `ε` only.
pub fn series_at_1(params: &HeunParams, choice: ExponentAtOne, k: usize) -> Result<FrobeniusSeries> {
    check_terms(k)?;
    if let Some(integer) = Epsilon::new(params.epsilon)?.resonance() {
        return Err(ParamError::ResonantEpsilon { epsilon: params.epsilon, integer }.into());
    }
    match choice {
        ExponentAtOne::Zero => regular_at_1(params, k),
        ExponentAtOne::MinusInvEps => second_solution_at_1(params, k),
    }
}

fn regular_at_1(params: &HeunParams, k: usize) -> Result<FrobeniusSeries> {
    let coeffs = LocalEquation::at_one(params)
        .series(0.0, k)
        .map_err(|m| NumericalError::Other(alloc::format!("indicial polynomial vanishes at m = {m}")))?;
    Ok(FrobeniusSeries { center: 1.0, exponent: 0.0, coeffs, radius: 1.0, log: None })
}

/// Exponent-0 solution at 1 for any `ε`; the larger exponent never resonates.
pub fn first_solution_at_1(params: &HeunParams, k: usize) -> Result<FrobeniusSeries> {
    check_terms(k)?;
    regular_at_1(params, k)
}

/// Exponent-`(1 − δ)` solution at 1 for any `ε`. When `1/ε = N` is an
/// integer it takes the form `s^{−N}·Σ d_m s^m + C·u₁·ln s` with `d_N = 0`.
pub fn second_solution_at_1(params: &HeunParams, k: usize) -> Result<FrobeniusSeries> {
    check_terms(k)?;
    let eq = LocalEquation::at_one(params);
    let rho = 1.0 - params.delta;
    let resonance = Epsilon::new(params.epsilon)?.resonance();
    let Some(n) = resonance.map(|n| n as usize) else {
        let coeffs = eq.series(rho, k).map_err(|m| {
            NumericalError::Other(alloc::format!("indicial polynomial vanishes at m = {m}"))
        })?;
        return Ok(FrobeniusSeries { center: 1.0, exponent: rho, coeffs, radius: 1.0, log: None });
    };
    let rho = -(n as f64);
    let u1 = eq.series(0.0, k).map_err(|m| {
        NumericalError::Other(alloc::format!("indicial polynomial vanishes at m = {m}"))
    })?;
    // L[u₁·ln s] = Σ_q g_q s^{q−1}.
    let g = |q: usize| {
        let mut acc = ZERO;
        for j in 0..4 {
            // A₂ part: j + k − 1 = q.
            if j <= q + 1 && q + 1 - j < u1.len() {
                let kk = q + 1 - j;
                acc += eq.a2[j] * u1[kk] * (2.0 * kk as f64 - 1.0);
            }
            // A₁ part: j + k = q.
            if j <= q && q - j < u1.len() {
                acc += eq.a1[j] * u1[q - j];
            }
        }
        acc
    };
    let mut d = vec![ZERO; k];
    d[0] = ONE;
    let mut scale = ZERO;
    for m in 1..k {
        let mut s = ZERO;
        for j in m.saturating_sub(3)..m {
            s += eq.term(m, j, rho) * d[j];
        }
        if m == n {
            scale = -s / g(0);
            d[m] = ZERO;
            continue;
        }
        if m > n {
            s += scale * g(m - n);
        }
        d[m] = -s / eq.indicial(m as f64 + rho);
    }
    Ok(FrobeniusSeries {
        center: 1.0,
        exponent: rho,
        coeffs: d,
        radius: 1.0,
        log: Some(LogTerm { scale, regular: u1 }),
    })
}

/// `|P₂u″ + P₁u′ + P₀u|` for the series at `z`.
pub fn heun_residual(params: &HeunParams, series: &FrobeniusSeries, z: Complex64) -> f64 {
    let eq = LocalEquation::global(params);
    let ev = |p: &Poly| p[0] + z * (p[1] + z * (p[2] + z * p[3]));
    let v = series.eval(z);
    (ev(&eq.a2) * v.d2 + ev(&eq.a1) * v.d1 + ev(&eq.a0) * v.value).norm()
}

/// `n` points on `|z − 1/2| = 1/4`, symmetric under conjugation.
pub fn overlap_points(n: usize) -> Vec<Complex64> {
    (0..n)
        .map(|j| {
            let th = 2.0 * core::f64::consts::PI * (j as f64 + 0.5) / n as f64;
            Complex64::new(0.5 + 0.25 * libm::cos(th), 0.25 * libm::sin(th))
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct OverlapSample {
    pub points: Vec<Complex64>,
    pub u: Vec<Complex64>,
    pub u1: Vec<Complex64>,
    pub u2: Vec<Complex64>,
}

impl OverlapSample {
    /// Every point lies in both unit discs with margin `margin`.
    pub fn within_overlap(&self, margin: f64) -> bool {
        self.points.iter().all(|z| z.norm() <= 1.0 - margin && (z - 1.0).norm() <= 1.0 - margin)
    }
}

/// Samples `u` (exponent 1 at 0), `u₁` and `u₂` at the default 12 points.
pub fn overlap_sample(params: &HeunParams) -> Result<OverlapSample> {
    let u = series_at_0(params, DEFAULT_TERMS)?;
    let u1 = first_solution_at_1(params, DEFAULT_TERMS)?;
    let u2 = second_solution_at_1(params, DEFAULT_TERMS)?;
    let points = overlap_points(12);
    let at = |s: &FrobeniusSeries| points.iter().map(|z| s.eval(*z).value).collect();
    Ok(OverlapSample { u: at(&u), u1: at(&u1), u2: at(&u2), points })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConnectionFit {
    pub a: Complex64,
    pub b: Complex64,
    /// 2-norm condition number of the column-normalized `[u₁ u₂]`.
    pub cond: f64,
    /// `‖u − a·u₁ − b·u₂‖ / ‖u‖`.
    pub residual: f64,
}

impl ConnectionFit {
    /// `|b|/|a|`.
    pub fn ratio(&self) -> f64 {
        self.b.norm() / self.a.norm()
    }
}

fn inner(x: &[Complex64], y: &[Complex64]) -> Complex64 {
    x.iter().zip(y).map(|(p, q)| p.conj() * q).sum()
}

fn norm(x: &[Complex64]) -> f64 {
    libm::sqrt(x.iter().map(|p| p.norm_sqr()).sum())
}

/// Least-squares `u ≈ a·u₁ + b·u₂` by modified Gram–Schmidt.
pub fn connection_fit(sample: &OverlapSample) -> Result<ConnectionFit> {
    let n = sample.points.len();
    if n < 8 || sample.u.len() != n || sample.u1.len() != n || sample.u2.len() != n {
        return Err(ParamError::Invalid(alloc::format!(
            "connection fit needs at least 8 matching samples, got {n}"
        ))
        .into());
    }
    let n1 = norm(&sample.u1);
    let n2 = norm(&sample.u2);
    let q1: Vec<Complex64> = sample.u1.iter().map(|x| x / n1).collect();
    let r12 = inner(&q1, &sample.u2);
    let w: Vec<Complex64> = sample.u2.iter().zip(&q1).map(|(x, q)| x - r12 * q).collect();
    let r22 = norm(&w);
    // Column-normalized R = [[1, ρ], [0, τ]] with |ρ|² + τ² = 1.
    let rho = r12.norm() / n2;
    let tau = r22 / n2;
    let cond = if tau == 0.0 {
        f64::INFINITY
    } else {
        let smax2 = 1.0 + rho;
        let smin2 = tau * tau / smax2;
        libm::sqrt(smax2 / smin2)
    };
    if !(cond <= MAX_COND) {
        return Err(NumericalError::IllConditioned { cond }.into());
    }
    let q2: Vec<Complex64> = w.iter().map(|x| x / r22).collect();
    let b = inner(&q2, &sample.u) / r22;
    let a = (inner(&q1, &sample.u) - r12 * b) / n1;
    let res: Vec<Complex64> = (0..n).map(|i| sample.u[i] - a * sample.u1[i] - b * sample.u2[i]).collect();
    Ok(ConnectionFit { a, b, cond, residual: norm(&res) / norm(&sample.u) })
}

/// Connection coefficients of the generating-function solution at `λ`.
pub fn connection_at(params: &HeunParams) -> Result<ConnectionFit> {
    connection_fit(&overlap_sample(params)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::heun_parameters;
    use crate::recurrence::forward_run;
    use proptest::prelude::*;

    fn c(x: f64, y: f64) -> Complex64 {
        Complex64::new(x, y)
    }

    fn params(e: f64, l: f64) -> HeunParams {
        heun_parameters(e, c(l, 0.0)).unwrap()
    }

    /// Eigenvalues at ε = 0.5 from the closed matrix section (N = 2000).
    const MATRIX_HALF: [f64; 6] = [
        1.1672345030601249,
        2.9684447822260976,
        5.4826776370039804,
        8.7135448540103077,
        12.661760180966936,
        17.327551658966668,
    ];

    #[test]
    fn hand_iteration_at_zero() {
        let s = series_at_0(&params(0.5, 1.0), 4).unwrap();
        assert_eq!(s.coeffs[0], ONE);
        assert!(s.coeffs[1].norm() < 1e-15);
        assert!((s.coeffs[2] - 1.0 / 3.0).norm() < 1e-15);
        assert_eq!(s.exponent, 1.0);
        assert_eq!(s.radius, 1.0);
    }

    #[test]
    fn local_polynomials_at_one() {
        // P₂(1−s) = −2s + 3s² − s³ and −P₁(1−s) = −(2 + 2/ε) + (4 + 2/ε)s − 2s².
        let e = 0.7;
        let eq = LocalEquation::at_one(&params(e, 2.0));
        let want2 = [0.0, -2.0, 3.0, -1.0];
        let want1 = [-(2.0 + 2.0 / e), 4.0 + 2.0 / e, -2.0, 0.0];
        for k in 0..4 {
            assert!((eq.a2[k] - want2[k]).norm() < 1e-14);
            assert!((eq.a1[k] - want1[k]).norm() < 1e-14);
        }
        // Indicial polynomial −2ρ(ρ + 1/ε): roots 0 and −1/ε.
        assert!(eq.indicial(0.0).norm() < 1e-15);
        assert!(eq.indicial(-1.0 / e).norm() < 1e-13);
    }

    #[test]
    fn matches_forward_recurrence() {
        for &(e, l) in &[(0.5, 1.0), (0.7, 3.3), (1.3, -2.0), (1.9, 17.0)] {
            let s = series_at_0(&params(e, l), 20).unwrap();
            let v = forward_run(e, c(l, 0.0), 20).unwrap();
            for k in 0..20 {
                let want = v.get(k + 1) / v.get(1);
                assert!((s.coeffs[k] - want).norm() <= 1e-12 * (1.0 + want.norm()), "{e} {l} {k}");
            }
        }
    }

    #[test]
    fn rejects_other_branch_and_resonance() {
        let p = params(0.7, 1.0);
        assert!(series_at_0_branch(&p, ExponentAtZero::Zero, 10).is_err());
        assert!(series_at_0(&p, 3).is_err());
        match series_at_1(&params(0.5, 1.0), ExponentAtOne::Zero, 10) {
            Err(crate::Error::Param(ParamError::ResonantEpsilon { integer, .. })) => assert_eq!(integer, 2),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn regular_branch_at_one() {
        let s = series_at_1(&params(0.7, 2.0), ExponentAtOne::Zero, 60).unwrap();
        assert_eq!(s.eval(c(1.0, 0.0)).value, ONE);
        assert!(heun_residual(&params(0.7, 2.0), &s, c(0.9, 0.0)) <= 1e-8);
        let s2 = series_at_1(&params(0.7, 2.0), ExponentAtOne::MinusInvEps, 60).unwrap();
        assert!(heun_residual(&params(0.7, 2.0), &s2, c(0.9, 0.0)) <= 1e-8);
    }

    #[test]
    fn second_solution_blows_up() {
        let p = params(0.5, 1.0);
        let s = second_solution_at_1(&p, 60).unwrap();
        assert!(s.log.is_some());
        assert!(s.eval(c(1.0 - 1e-4, 0.0)).value.norm() >= 1e8);
        let p = params(0.45, 1.0);
        let s = series_at_1(&p, ExponentAtOne::MinusInvEps, 60).unwrap();
        assert!(s.log.is_none());
        assert!(s.eval(c(1.0 - 1e-4, 0.0)).value.norm() >= 1e8);
    }

    #[test]
    fn residual_decreases_with_terms() {
        let p = params(0.7, 2.5);
        let z = c(0.1, 0.0);
        let r: Vec<f64> = [4, 8, 16]
            .iter()
            .map(|&k| heun_residual(&p, &series_at_0(&p, k).unwrap(), z))
            .collect();
        assert!(r[1] < r[0] && r[2] < r[1], "{r:?}");
    }

    #[test]
    fn residual_on_circles_is_geometric() {
        for &e in &[0.5, 0.7, 1.0] {
            let p = params(e, 2.5);
            let builders: [(&str, fn(&HeunParams, usize) -> Result<FrobeniusSeries>, f64); 3] = [
                ("at0", series_at_0, 0.0),
                ("u1", first_solution_at_1, 1.0),
                ("u2", second_solution_at_1, 1.0),
            ];
            for (name, build, center) in builders {
                let worst = |k: usize| {
                    let s = build(&p, k).unwrap();
                    (0..16)
                        .map(|j| {
                            let th = j as f64 * core::f64::consts::PI / 8.0 + 0.1;
                            let z = c(center + 0.3 * libm::cos(th), 0.3 * libm::sin(th));
                            heun_residual(&p, &s, z)
                        })
                        .fold(0.0, f64::max)
                };
                let (r10, r20, r40) = (worst(10), worst(20), worst(40));
                assert!(r20 < 0.1 * r10 || r20 < 1e-12, "{name} {e}: {r10} {r20}");
                assert!(r40 < 1e-10, "{name} {e}: {r40}");
            }
        }
    }

    #[test]
    fn sample_points_stay_inside() {
        let s = overlap_sample(&params(0.5, 1.0)).unwrap();
        assert_eq!(s.points.len(), 12);
        assert!(s.within_overlap(0.2));
    }

    #[test]
    fn exact_representation() {
        let mut s = overlap_sample(&params(0.7, 2.0)).unwrap();
        s.u = s.u1.clone();
        let f = connection_fit(&s).unwrap();
        assert!((f.a - 1.0).norm() < 1e-12);
        assert!(f.b.norm() < 1e-12);
        assert!(f.residual < 1e-13);
    }

    #[test]
    fn dependent_columns_are_rejected() {
        let mut s = overlap_sample(&params(0.7, 2.0)).unwrap();
        s.u2 = s.u1.iter().map(|x| x * 3.0).collect();
        assert!(matches!(
            connection_fit(&s),
            Err(crate::Error::Numerical(NumericalError::IllConditioned { .. }))
        ));
        s.points.truncate(5);
        assert!(connection_fit(&s).is_err());
    }

    #[test]
    fn vanishes_at_eigenvalues() {
        for &l in &MATRIX_HALF[..5] {
            let f = connection_at(&params(0.5, l)).unwrap();
            assert!(f.ratio() <= 1e-6, "{l}: {}", f.ratio());
            assert!(f.residual <= 1e-12);
        }
        let mid = 0.5 * (MATRIX_HALF[0] + MATRIX_HALF[1]);
        assert!(connection_at(&params(0.5, mid)).unwrap().ratio() >= 1e-2);
    }

    #[test]
    fn b_changes_sign_between_eigenvalues() {
        // b is real for real λ and crosses zero once at each eigenvalue (a has
        // zeros of its own in between, so b/a is not used here).
        let b = |l: f64| {
            let f = connection_at(&params(0.5, l)).unwrap();
            assert!(f.b.im.abs() <= 1e-10 * f.b.norm().max(1e-300) + 1e-15);
            f.b.re
        };
        let mids: Vec<f64> = MATRIX_HALF.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
        for w in mids.windows(2) {
            assert!(b(w[0]) * b(w[1]) < 0.0, "{w:?}");
        }
    }

    #[test]
    fn zeros_of_b_match_eigenvalues() {
        // Non-resonant ε; bisect the real part of b/a.
        let e = 0.7;
        let f = |l: f64| {
            let fit = connection_at(&params(e, l)).unwrap();
            (fit.b / fit.a).re
        };
        let want = [1.2749259902570331, 3.498772303357579, 6.728556262192364];
        for w in want {
            let (mut lo, mut hi) = (w - 0.1, w + 0.1);
            let flo = f(lo);
            assert!(flo * f(hi) < 0.0, "no sign change around {w}");
            for _ in 0..60 {
                let mid = 0.5 * (lo + hi);
                if f(mid) * flo > 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            assert!((0.5 * (lo + hi) - w).abs() <= 1e-6 * w, "{} vs {w}", 0.5 * (lo + hi));
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn series_matches_recurrence(e in 0.2f64..1.95, re_l in -5.0f64..40.0, im_l in -3.0f64..3.0) {
            let lam = c(re_l, im_l);
            let s = series_at_0(&heun_parameters(e, lam).unwrap(), 20).unwrap();
            let v = forward_run(e, lam, 20).unwrap();
            for k in 0..20 {
                let want = v.get(k + 1) / v.get(1);
                prop_assert!((s.coeffs[k] - want).norm() <= 1e-12 * (1.0 + want.norm()));
            }
        }

        #[test]
        fn b_is_continuous(l in 1.4f64..2.7, d in -1e-6f64..1e-6) {
            // (1.4, 2.7) sits between the first two eigenvalues at ε = 0.5.
            let b0 = connection_at(&params(0.5, l)).unwrap().b;
            let b1 = connection_at(&params(0.5, l + d)).unwrap().b;
            prop_assert!((b1 - b0).norm() <= 1e3 * d.abs() + 1e-12);
        }
    }
}
