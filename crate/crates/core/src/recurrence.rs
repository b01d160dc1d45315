//! The three-term recurrence satisfied by an eigenvector of A₊,
//!
//! ```text
//! (ε/2)n(n−1)·v_{n−1} + (n − λ)·v_n − (ε/2)n(n+1)·v_{n+1} = 0,   n ≥ 1,
//! ```
//!
//! whose first row is the initial condition `ε·v₂ = (1−λ)·v₁`. Sequences are
//! stored 0-based: `v[0]` holds `v₁`.
//!
//! Forward iteration picks up the dominant solution, which grows like
//! `n^{1/ε−1}` relative to the decaying one, so it is only used at small n.
//! Eigenvalues come from the minimal solution, computed by backward (Miller)
//! recurrence, through the residual of the initial condition.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::analysis::ell1_tail;
use crate::closure::{ratio_at, DEFAULT_ORDER};
use crate::eigen::EigenPair;
use crate::error::{NumericalError, ParamError, Result};
use crate::operator::Epsilon;
use crate::real::{cabs, cx_from, cx_to_f64, l1, CompensatedSum, Cx, DoubleDouble, Precision, Real};

#[derive(Clone, Debug, PartialEq)]
pub struct CoefficientSequence {
    pub epsilon: f64,
    pub lambda: Complex64,
    pub v: Vec<Complex64>,
    /// False when a backward run changed by more than the settle tolerance
    /// after doubling its start index. Forward runs are always settled.
    pub settled: bool,
}

impl CoefficientSequence {
    /// Wraps an eigenvector of a truncated section.
    pub fn from_pair(epsilon: f64, pair: &EigenPair) -> Self {
        CoefficientSequence { epsilon, lambda: pair.lambda, v: pair.vector.clone(), settled: true }
    }

    /// `v_n`, 1-based.
    pub fn get(&self, n: usize) -> Complex64 {
        self.v[n - 1]
    }

    pub fn len(&self) -> usize {
        self.v.len()
    }

    pub fn is_empty(&self) -> bool {
        self.v.is_empty()
    }
}

/// Runs the recurrence upward from `v₁ = 1`, `v₂ = (1−λ)/ε`. A run that
/// overflows stops at the last finite index.
pub fn forward_run(epsilon: f64, lambda: Complex64, m: usize) -> Result<CoefficientSequence> {
    let e = Epsilon::new(epsilon)?.value();
    if m < 2 {
        return Err(ParamError::Invalid("forward_run needs M ≥ 2".into()).into());
    }
    let mut v = Vec::with_capacity(m);
    v.push(Complex64::new(1.0, 0.0));
    v.push((1.0 - lambda) / e);
    for n in 1..m - 1 {
        let nf = n as f64;
        let next = (v[n - 1] * (0.5 * e * (nf * (nf + 1.0))) - (lambda - (nf + 1.0)) * v[n])
            / (0.5 * e * ((nf + 1.0) * (nf + 2.0)));
        if !(next.re.is_finite() && next.im.is_finite()) {
            break;
        }
        v.push(next);
    }
    Ok(CoefficientSequence { epsilon: e, lambda, v, settled: true })
}

/// Value used for `v_{M+1}` when the backward run starts at `v_M = 1`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Seed {
    /// `v_{M+1} = 0`: the classical Miller start. The error it leaves decays
    /// only like `M^{−2/ε}`.
    Zero,
    /// `v_{M+1} = r_M(λ)·v_M` with the asymptotic minimal ratio.
    #[default]
    Asymptotic,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ShootingOptions {
    pub precision: Precision,
    pub seed: Seed,
    /// Backward start index `M`; `None` means `max(2·N_out, 400·2^j) + 50`
    /// with the smallest `j ≥ 0` such that `400·2^j ≥ 16|λ|/ε`. The seed
    /// error grows with `|λ|/(εM)`, and the buckets keep `M` locally
    /// constant in λ.
    pub start: Option<usize>,
    /// Series order of the asymptotic seed.
    pub order: usize,
    /// Relative change allowed between the runs from `M` and `2M`.
    pub settle_tol: f64,
    /// Doublings attempted by [`backward_minimal_auto`].
    pub max_doublings: usize,
}

impl Default for ShootingOptions {
    fn default() -> Self {
        ShootingOptions {
            precision: Precision::default(),
            seed: Seed::default(),
            start: None,
            order: DEFAULT_ORDER,
            settle_tol: 1e-10,
            max_doublings: 8,
        }
    }
}

impl ShootingOptions {
    fn start_for(&self, n_out: usize, epsilon: f64, lambda: Complex64) -> usize {
        self.start.unwrap_or_else(|| {
            let want = 16.0 * lambda.norm() / epsilon;
            let mut base = 400usize;
            while (base as f64) < want && base < 1 << 24 {
                base *= 2;
            }
            (2 * n_out).max(base) + 50
        })
    }
}

/// Backward recurrence from `v_M = 1`, returning `v_1..=v_keep` and `k`
/// such that the true values are the returned ones times `2^k` (the run is
/// rescaled by exact powers of two to stay in range).
fn backward_core<R: Real>(
    eps: R,
    lam: Cx<R>,
    m: usize,
    keep: usize,
    opts: &ShootingOptions,
) -> (Vec<Cx<R>>, i32) {
    let zero = Cx::<R>::new(R::zero(), R::zero());
    let half = eps * R::from_f64(0.5);
    let mut hi = match opts.seed {
        Seed::Zero => zero,
        Seed::Asymptotic => ratio_at(eps, lam, m, opts.order),
    };
    let mut mid = Cx::<R>::new(R::one(), R::zero());
    let mut out = vec![zero; keep];
    if m <= keep {
        out[m - 1] = mid;
    }
    let big = R::from_f64(1e100);
    let mut exp2 = 0i32;
    for n in (2..=m).rev() {
        // Row n solved for v_{n−1}.
        let nf = R::from_usize(n);
        let lo = ((lam - nf) * mid + hi * (half * nf * (nf + R::one())))
            * (R::one() / (half * nf * (nf - R::one())));
        hi = mid;
        mid = lo;
        if n - 1 <= keep {
            out[n - 2] = mid;
        }
        let size = l1(mid);
        if size > big {
            let (_, e) = libm::frexp(size.to_f64());
            exp2 += e;
            let k = R::from_f64(libm::ldexp(1.0, -e));
            hi = hi * k;
            mid = mid * k;
            for z in out.iter_mut() {
                *z = *z * k;
            }
        }
    }
    (out, exp2)
}

fn normalized<R: Real>(raw: &[Cx<R>]) -> Result<Vec<Complex64>> {
    let big = raw.iter().fold(R::zero(), |m, z| m.max(cabs(*z)));
    let v1 = cabs(raw[0]);
    if !(v1 > big * R::from_f64(1e-13)) {
        let magnitude = if big > R::zero() { (v1 / big).to_f64() } else { 0.0 };
        return Err(NumericalError::VanishingFirstComponent { magnitude }.into());
    }
    let inv = Cx::<R>::new(R::one(), R::zero()) / raw[0];
    Ok(raw.iter().map(|z| cx_to_f64(*z * inv)).collect())
}

fn sup_rel_change(a: &[Complex64], b: &[Complex64]) -> f64 {
    let scale = b.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let d = a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
    if scale > 0.0 {
        d / scale
    } else {
        d
    }
}

fn backward_at<R: Real>(
    e: f64,
    lambda: Complex64,
    m: usize,
    n_out: usize,
    opts: &ShootingOptions,
) -> Result<CoefficientSequence> {
    let keep = n_out.max(2);
    let eps = R::from_f64(e);
    let lam = cx_from::<R>(lambda);
    let a = normalized(&backward_core(eps, lam, m, keep, opts).0)?;
    let b = normalized(&backward_core(eps, lam, 2 * m, keep, opts).0)?;
    let settled = sup_rel_change(&a[..n_out], &b[..n_out]) <= opts.settle_tol;
    let mut v = a;
    v.truncate(n_out);
    Ok(CoefficientSequence { epsilon: e, lambda, v, settled })
}

/// Minimal solution on `1..=n_out` by backward recurrence from index `m`,
/// normalized to `v₁ = 1`. The run is repeated from `2m`; `settled` records
/// whether the two agree to `opts.settle_tol` (sup-norm relative).
pub fn backward_minimal(
    epsilon: f64,
    lambda: Complex64,
    m: usize,
    n_out: usize,
    opts: &ShootingOptions,
) -> Result<CoefficientSequence> {
    let e = Epsilon::new(epsilon)?.value();
    if n_out == 0 || m < n_out + 50 {
        return Err(ParamError::Invalid(alloc::format!(
            "backward_minimal needs N_out ≥ 1 and M ≥ N_out + 50 (got M = {m}, N_out = {n_out})"
        ))
        .into());
    }
    match opts.precision {
        Precision::Double => backward_at::<f64>(e, lambda, m, n_out, opts),
        Precision::DoubleDouble => backward_at::<DoubleDouble>(e, lambda, m, n_out, opts),
    }
}

/// [`backward_minimal`] from the default start, doubling `M` until settled.
pub fn backward_minimal_auto(
    epsilon: f64,
    lambda: Complex64,
    n_out: usize,
    opts: &ShootingOptions,
) -> Result<CoefficientSequence> {
    let mut m = opts.start_for(n_out, epsilon, lambda);
    let mut last = None;
    for _ in 0..=opts.max_doublings {
        let s = backward_minimal(epsilon, lambda, m, n_out, opts)?;
        if s.settled {
            return Ok(s);
        }
        last = Some(s);
        m *= 2;
    }
    let s = last.expect("at least one run");
    let change = {
        let again = backward_minimal(epsilon, lambda, m, n_out, opts)?;
        sup_rel_change(&s.v, &again.v)
    };
    Err(NumericalError::BackwardUnsettled { change, start: m / 2 }.into())
}

/// `v₁`, `v₂` of the run normalized at `v_M = 1`, as values times `2^k`.
fn first_two<R: Real>(e: f64, lambda: Complex64, opts: &ShootingOptions) -> (Cx<R>, Cx<R>, i32) {
    let m = opts.start_for(2, e, lambda);
    let (raw, k) = backward_core(R::from_f64(e), cx_from::<R>(lambda), m, 2, opts);
    (raw[0], raw[1], k)
}

/// `S(λ) = ε·v₂ − (1−λ)·v₁` on the run normalized at `v_M = 1`, as a value
/// times `2^k`, together with `max(|v₁|, |v₂|)` on the same scale. With the
/// asymptotic seed `S` is a polynomial in λ whose zeros near the real axis
/// are the eigenvalues; unlike `F̃` it has no poles to shield them.
fn entire_at<R: Real>(e: f64, lambda: Complex64, opts: &ShootingOptions) -> (Cx<R>, R, i32) {
    let (v1, v2, k) = first_two::<R>(e, lambda, opts);
    let s = v2 * R::from_f64(e) - (Cx::<R>::new(R::one(), R::zero()) - cx_from::<R>(lambda)) * v1;
    (s, cabs(v1).max(cabs(v2)), k)
}

fn residual_at<R: Real>(e: f64, lambda: Complex64, opts: &ShootingOptions) -> Complex64 {
    let (s, scale, _) = entire_at::<R>(e, lambda, opts);
    cx_to_f64(s * (R::one() / scale))
}

fn meromorphic_at<R: Real>(e: f64, lambda: Complex64, opts: &ShootingOptions) -> Result<Complex64> {
    let (v1, v2, _) = first_two::<R>(e, lambda, opts);
    if !(cabs(v1) > cabs(v2) * R::from_f64(1e-13)) {
        let magnitude = (cabs(v1) / cabs(v2)).to_f64();
        return Err(NumericalError::VanishingFirstComponent { magnitude }.into());
    }
    let eps = R::from_f64(e);
    let lam = cx_from::<R>(lambda);
    Ok(cx_to_f64(v2 / v1 * eps - (Cx::<R>::new(R::one(), R::zero()) - lam)))
}

/// `F(λ) = (ε·v₂ − (1−λ)·v₁)/max(|v₁|, |v₂|)` on the minimal solution.
///
/// The backward run is normalized at its start index rather than at `v₁`,
/// which leaves `|F|` unchanged but keeps `F` continuous across zeros of
/// `v₁`; on the real axis `F` is real and changes sign exactly at
/// eigenvalues. The normalization by `max(|v₁|, |v₂|)` makes `F` non-analytic;
/// use [`shooting_residual_meromorphic`] for complex root finding.
pub fn shooting_residual(epsilon: f64, lambda: Complex64, opts: &ShootingOptions) -> Result<Complex64> {
    let e = Epsilon::new(epsilon)?.value();
    Ok(match opts.precision {
        Precision::Double => residual_at::<f64>(e, lambda, opts),
        Precision::DoubleDouble => residual_at::<DoubleDouble>(e, lambda, opts),
    })
}

/// `F̃(λ) = ε·v₂/v₁ − (1−λ)`: analytic in λ away from zeros of `v₁`, where
/// it has poles. Same zeros as [`shooting_residual`].
pub fn shooting_residual_meromorphic(
    epsilon: f64,
    lambda: Complex64,
    opts: &ShootingOptions,
) -> Result<Complex64> {
    let e = Epsilon::new(epsilon)?.value();
    match opts.precision {
        Precision::Double => meromorphic_at::<f64>(e, lambda, opts),
        Precision::DoubleDouble => meromorphic_at::<DoubleDouble>(e, lambda, opts),
    }
}

fn real_residual(e: f64, x: f64, opts: &ShootingOptions) -> Result<f64> {
    Ok(shooting_residual(e, Complex64::new(x, 0.0), opts)?.re)
}

/// Illinois-modified regula falsi on a bracket with `fa·fb < 0`.
fn refine<F: FnMut(f64) -> Result<f64>>(
    mut f: F,
    mut a: f64,
    mut b: f64,
    mut fa: f64,
    mut fb: f64,
) -> Result<f64> {
    let mut side = 0i8;
    for _ in 0..200 {
        if (b - a).abs() <= 4.0 * f64::EPSILON * a.abs().max(b.abs()) {
            break;
        }
        let mut c = (a * fb - b * fa) / (fb - fa);
        if !(c > a.min(b) && c < a.max(b)) {
            c = 0.5 * (a + b);
        }
        let fc = f(c)?;
        if fc == 0.0 {
            return Ok(c);
        }
        if (fc < 0.0) == (fb < 0.0) {
            b = c;
            fb = fc;
            if side == -1 {
                fa *= 0.5;
            }
            side = -1;
        } else {
            a = c;
            fa = fc;
            if side == 1 {
                fb *= 0.5;
            }
            side = 1;
        }
    }
    Ok(if fa.abs() < fb.abs() { a } else { b })
}

/// Real eigenvalues in `[lo, hi]`: `F` is sampled at `seeds` equispaced
/// points, every sign change is refined by Illinois iteration, and each root
/// is re-refined with the backward start doubled inside a narrow bracket.
/// Roots are sorted and deduplicated at `1e−10` relative.
pub fn find_real_roots(
    epsilon: f64,
    lo: f64,
    hi: f64,
    seeds: usize,
    opts: &ShootingOptions,
) -> Result<Vec<f64>> {
    let e = Epsilon::new(epsilon)?.value();
    if !(lo < hi) || seeds < 2 {
        return Err(ParamError::Invalid("find_real_roots needs lo < hi and at least 2 seeds".into()).into());
    }
    let xs: Vec<f64> = (0..seeds).map(|i| lo + (hi - lo) * i as f64 / (seeds - 1) as f64).collect();
    let fs: Vec<f64> = xs.iter().map(|&x| real_residual(e, x, opts)).collect::<Result<_>>()?;
    let mut roots = Vec::new();
    for i in 0..seeds {
        let x = if fs[i] == 0.0 {
            xs[i]
        } else if i + 1 < seeds && fs[i + 1] != 0.0 && (fs[i] < 0.0) != (fs[i + 1] < 0.0) {
            refine(|x| real_residual(e, x, opts), xs[i], xs[i + 1], fs[i], fs[i + 1])?
        } else {
            continue;
        };
        let fine = ShootingOptions { start: Some(2 * opts.start_for(2, e, Complex64::new(x, 0.0))), ..*opts };
        let w = 1e-7 * (1.0 + x.abs());
        let (fa, fb) = (real_residual(e, x - w, &fine)?, real_residual(e, x + w, &fine)?);
        let x = if (fa < 0.0) != (fb < 0.0) {
            refine(|x| real_residual(e, x, &fine), x - w, x + w, fa, fb)?
        } else {
            x
        };
        roots.push(x);
    }
    roots.sort_by(f64::total_cmp);
    roots.dedup_by(|b, a| (*b - *a).abs() <= 1e-10 * a.abs().max(1.0));
    Ok(roots)
}

/// Axis-aligned rectangle in the λ-plane.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScanRect {
    pub re: (f64, f64),
    pub im: (f64, f64),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScanRoot {
    pub lambda: Complex64,
    pub im_abs: f64,
    /// Seeds that converged to this root.
    pub hits: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScanReport {
    /// Sorted by real part, then imaginary part.
    pub roots: Vec<ScanRoot>,
    pub seeds: usize,
    /// Seeds whose Newton iteration failed to converge.
    pub dropped: usize,
}

/// Newton iteration on the entire form `S` with a centered difference
/// derivative, step `10⁻⁶·(1+|λ|)`, at most 50 steps. Converged when the
/// normalized residual `|F|` is at most `10⁻¹¹`, or when the step falls below
/// a few ulps of λ (higher eigenvalues are so ill-conditioned that `|F|` at
/// the nearest double exceeds the gate).
pub fn newton(epsilon: f64, start: Complex64, opts: &ShootingOptions) -> Option<Complex64> {
    match opts.precision {
        Precision::Double => newton_in::<f64>(epsilon, start, opts),
        Precision::DoubleDouble => newton_in::<DoubleDouble>(epsilon, start, opts),
    }
}

fn newton_in<R: Real>(e: f64, start: Complex64, opts: &ShootingOptions) -> Option<Complex64> {
    let mut lam = start;
    let finite = |z: Complex64| z.re.is_finite() && z.im.is_finite();
    for _ in 0..50 {
        let (s0, scale, k0) = entire_at::<R>(e, lam, opts);
        if cx_to_f64(s0).norm() <= 1e-11 * scale.to_f64() {
            return Some(lam);
        }
        let h = 1e-6 * (1.0 + lam.norm());
        let (sp, _, kp) = entire_at::<R>(e, lam + h, opts);
        let (sm, _, km) = entire_at::<R>(e, lam - h, opts);
        let at = |s: Cx<R>, k: i32| s * R::from_f64(libm::ldexp(1.0, k - k0));
        let d = (at(sp, kp) - at(sm, km)) * R::from_f64(0.5 / h);
        let step = cx_to_f64(s0 / d);
        if !finite(step) {
            return None;
        }
        lam -= step;
        if !finite(lam) || lam.norm() > 1e6 {
            return None;
        }
        if step.norm() <= 8.0 * f64::EPSILON * lam.norm() {
            return Some(lam);
        }
    }
    None
}

/// Newton refinement from an `nx × ny` grid of seeds spanning `rect`
/// (edges included). Converged points are clustered at `1e−7·(1+|λ|)`.
pub fn complex_scan(
    epsilon: f64,
    rect: ScanRect,
    nx: usize,
    ny: usize,
    opts: &ShootingOptions,
) -> Result<ScanReport> {
    let e = Epsilon::new(epsilon)?.value();
    if !(rect.re.0 < rect.re.1 && rect.im.0 < rect.im.1) || nx < 2 || ny < 2 {
        return Err(ParamError::Invalid("complex_scan needs a proper rectangle and a 2×2 grid".into()).into());
    }
    let grid = |(a, b): (f64, f64), k: usize, i: usize| a + (b - a) * i as f64 / (k - 1) as f64;
    let mut found = Vec::new();
    let mut dropped = 0;
    for i in 0..nx {
        for j in 0..ny {
            let seed = Complex64::new(grid(rect.re, nx, i), grid(rect.im, ny, j));
            match newton(e, seed, opts) {
                Some(z) => found.push(z),
                None => dropped += 1,
            }
        }
    }
    Ok(ScanReport { roots: cluster(found), seeds: nx * ny, dropped })
}

fn cluster(mut pts: Vec<Complex64>) -> Vec<ScanRoot> {
    pts.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    let mut groups: Vec<Vec<Complex64>> = Vec::new();
    for z in pts {
        let near = groups
            .iter_mut()
            .find(|g| g.iter().any(|w| (w - z).norm() <= 1e-7 * (1.0 + z.norm())));
        match near {
            Some(g) => g.push(z),
            None => groups.push(vec![z]),
        }
    }
    let mut roots: Vec<ScanRoot> = groups
        .into_iter()
        .map(|g| {
            let k = g.len() as f64;
            let mean = g.iter().fold(Complex64::new(0.0, 0.0), |a, z| a + z) / k;
            ScanRoot { lambda: mean, im_abs: mean.im.abs(), hits: g.len() }
        })
        .collect();
    roots.sort_by(|a, b| {
        a.lambda.re.total_cmp(&b.lambda.re).then(a.lambda.im.total_cmp(&b.lambda.im))
    });
    roots
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GeneratingValue {
    pub value: Complex64,
    /// Bound on the omitted terms `Σ_{k>M} |v_k|·|z|^k`; infinite for
    /// `|z| > 1` or when the sequence is not visibly summable.
    pub tail: f64,
}

/// `u(z) = Σ v_k z^k` by compensated summation.
pub fn generating_eval(v: &CoefficientSequence, z: Complex64) -> GeneratingValue {
    let mut sum = CompensatedSum::default();
    let mut p = z;
    for c in &v.v {
        sum.add(c * p);
        p *= z;
    }
    let r = z.norm();
    let tail = if r > 1.0 {
        f64::INFINITY
    } else {
        ell1_tail(&v.v).tail * libm::pow(r, (v.len() + 1) as f64)
    };
    GeneratingValue { value: sum.value(), tail }
}

/// Relative residual of each row of the recurrence: entry 0 is the initial
/// condition `ε·v₂ − (1−λ)·v₁`, entry `n−1` (for `n ≥ 2`) is
/// `(ε/2)n(n+1)·v_{n+1} + (λ−n)·v_n − (ε/2)n(n−1)·v_{n−1}`, each divided by
/// the sum of the moduli of its terms. Rows needing `v_{len+1}` are omitted.
pub fn ode_residual_profile(v: &CoefficientSequence) -> Vec<f64> {
    let e = v.epsilon;
    let lam = v.lambda;
    let m = v.len();
    let rel = |terms: &[Complex64]| {
        let s: f64 = terms.iter().map(|t| t.norm()).sum();
        let r = terms.iter().fold(Complex64::new(0.0, 0.0), |a, t| a + t).norm();
        if s == 0.0 {
            0.0
        } else {
            r / s
        }
    };
    let mut out = Vec::with_capacity(m.saturating_sub(1));
    if m >= 2 {
        out.push(rel(&[v.v[1] * e, -(1.0 - lam) * v.v[0]]));
    }
    for n in 2..m {
        let nf = n as f64;
        out.push(rel(&[
            v.v[n] * (0.5 * e * (nf * (nf + 1.0))),
            (lam - nf) * v.v[n - 1],
            -(v.v[n - 2] * (0.5 * e * (nf * (nf - 1.0)))),
        ]));
    }
    out
}

/// Largest entry of [`ode_residual_profile`]. Zero up to roundoff certifies
/// that the generating function solves its differential equation.
pub fn ode_residual(v: &CoefficientSequence) -> f64 {
    ode_residual_profile(v).into_iter().fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eigen::{balance, eigen_all};
    use crate::operator::build_truncated;
    use proptest::prelude::*;

    const REF_05: [f64; 5] =
        [1.1672345030601249, 2.9684447822260976, 5.4826776370039804, 8.7135448540103077, 12.661760180966936];

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn forward_hand_iterations() {
        for &e in &[0.3, 0.5, 1.0, 1.7] {
            let s = forward_run(e, c(1.0, 0.0), 5).unwrap();
            assert_eq!(s.get(1), c(1.0, 0.0));
            assert_eq!(s.get(2), c(0.0, 0.0));
            assert!((s.get(3) - c(1.0 / 3.0, 0.0)).norm() < 1e-15);
        }
        let s = forward_run(1.0, c(0.0, 0.0), 3).unwrap();
        assert_eq!(s.v, vec![c(1.0, 0.0); 3]);
        assert!(forward_run(0.5, c(1.0, 0.0), 1).is_err());
        assert!(forward_run(2.0, c(1.0, 0.0), 5).is_err());
    }

    #[test]
    fn forward_stops_at_overflow() {
        // Far from the spectrum the dominant solution grows without bound.
        let s = forward_run(0.05, c(-1e6, 0.0), 100_000).unwrap();
        assert!(s.len() < 100_000);
        assert!(s.v.iter().all(|z| z.re.is_finite()));
    }

    #[test]
    fn forward_residual_is_roundoff() {
        for &(e, l) in &[(0.5, c(3.3, 0.0)), (1.3, c(-2.0, 1.5)), (0.3, c(10.0, -4.0))] {
            let s = forward_run(e, l, 60).unwrap();
            assert!(ode_residual(&s) <= 1e-13, "{}", ode_residual(&s));
        }
    }

    #[test]
    fn perturbation_is_localized() {
        let mut s = forward_run(0.7, c(2.5, 0.0), 40).unwrap();
        s.v[19] *= 1.0 + 1e-3;
        let prof = ode_residual_profile(&s);
        let (argmax, max) =
            prof.iter().enumerate().fold((0, 0.0), |b, (i, &r)| if r > b.1 { (i, r) } else { b });
        // v_20 enters rows 19, 20 and 21, i.e. profile entries 18..=20.
        assert!((18..=20).contains(&argmax), "{argmax}");
        assert!(max > 1e-6);
        for (i, r) in prof.iter().enumerate() {
            if !(18..=20).contains(&i) {
                assert!(*r < 1e-13, "{i}: {r}");
            }
        }
    }

    #[test]
    fn backward_at_reference_eigenvalues() {
        let o = ShootingOptions::default();
        for &l in &REF_05 {
            let s = backward_minimal(0.5, c(l, 0.0), 450, 20, &o).unwrap();
            assert!(s.settled);
            let ic = (s.get(2) * 0.5 - (1.0 - l) * s.get(1)).norm();
            assert!(ic <= 1e-8, "{l}: {ic}");
        }
        let s = backward_minimal(0.5, c(0.5, 3.0), 450, 10, &o).unwrap();
        assert!((s.get(2) * 0.5 - (1.0 - c(0.5, 3.0)) * s.get(1)).norm() > 1e-2);
    }

    #[test]
    fn backward_matches_matrix_vector() {
        let t = build_truncated(0.5, 400).unwrap();
        let r = eigen_all(&balance(&t), true).unwrap();
        let p = &r.pairs[1];
        let s = backward_minimal(0.5, p.lambda, 900, 30, &ShootingOptions::default()).unwrap();
        let v0 = p.vector[0];
        for n in 1..=30 {
            let want = p.vector[n - 1] / v0;
            assert!((s.get(n) - want).norm() <= 1e-10, "{n}");
        }
        // Forward and backward agree at small n, where forward is stable.
        let f = forward_run(0.5, p.lambda, 12).unwrap();
        for n in 1..=12 {
            assert!((f.get(n) - s.get(n)).norm() <= 1e-8 * (1.0 + s.get(n).norm()));
        }
    }

    #[test]
    fn zero_seed_settles_slowly() {
        let o = ShootingOptions { seed: Seed::Zero, ..Default::default() };
        let s = backward_minimal(1.7, c(2.0, 0.0), 450, 10, &o).unwrap();
        assert!(!s.settled);
        let a = backward_minimal(1.7, c(2.0, 0.0), 450, 10, &ShootingOptions::default()).unwrap();
        assert!(a.settled);
        assert!(backward_minimal(0.5, c(1.0, 0.0), 40, 10, &o).is_err());
    }

    #[test]
    fn auto_doubles_until_settled() {
        let o = ShootingOptions { seed: Seed::Zero, max_doublings: 1, ..Default::default() };
        assert!(matches!(
            backward_minimal_auto(1.7, c(2.0, 0.0), 10, &o),
            Err(crate::Error::Numerical(NumericalError::BackwardUnsettled { .. }))
        ));
        let s = backward_minimal_auto(0.5, c(2.0, 0.0), 10, &ShootingOptions::default()).unwrap();
        assert!(s.settled);
    }

    #[test]
    fn vanishing_first_component_is_reported() {
        // v₁ (normalized at the start index) has a real zero near 3.18.
        let o = ShootingOptions::default();
        let v1 = |x: f64| {
            let (v, _, k) = first_two::<DoubleDouble>(0.5, c(x, 0.0), &o);
            libm::ldexp(v.re.to_f64(), k)
        };
        let (mut a, mut b) = (3.1, 3.25);
        assert_ne!(v1(a).signum(), v1(b).signum());
        for _ in 0..200 {
            let mid = 0.5 * (a + b);
            if v1(mid).signum() == v1(a).signum() {
                a = mid;
            } else {
                b = mid;
            }
        }
        let x = if v1(a).abs() < v1(b).abs() { a } else { b };
        assert!(shooting_residual_meromorphic(0.5, c(x, 0.0), &o).is_err());
        assert!(backward_minimal(0.5, c(x, 0.0), 450, 5, &o).is_err());
        // The continuous residual is fine there.
        assert!(shooting_residual(0.5, c(x, 0.0), &o).unwrap().norm() > 0.1);
    }

    #[test]
    fn residual_small_at_eigenvalues_large_between() {
        let o = ShootingOptions::default();
        for &l in &REF_05 {
            assert!(shooting_residual(0.5, c(l, 0.0), &o).unwrap().norm() <= 1e-8);
        }
        for w in REF_05.windows(2) {
            let mid = 0.5 * (w[0] + w[1]);
            assert!(shooting_residual(0.5, c(mid, 0.0), &o).unwrap().norm() >= 1e-3);
        }
    }

    #[test]
    fn residual_vanishes_at_matrix_eigenvalues() {
        let t = build_truncated(0.7, 1000).unwrap();
        let r = eigen_all(&balance(&t), false).unwrap();
        let o = ShootingOptions::default();
        // |F′| grows like the eigenvalue condition number, so rounding λ to
        // a double already leaves |F| ≈ 1e−7 at the sixth eigenvalue.
        for p in r.pairs.iter().take(5) {
            assert!(shooting_residual(0.7, p.lambda, &o).unwrap().norm() <= 1e-8, "{}", p.lambda);
        }
    }

    #[test]
    fn real_roots_match_reference() {
        let roots = find_real_roots(0.5, 0.1, 10.0, 60, &ShootingOptions::default()).unwrap();
        assert_eq!(roots.len(), 4, "{roots:?}");
        for (x, want) in roots.iter().zip(&REF_05) {
            assert!((x - want).abs() <= 1e-8 * want, "{x} {want}");
        }
        let none = find_real_roots(0.5, 3.2, 5.2, 20, &ShootingOptions::default()).unwrap();
        assert!(none.is_empty());
    }

    #[test]
    fn scan_upper_half_plane_finds_nothing() {
        let rect = ScanRect { re: (0.0, 12.0), im: (1.0, 4.0) };
        let r = complex_scan(0.5, rect, 6, 3, &ShootingOptions::default()).unwrap();
        assert!(r.roots.iter().all(|z| z.im_abs <= 1e-8), "{:?}", r.roots);
        assert!(r.roots.iter().all(|z| !(z.lambda.im >= 1.0)));
    }

    #[test]
    fn scan_is_conjugation_closed() {
        let rect = ScanRect { re: (0.5, 9.0), im: (-2.0, 2.0) };
        let r = complex_scan(0.5, rect, 5, 4, &ShootingOptions::default()).unwrap();
        assert!(!r.roots.is_empty());
        for z in &r.roots {
            let partner = r.roots.iter().any(|w| (w.lambda - z.lambda.conj()).norm() <= 1e-8);
            assert!(partner, "{:?}", z);
        }
    }

    #[test]
    fn generating_function_examples() {
        let s = forward_run(0.5, c(2.0, 0.0), 30).unwrap();
        assert_eq!(generating_eval(&s, c(0.0, 0.0)).value, c(0.0, 0.0));
        let mut e1 = CoefficientSequence { epsilon: 0.5, lambda: c(1.0, 0.0), v: vec![c(0.0, 0.0); 5], settled: true };
        e1.v[0] = c(1.0, 0.0);
        let g = generating_eval(&e1, c(0.5, 0.0));
        assert_eq!(g.value, c(0.5, 0.0));
        assert_eq!(g.tail, 0.0);

        let t = build_truncated(0.5, 1000).unwrap();
        let r = eigen_all(&balance(&t), true).unwrap();
        let seq = CoefficientSequence::from_pair(0.5, &r.pairs[0]);
        let g = generating_eval(&seq, c(1.0, 0.0));
        let l1: f64 = seq.v.iter().map(|z| z.norm()).sum();
        assert!(g.value.norm() <= l1);
        assert!(g.tail.is_finite() && g.tail < 1e-3 * l1);
    }

    #[test]
    fn matrix_eigenvectors_satisfy_recurrence() {
        let t = build_truncated(0.5, 500).unwrap();
        let r = eigen_all(&balance(&t), true).unwrap();
        for p in r.pairs.iter().take(5) {
            let s = CoefficientSequence::from_pair(0.5, p);
            assert!(ode_residual(&s) <= 1e-8, "{}", ode_residual(&s));
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]

        #[test]
        fn meromorphic_residual_is_analytic(re in 0.2f64..12.0, im in -3.0f64..3.0) {
            let o = ShootingOptions::default();
            let z = c(re, im);
            let f = |w: Complex64| shooting_residual_meromorphic(0.5, w, &o);
            let h = 1e-5;
            if let (Ok(a), Ok(b), Ok(cc), Ok(d)) = (f(z + h), f(z - h), f(z + c(0.0, h)), f(z - c(0.0, h))) {
                let dx = (a - b) / (2.0 * h);
                let dy = (cc - d) / (2.0 * h);
                // Cauchy–Riemann: ∂F/∂y = i·∂F/∂x.
                prop_assert!((dy - c(0.0, 1.0) * dx).norm() <= 1e-6 * (1.0 + dx.norm()), "{dx} {dy}");
            }
        }

        #[test]
        fn entire_residual_is_analytic(re in 0.0f64..12.0, im in -4.0f64..4.0) {
            let o = ShootingOptions::default();
            let z = c(re, im);
            let (_, _, k0) = entire_at::<DoubleDouble>(0.5, z, &o);
            let f = |w: Complex64| {
                let (s, _, k) = entire_at::<DoubleDouble>(0.5, w, &o);
                cx_to_f64(s * DoubleDouble::from_f64(libm::ldexp(1.0, k - k0)))
            };
            let h = 1e-5;
            let dx = (f(z + h) - f(z - h)) / (2.0 * h);
            let dy = (f(z + c(0.0, h)) - f(z - c(0.0, h))) / (2.0 * h);
            prop_assert!((dy - c(0.0, 1.0) * dx).norm() <= 1e-6 * dx.norm(), "{dx} {dy}");
        }

        #[test]
        fn residual_is_conjugate_symmetric(e in 0.2f64..1.9, re in -2.0f64..20.0, im in -4.0f64..4.0) {
            let o = ShootingOptions::default();
            let a = shooting_residual(e, c(re, im), &o).unwrap();
            let b = shooting_residual(e, c(re, -im), &o).unwrap();
            prop_assert!((a.conj() - b).norm() <= 1e-14 * (1.0 + a.norm()));
        }

        #[test]
        fn forward_satisfies_initial_condition(e in 0.05f64..1.95, re in -10.0f64..10.0, im in -5.0f64..5.0) {
            let l = c(re, im);
            let s = forward_run(e, l, 4).unwrap();
            let ic = (s.get(2) * e - (1.0 - l) * s.get(1)).norm();
            prop_assert!(ic <= 1e-12 * (1.0 + (1.0 - l).norm()));
        }
    }
}
