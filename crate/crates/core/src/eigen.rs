//! All eigenvalues of a truncated section, with optional eigenvectors.
//!
//! The balanced section has real diagonal and off-diagonal pairs of equal
//! magnitude and opposite sign. The complex diagonal similarity `diag(iⁿ)`
//! turns such a matrix into a complex-symmetric tridiagonal one with
//! off-diagonals `sqrt(sub·sup)`, which an implicitly shifted QL iteration
//! with complex orthogonal rotations reduces in `O(N²)`. Eigenvectors come
//! from inverse iteration on the balanced matrix itself.
//!
//! Eigenvalues of interior index are badly conditioned (the optimal
//! diagonal-scaling condition number reaches `10⁸` for the tenth eigenvalue
//! at `ε = 0.5`), so the default working precision is double-double.
//!
//! With [`Boundary::Asymptotic`] the last row is closed by the asymptotic
//! ratio of the decaying solution (see [`crate::closure`]) instead of being
//! cut off; the default section converges much faster in `N` that way.

use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use num_complex::{Complex, Complex64};

use crate::closure::{affine_closure, ratio_at_with_derivative};
use crate::error::{Error, NumericalError, ParamError};
use crate::operator::{OperatorKind, TridiagonalOperator};
use crate::real::{cabs, csqrt, cx_to_f64, l1, real, Cx, DoubleDouble, Precision, Real};

/// How the section is closed at row `N`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub enum Boundary {
    /// Plain leading section (`v_{N+1} = 0`).
    Truncated,
    /// `v_{N+1} = r_N(λ)·v_N` with the asymptotic ratio of the decaying
    /// solution, truncated at third order so that it stays affine in λ.
    #[default]
    Asymptotic,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EigenOptions {
    pub precision: Precision,
    pub boundary: Boundary,
    /// QL sweeps allowed per eigenvalue.
    pub max_sweeps: usize,
    /// Inverse iteration steps per eigenvector.
    pub inverse_steps: usize,
    /// Series order of the closure used to polish eigenvalues with
    /// `|λ| ≤ N/4` (asymptotic boundary only); 0 disables polishing.
    pub polish_order: usize,
}

impl Default for EigenOptions {
    fn default() -> Self {
        EigenOptions {
            precision: Precision::DoubleDouble,
            boundary: Boundary::Asymptotic,
            max_sweeps: 60,
            inverse_steps: 3,
            polish_order: 10,
        }
    }
}

/// Diagonally similar form `B = D⁻¹·T·D`.
#[derive(Clone, Debug, PartialEq)]
pub struct Balanced {
    op: TridiagonalOperator,
    scale: Vec<f64>,
}

impl Balanced {
    pub fn operator(&self) -> &TridiagonalOperator {
        &self.op
    }

    /// Diagonal of `D`; an eigenvector `y` of `B` maps to `D·y` for `T`.
    pub fn scale(&self) -> &[f64] {
        &self.scale
    }
}

/// Scales so that each off-diagonal pair has magnitude `sqrt(|sub·sup|)`.
pub fn balance(t: &TridiagonalOperator) -> Balanced {
    let n = t.size();
    let mut scale = vec![1.0; n];
    for i in 0..n.saturating_sub(1) {
        let (s, u) = (t.sub()[i], t.sup()[i]);
        let ratio = if s != 0.0 && u != 0.0 { libm::sqrt((s / u).abs()) } else { 1.0 };
        scale[i + 1] = scale[i] * ratio;
    }
    let sub = (0..n.saturating_sub(1)).map(|i| t.sub()[i] * scale[i] / scale[i + 1]).collect();
    let sup = (0..n.saturating_sub(1)).map(|i| t.sup()[i] * scale[i + 1] / scale[i]).collect();
    let op = TridiagonalOperator::from_parts(t.epsilon(), sub, t.diag().to_vec(), sup)
        .expect("balancing preserves shape and finiteness")
        .with_kind(t.kind());
    Balanced { op, scale }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EigenPair {
    pub lambda: Complex64,
    /// Unit 2-norm, first component real and non-negative; empty when
    /// vectors were not requested.
    pub vector: Vec<Complex64>,
    /// `‖T·v − λ·v‖₂` against the section that was solved (the closed one
    /// under [`Boundary::Asymptotic`]).
    pub residual: Option<f64>,
    pub stable: bool,
    pub decay_slope: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SpectrumResult {
    pub epsilon: f64,
    pub n: usize,
    pub boundary: Boundary,
    pub precision: Precision,
    /// Sorted by real part, then imaginary part.
    pub pairs: Vec<EigenPair>,
}

impl SpectrumResult {
    pub fn eigenvalues(&self) -> Vec<Complex64> {
        self.pairs.iter().map(|p| p.lambda).collect()
    }
}

fn cmp_complex(a: &Complex64, b: &Complex64) -> Ordering {
    a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im))
}

/// All eigenvalues (and optionally eigenvectors) with default options.
pub fn eigen_all(b: &Balanced, want_vectors: bool) -> Result<SpectrumResult, Error> {
    eigen_all_with(b, want_vectors, &EigenOptions::default())
}

pub fn eigen_all_with(
    b: &Balanced,
    want_vectors: bool,
    opts: &EigenOptions,
) -> Result<SpectrumResult, Error> {
    match opts.precision {
        Precision::Double => solve::<f64>(b, want_vectors, opts),
        Precision::DoubleDouble => solve::<DoubleDouble>(b, want_vectors, opts),
    }
}

/// Real tridiagonal data in working precision, possibly with a closed
/// last row, together with the sign that maps its spectrum back.
struct Section<R> {
    sub: Vec<R>,
    diag: Vec<R>,
    sup: Vec<R>,
    sign: R,
}

fn section<R: Real>(b: &Balanced, boundary: Boundary) -> Result<Section<R>, Error> {
    let op = &b.op;
    let sign = match (boundary, op.kind()) {
        (Boundary::Truncated, _) | (_, OperatorKind::Plus) => R::one(),
        (Boundary::Asymptotic, OperatorKind::Minus) => -R::one(),
        (Boundary::Asymptotic, OperatorKind::Custom) => {
            return Err(ParamError::Invalid(
                "the asymptotic closure needs a section of A+ or A-".into(),
            )
            .into())
        }
    };
    let conv = |xs: &[f64]| xs.iter().map(|&x| sign * R::from_f64(x)).collect::<Vec<R>>();
    let mut s = Section { sub: conv(op.sub()), diag: conv(op.diag()), sup: conv(op.sup()), sign };
    if op.kind() != OperatorKind::Custom {
        // Off-diagonals of A± are ±(ε/2)k(k+1) and balancing leaves them
        // alone. Their f64 rounding is amplified by eigenvalue condition
        // numbers near 1e7, so they are recomputed at working precision.
        let half = R::from_f64(op.epsilon()) * R::from_f64(0.5);
        for k in 1..op.size() {
            if b.scale[k] != b.scale[k - 1] {
                continue;
            }
            let mag = half * R::from_usize(k) * R::from_usize(k + 1);
            let fix = |x: R| if x < R::zero() { -mag } else { mag };
            s.sub[k - 1] = fix(s.sub[k - 1]);
            s.sup[k - 1] = fix(s.sup[k - 1]);
        }
    }
    if boundary == Boundary::Asymptotic {
        let n = op.size();
        let cl = affine_closure(R::from_f64(op.epsilon()), n);
        // Row N: sub·v_{N−1} + (d0 + d1·λ)·v_N = λ·v_N.
        let w = R::one() / (R::one() - cl.d1);
        s.diag[n - 1] = cl.d0 * w;
        if n > 1 {
            s.sub[n - 2] = s.sub[n - 2] * w;
        }
    }
    Ok(s)
}

fn solve<R: Real>(
    b: &Balanced,
    want_vectors: bool,
    opts: &EigenOptions,
) -> Result<SpectrumResult, Error> {
    let op = &b.op;
    let n = op.size();
    let sec = section::<R>(b, opts.boundary)?;
    let mut d: Vec<Cx<R>> = sec.diag.iter().map(|&x| real(x)).collect();
    let mut e: Vec<Cx<R>> = (0..n)
        .map(|i| if i + 1 < n { csqrt(real(sec.sub[i] * sec.sup[i])) } else { real(R::zero()) })
        .collect();
    complex_symmetric_ql(&mut d, &mut e, opts.max_sweeps)?;

    // Polished eigenvalues belong to the section closed at full order, whose
    // last diagonal depends on λ; their vectors are computed against it.
    let eps = R::from_f64(op.epsilon());
    let mut polished = vec![false; n];
    let plain = if opts.boundary == Boundary::Asymptotic && opts.polish_order > 0 {
        let t = section::<R>(b, Boundary::Truncated)?;
        let flip = |xs: Vec<R>| xs.into_iter().map(|x| x * sec.sign).collect::<Vec<R>>();
        let plain = Section { sub: flip(t.sub), diag: flip(t.diag), sup: flip(t.sup), sign: sec.sign };
        let limit = R::from_usize(n) * R::from_f64(0.25);
        // Near the top of the polished range the affine closure can merge
        // two real eigenvalues into a complex pair, so starts may be far off.
        // Polishing from the bottom up with the accepted roots deflated keeps
        // such starts from landing on a root that is already taken.
        let mut order: Vec<usize> = (0..n).filter(|&i| cabs(d[i]) <= limit).collect();
        order.sort_by(|&a, &b| cabs(d[a]).partial_cmp(&cabs(d[b])).unwrap_or(Ordering::Equal));
        let mut found: Vec<Cx<R>> = Vec::with_capacity(order.len());
        for i in order {
            // The continuant is real on the real axis, so a real start
            // keeps Newton there; the complex start is the fallback.
            let tries = [real(d[i].re), d[i]];
            let hit = tries[..if d[i].im == R::zero() { 1 } else { 2 }]
                .iter()
                .find_map(|&z| polish(&plain, eps, z, opts.polish_order, &found));
            if let Some(p) = hit {
                d[i] = p;
                polished[i] = true;
                found.push(p);
            }
        }
        Some(plain)
    } else {
        None
    };

    let norm = sec_norm(&sec);
    let mut pairs = Vec::with_capacity(n);
    for (idx, mu) in d.iter().enumerate() {
        let lambda = cx_to_f64(*mu * sec.sign);
        let (vector, residual) = if want_vectors {
            let (target, last) = match &plain {
                Some(p) if polished[idx] => {
                    (p, Some(closed_last(eps, *mu, n, opts.polish_order).0))
                }
                _ => (&sec, None),
            };
            let (y, res) = inverse_iteration(target, last, *mu, norm, opts.inverse_steps)
                .ok_or(NumericalError::InverseIteration { index: idx })?;
            let (x, res) = to_original(&y, &res, b.scale());
            (x, Some(res))
        } else {
            (Vec::new(), None)
        };
        pairs.push(EigenPair { lambda, vector, residual, stable: false, decay_slope: None });
    }
    pair_conjugates(&mut pairs);
    pairs.sort_by(|a, b| cmp_complex(&a.lambda, &b.lambda));
    Ok(SpectrumResult {
        epsilon: op.epsilon(),
        n,
        boundary: opts.boundary,
        precision: opts.precision,
        pairs,
    })
}

/// Newton iteration on the characteristic continuant of the section whose
/// last diagonal is `N − (ε/2)N(N+1)·r_N(λ)` with the closure series of the
/// given order. With `p_k` the leading principal minors of `λ − T`,
/// `ρ_k = p_k/p_{k−1}` and `σ_k = p_k′/p_k` obey
///
/// ```text
/// ρ_k = (λ − a_k) − π_{k−1}/ρ_{k−1}
/// σ_k = [(1 − a_k′) + (λ − a_k)σ_{k−1} − π_{k−1}σ_{k−2}/ρ_{k−1}] / ρ_k
/// ```
///
/// where `π_k` is the product of the off-diagonal pair between rows `k` and
/// `k+1`. The step is `−1/σ_N`. Returns `None` if the iteration wanders.
fn polish<R: Real>(
    plain: &Section<R>,
    eps: R,
    start: Cx<R>,
    order: usize,
    found: &[Cx<R>],
) -> Option<Cx<R>> {
    let n = plain.diag.len();
    let zero = real(R::zero());
    let one = real(R::one());
    let tol = R::unit_roundoff() * R::from_f64(16.0);
    let mut lam = start;
    let mut last_step = R::from_f64(f64::INFINITY);
    for _ in 0..40 {
        let (a_last, da_last) = closed_last(eps, lam, n, order);
        let mut rho_prev = one; // ρ_0
        let mut sig_prev2 = zero; // σ_{k−2}
        let mut sig_prev = zero; // σ_{k−1}
        let mut sig = zero;
        for k in 0..n {
            let (a, da) = if k + 1 == n { (a_last, da_last) } else { (real(plain.diag[k]), zero) };
            let shifted = lam - a;
            let rho;
            if k == 0 {
                rho = shifted;
                sig = (one - da) / rho;
            } else {
                let pi = plain.sub[k - 1] * plain.sup[k - 1];
                let q = inv(rho_prev);
                rho = shifted - q * pi;
                sig = ((one - da) + shifted * sig_prev - sig_prev2 * q * pi) * inv(rho);
            }
            if !(rho.re.is_finite() && rho.im.is_finite()) {
                return None;
            }
            if l1(rho) == R::zero() {
                // An exact root of the full continuant.
                return if k + 1 == n { Some(lam) } else { None };
            }
            rho_prev = rho;
            sig_prev2 = sig_prev;
            sig_prev = sig;
        }
        for &r in found {
            sig = sig - inv(lam - r);
        }
        let step = -inv(sig);
        let size = l1(step);
        if !size.is_finite() || l1(lam + step - start) > R::from_f64(0.5) * (R::one() + l1(start)) {
            return None;
        }
        lam = lam + step;
        let scale = R::one() + l1(lam);
        if size <= tol * scale {
            return Some(lam);
        }
        if size >= last_step && size <= R::from_f64(1e-12) * scale {
            // Stalled at roundoff level.
            return Some(lam);
        }
        last_step = size;
    }
    None
}

/// Last diagonal `N − (ε/2)N(N+1)·r_N(λ)` of the closed section and its
/// λ-derivative. A reflected section is solved as `−A₋ = A₊`, so the same
/// expression serves both kinds.
fn closed_last<R: Real>(eps: R, lam: Cx<R>, n: usize, order: usize) -> (Cx<R>, Cx<R>) {
    let nn = R::from_usize(n);
    let w = eps * R::from_f64(0.5) * nn * (nn + R::one());
    let (r, dr) = ratio_at_with_derivative(eps, lam, n, order);
    (real(nn) - r * w, -(dr * w))
}

/// The section is real, so non-real eigenvalues come in conjugate pairs;
/// complex arithmetic breaks that symmetry at roundoff level. Partners
/// closer to each other's conjugate than `10⁻³·|Im λ|` are replaced by their
/// exact conjugate mean. Eigenvalues without such a partner are untouched.
fn pair_conjugates(pairs: &mut [EigenPair]) {
    let n = pairs.len();
    let mut used = vec![false; n];
    let mut order: Vec<usize> = (0..n).filter(|&i| pairs[i].lambda.im > 0.0).collect();
    order.sort_by(|&a, &b| pairs[b].lambda.im.total_cmp(&pairs[a].lambda.im));
    for i in order {
        let li = pairs[i].lambda;
        let best = (0..n)
            .filter(|&j| !used[j] && pairs[j].lambda.im < 0.0)
            .map(|j| (j, (pairs[j].lambda - li.conj()).norm()))
            .min_by(|a, b| a.1.total_cmp(&b.1));
        if let Some((j, dist)) = best {
            if dist <= 1e-3 * li.im {
                let lj = pairs[j].lambda;
                let re = 0.5 * (li.re + lj.re);
                let im = 0.5 * (li.im - lj.im);
                pairs[i].lambda = Complex64::new(re, im);
                pairs[j].lambda = Complex64::new(re, -im);
                used[i] = true;
                used[j] = true;
            }
        }
    }
}

fn sec_norm<R: Real>(s: &Section<R>) -> R {
    let n = s.diag.len();
    let mut m = R::zero();
    for i in 0..n {
        let mut r = s.diag[i].abs();
        if i > 0 {
            r = r + s.sub[i - 1].abs();
        }
        if i + 1 < n {
            r = r + s.sup[i].abs();
        }
        m = m.max(r);
    }
    m
}

/// Implicit QL on a complex-symmetric tridiagonal matrix (diagonal `d`,
/// off-diagonal `e[i]` coupling `i` and `i + 1`, `e[n−1]` ignored).
/// Eigenvalues are left in `d`.
fn complex_symmetric_ql<R: Real>(
    d: &mut [Cx<R>],
    e: &mut [Cx<R>],
    max_sweeps: usize,
) -> Result<(), NumericalError> {
    let n = d.len();
    if n == 0 {
        return Ok(());
    }
    e[n - 1] = real(R::zero());
    let u = R::unit_roundoff();
    let two = R::from_f64(2.0);
    let one = real(R::one());
    let mut saved_d = Vec::new();
    let mut saved_e = Vec::new();
    for l in 0..n {
        let mut sweeps = 0;
        let mut exceptional = 0u32;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = l1(d[m]) + l1(d[m + 1]);
                if l1(e[m]) <= u * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            sweeps += 1;
            if sweeps > max_sweeps {
                return Err(NumericalError::NoConvergence { index: l, iterations: sweeps - 1 });
            }
            saved_d.clear();
            saved_d.extend_from_slice(&d[l..=m]);
            saved_e.clear();
            saved_e.extend_from_slice(&e[l..=m]);

            // Wilkinson-type shift from the leading 2×2 block.
            let mut g = (d[l + 1] - d[l]) / (e[l] * two);
            let mut r = csqrt(g * g + one);
            let gr = if l1(g + r) >= l1(g - r) { g + r } else { g - r };
            let mut shift = d[l] - e[l] / gr;
            if exceptional > 0 {
                // Perturb the shift off an isotropic rotation.
                let k = R::from_f64(0.75 * exceptional as f64);
                shift = shift + Complex::new(k * l1(e[l]), k * l1(e[l]) * R::from_f64(0.5));
            }
            g = d[m] - shift;
            let mut s = one;
            let mut c = one;
            let mut p = real(R::zero());
            let mut isotropic = false;
            let mut deflated_early = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let bb = c * e[i];
                r = csqrt(f * f + g * g);
                let scale = l1(f) + l1(g);
                if l1(r) <= u * scale * R::from_f64(64.0) {
                    if scale == R::zero() {
                        // Genuine zero: the block splits.
                        d[i + 1] = d[i + 1] - p;
                        e[m] = real(R::zero());
                        deflated_early = true;
                    } else {
                        isotropic = true;
                    }
                    break;
                }
                e[i + 1] = r;
                let rinv = inv(r);
                s = f * rinv;
                c = g * rinv;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + c * bb * two;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - bb;
            }
            if isotropic {
                d[l..=m].copy_from_slice(&saved_d);
                e[l..=m].copy_from_slice(&saved_e);
                exceptional += 1;
                continue;
            }
            if deflated_early {
                continue;
            }
            d[l] = d[l] - p;
            e[l] = g;
            e[m] = real(R::zero());
            if sweeps % 20 == 0 {
                exceptional += 1;
            }
        }
    }
    Ok(())
}

#[inline]
fn inv<R: Real>(z: Cx<R>) -> Cx<R> {
    let den = z.re * z.re + z.im * z.im;
    Complex::new(z.re / den, -z.im / den)
}

/// Inverse iteration on the real tridiagonal section shifted by `mu`.
/// Returns the unit vector (balanced basis) and the residual vector.
fn inverse_iteration<R: Real>(
    s: &Section<R>,
    last: Option<Cx<R>>,
    mu: Cx<R>,
    norm: R,
    steps: usize,
) -> Option<(Vec<Cx<R>>, Vec<Cx<R>>)> {
    let n = s.diag.len();
    let zero = real(R::zero());
    // Diagonal, with an optional (λ-dependent, hence complex) last entry.
    let diag = |i: usize| match last {
        Some(z) if i + 1 == n => z,
        _ => real(s.diag[i]),
    };
    // LU with partial pivoting of (A − μI), LAPACK gttrf layout.
    let mut dl: Vec<Cx<R>> = s.sub.iter().map(|&x| real(x)).collect();
    let mut dg: Vec<Cx<R>> = (0..n).map(|i| diag(i) - mu).collect();
    let mut du: Vec<Cx<R>> = s.sup.iter().map(|&x| real(x)).collect();
    let mut du2 = vec![zero; n.saturating_sub(2)];
    let mut swap = vec![false; n.saturating_sub(1)];
    let tiny = norm * R::unit_roundoff();
    for i in 0..n.saturating_sub(1) {
        if l1(dg[i]) >= l1(dl[i]) {
            if l1(dg[i]) == R::zero() {
                dg[i] = real(tiny);
            }
            let fact = dl[i] / dg[i];
            dl[i] = fact;
            dg[i + 1] = dg[i + 1] - fact * du[i];
        } else {
            let fact = dg[i] / dl[i];
            dg[i] = dl[i];
            dl[i] = fact;
            let temp = du[i];
            du[i] = dg[i + 1];
            dg[i + 1] = temp - fact * dg[i + 1];
            if i + 2 < n {
                du2[i] = du[i + 1];
                du[i + 1] = -(fact * du[i + 1]);
            }
            swap[i] = true;
        }
    }
    if l1(dg[n - 1]) == R::zero() {
        dg[n - 1] = real(tiny);
    }

    let mut x = vec![real(R::one()); n];
    for _ in 0..steps.max(1) {
        // Forward: L with row interchanges.
        for i in 0..n.saturating_sub(1) {
            if swap[i] {
                x.swap(i, i + 1);
            }
            let t = dl[i] * x[i];
            x[i + 1] = x[i + 1] - t;
        }
        // Back: U with two superdiagonals.
        for i in (0..n).rev() {
            let mut t = x[i];
            if i + 1 < n {
                t = t - du[i] * x[i + 1];
            }
            if i + 2 < n {
                t = t - du2[i] * x[i + 2];
            }
            x[i] = t / dg[i];
        }
        let nrm = x.iter().fold(R::zero(), |a, z| a + z.re * z.re + z.im * z.im).sqrt();
        if !(nrm.is_finite() && nrm > R::zero()) {
            return None;
        }
        let k = R::one() / nrm;
        for z in x.iter_mut() {
            *z = *z * k;
        }
    }
    let res = (0..n)
        .map(|i| {
            let mut y = x[i] * (diag(i) - mu);
            if i > 0 {
                y = y + x[i - 1] * s.sub[i - 1];
            }
            if i + 1 < n {
                y = y + x[i + 1] * s.sup[i];
            }
            y
        })
        .collect();
    Some((x, res))
}

/// Maps a balanced-basis vector and residual back through `D`, normalizes,
/// and fixes the phase.
fn to_original<R: Real>(y: &[Cx<R>], res: &[Cx<R>], scale: &[f64]) -> (Vec<Complex64>, f64) {
    let xs: Vec<Cx<R>> = y.iter().zip(scale).map(|(z, &d)| *z * R::from_f64(d)).collect();
    let rs: Vec<Cx<R>> = res.iter().zip(scale).map(|(z, &d)| *z * R::from_f64(d)).collect();
    let nrm = xs.iter().fold(R::zero(), |a, z| a + z.re * z.re + z.im * z.im).sqrt();
    let rn = rs.iter().fold(R::zero(), |a, z| a + z.re * z.re + z.im * z.im).sqrt();
    let big = xs.iter().fold(R::zero(), |m, z| m.max(cabs(*z)));
    let anchor = if cabs(xs[0]) > big * R::from_f64(1e-8) {
        xs[0]
    } else {
        *xs.iter().find(|z| cabs(**z) == big).expect("non-empty vector")
    };
    // Multiply by conj(anchor)/|anchor| and divide by the norm.
    let a = cabs(anchor);
    let phase = Complex::new(anchor.re / a, -anchor.im / a);
    let k = R::one() / nrm;
    let mut v = xs.iter().map(|z| cx_to_f64(*z * phase * k)).collect::<Vec<_>>();
    if let Some(i) = xs.iter().position(|z| *z == anchor) {
        v[i] = Complex64::new((a * k).to_f64(), 0.0);
    }
    (v, (rn * k).to_f64())
}

/// Pairs of `small` whose eigenvalue has a partner in `large` within
/// `tol·(1 + |λ|)`; the returned pairs are marked stable.
pub fn filter_stable(small: &SpectrumResult, large: &SpectrumResult, tol: f64) -> Vec<EigenPair> {
    let mut sorted: Vec<Complex64> = large.eigenvalues();
    sorted.sort_by(cmp_complex);
    small
        .pairs
        .iter()
        .filter(|p| {
            let gate = tol * (1.0 + p.lambda.norm());
            let start = sorted.partition_point(|z| z.re < p.lambda.re - gate);
            sorted[start..]
                .iter()
                .take_while(|z| z.re <= p.lambda.re + gate)
                .any(|z| (z - p.lambda).norm() <= gate)
        })
        .map(|p| EigenPair { stable: true, ..p.clone() })
        .collect()
}

/// Both comparisons between the spectra of a section of `A₊` and its
/// reflected `A₋` section, as maximal nearest-neighbour distances.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ReflectionComparison {
    /// `spec(A₋)` against `spec(A₊)`.
    pub same: f64,
    /// `spec(A₋)` against `−spec(A₊)`.
    pub negated: f64,
}

pub fn compare_reflection(
    t: &TridiagonalOperator,
    opts: &EigenOptions,
) -> Result<ReflectionComparison, Error> {
    let plus = eigen_all_with(&balance(t), false, opts)?.eigenvalues();
    let minus = eigen_all_with(&balance(&crate::operator::reflect_minus(t)), false, opts)?
        .eigenvalues();
    let dist = |targets: &[Complex64]| {
        minus
            .iter()
            .map(|m| targets.iter().map(|z| (z - m).norm()).fold(f64::INFINITY, f64::min))
            .fold(0.0, f64::max)
    };
    let negated: Vec<Complex64> = plus.iter().map(|z| -z).collect();
    Ok(ReflectionComparison { same: dist(&plus), negated: dist(&negated) })
}
