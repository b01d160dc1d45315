//! Eigenvector decay, the weighted sup norm `‖v‖_{∞,c} = sup |v_n|·n^c`,
//! ℓ¹ summability, and the cross-route comparison table.
//!
//! Sequences are 0-based slices holding `v_1, v_2, …`; index ranges in this
//! module are 1-based and inclusive.

use alloc::vec::Vec;

use num_complex::Complex64;

use crate::eigen::EigenPair;
use crate::error::{NumericalError, ParamError, Result};

/// Default fit window `[10, N/4]`. Below 10 the power law has not set in;
/// above `N/4` the truncation boundary leaks in.
pub fn default_fit_range(n: usize) -> (usize, usize) {
    (10, n / 4)
}

pub fn weighted_sup_norm(v: &[Complex64], c: f64) -> f64 {
    v.iter()
        .enumerate()
        .map(|(i, z)| z.norm() * libm::pow((i + 1) as f64, c))
        .fold(0.0, f64::max)
}

/// Least-squares slope of `ln|v_n|` against `ln n` over `range`, skipping
/// entries that are zero or subnormal.
pub fn decay_slope(v: &[Complex64], range: (usize, usize)) -> Result<f64> {
    let (lo, hi) = (range.0.max(1), range.1.min(v.len()));
    let pts: Vec<(f64, f64)> = (lo..=hi)
        .filter_map(|n| {
            let a = v[n - 1].norm();
            (a >= f64::MIN_POSITIVE && a.is_finite()).then(|| (libm::log(n as f64), libm::log(a)))
        })
        .collect();
    if pts.len() < 5 {
        return Err(NumericalError::UnreliableFit { points: pts.len() }.into());
    }
    Ok(fit_line(&pts).0)
}

/// Ordinary least squares `y = s·x + t`; returns `(s, t)`. With no spread in
/// `x` the slope is 0 and the line passes through the mean.
fn fit_line(pts: &[(f64, f64)]) -> (f64, f64) {
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let s = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    (s, my - s * mx)
}

/// Empirical envelope `‖v‖_{∞,c} ≤ b·|λ|^m·‖v‖₂` over a set of eigenpairs.
#[derive(Clone, Debug, PartialEq)]
pub struct DecayBound {
    /// Weight exponent `1 + 1/ε`.
    pub c: f64,
    pub b_fit: f64,
    pub m_fit: f64,
    /// `‖v‖_{∞,c}/‖v‖₂` per input pair, in input order.
    pub norms: Vec<f64>,
    /// Set when `|λ|` spans less than a decade, so that `m_fit` says little
    /// beyond the sampled range (and nothing at all for a single point).
    pub extrapolation_unsafe: bool,
}

/// The slope `m` comes from least squares in log-log coordinates; `b` is then
/// raised until the line passes over every point, touching the highest one.
pub fn davies_fit(pairs: &[EigenPair], epsilon: f64) -> Result<DecayBound> {
    if pairs.is_empty() {
        return Err(ParamError::Invalid("davies_fit needs at least one eigenpair".into()).into());
    }
    let c = 1.0 + 1.0 / epsilon;
    let mut norms = Vec::with_capacity(pairs.len());
    let mut pts = Vec::with_capacity(pairs.len());
    for p in pairs {
        let l2 = libm::sqrt(p.vector.iter().map(|z| z.norm_sqr()).sum::<f64>());
        let lam = p.lambda.norm();
        if l2 == 0.0 || lam == 0.0 {
            return Err(ParamError::Invalid("zero eigenvector or eigenvalue".into()).into());
        }
        let w = weighted_sup_norm(&p.vector, c) / l2;
        norms.push(w);
        pts.push((libm::log(lam), libm::log(w)));
    }
    let (m, _) = fit_line(&pts);
    let log_b = pts.iter().map(|&(x, y)| y - m * x).fold(f64::NEG_INFINITY, f64::max);
    let (lo, hi) = pts.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| {
        (lo.min(p.0), hi.max(p.0))
    });
    Ok(DecayBound {
        c,
        b_fit: libm::exp(log_b),
        m_fit: m,
        norms,
        extrapolation_unsafe: hi - lo < core::f64::consts::LN_10,
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Ell1Tail {
    /// `Σ|v_n|` over the computed indices.
    pub sum: f64,
    /// Bound on `Σ_{n>N}|v_n|` from the fitted power law; infinite when the
    /// fit is not summable or not available.
    pub tail: f64,
    /// The fitted slope, when there were enough points.
    pub slope: Option<f64>,
}

impl Ell1Tail {
    pub fn summable(&self) -> bool {
        self.tail.is_finite()
    }
}

/// ℓ¹ sum and tail. The decay exponent `s` is fitted over the default
/// window (the whole sequence when that window is too short); the tail is
/// the integral comparison `∫_N^∞ A·x^s dx = A·N^{s+1}/(−s−1)`, where `A`
/// is the smallest constant with `|v_n| ≤ A·n^s` on the upper half of the
/// sequence. A sequence ending in exact zeros has no tail.
pub fn ell1_tail(v: &[Complex64]) -> Ell1Tail {
    let n = v.len();
    let sum = v.iter().map(|z| z.norm()).sum();
    if n == 0 || v[n - 1].norm() == 0.0 {
        return Ell1Tail { sum, tail: 0.0, slope: None };
    }
    let slope = decay_slope(v, default_fit_range(n)).or_else(|_| decay_slope(v, (1, n))).ok();
    let tail = match slope {
        Some(s) if s < -1.0 => {
            let a = (n / 2 + 1..=n)
                .map(|k| v[k - 1].norm() * libm::pow(k as f64, -s))
                .fold(0.0, f64::max);
            a * libm::pow(n as f64, s + 1.0) / (-s - 1.0)
        }
        _ => f64::INFINITY,
    };
    Ell1Tail { sum, tail, slope }
}

/// Relative difference `|x − y|/max(|x|, |y|)`, zero when both vanish.
pub fn relative_difference(x: f64, y: f64) -> f64 {
    let m = x.abs().max(y.abs());
    if m == 0.0 {
        0.0
    } else {
        (x - y).abs() / m
    }
}

/// Matching tolerance for cross reports, deliberately loose so that
/// near-misses show up as large discrepancies rather than unmatched rows.
pub const MATCH_TOL: f64 = 1e-4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Route {
    Matrix,
    Shooting,
    SturmLiouville,
    Connection,
}

impl Route {
    pub fn name(self) -> &'static str {
        match self {
            Route::Matrix => "matrix",
            Route::Shooting => "shooting",
            Route::SturmLiouville => "sturm_liouville",
            Route::Connection => "connection",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CrossRow {
    pub lambda_matrix: Complex64,
    pub lambda_shooting: Option<f64>,
    pub lambda_sl: Option<f64>,
    /// `|b|/|a|` of the connection fit at this eigenvalue.
    pub connection: Option<f64>,
    pub decay_slope: Option<f64>,
    /// Largest pairwise relative difference among the available eigenvalues.
    pub discrepancy: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Unmatched {
    pub route: Route,
    pub lambda: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CrossReport {
    pub epsilon: f64,
    pub rows: Vec<CrossRow>,
    pub unmatched: Vec<Unmatched>,
}

impl CrossReport {
    /// Largest discrepancy over the first `k` rows.
    pub fn max_discrepancy(&self, k: usize) -> f64 {
        self.rows.iter().take(k).map(|r| r.discrepancy).fold(0.0, f64::max)
    }
}

/// Greedy nearest-neighbour matching in ascending order of the matrix
/// eigenvalues; each candidate is used at most once. `connection` holds
/// `(λ, |b|/|a|)` samples, matched on λ.
pub fn build_cross_report(
    epsilon: f64,
    matrix: &[EigenPair],
    shooting: &[f64],
    sl: &[f64],
    connection: &[(f64, f64)],
) -> CrossReport {
    let mut pairs: Vec<&EigenPair> = matrix.iter().collect();
    pairs.sort_by(|a, b| {
        a.lambda.re.total_cmp(&b.lambda.re).then(a.lambda.im.total_cmp(&b.lambda.im))
    });
    let mut used_sh = alloc::vec![false; shooting.len()];
    let mut used_sl = alloc::vec![false; sl.len()];
    let mut used_cn = alloc::vec![false; connection.len()];
    let mut rows = Vec::with_capacity(pairs.len());
    for p in pairs {
        let x = p.lambda.re;
        let sh = take_nearest(x, shooting.iter().copied(), &mut used_sh).map(|i| shooting[i]);
        let s = take_nearest(x, sl.iter().copied(), &mut used_sl).map(|i| sl[i]);
        let cn = take_nearest(x, connection.iter().map(|c| c.0), &mut used_cn)
            .map(|i| connection[i].1);
        let vals: Vec<f64> = [Some(x), sh, s].into_iter().flatten().collect();
        let mut discrepancy: f64 = 0.0;
        for (i, a) in vals.iter().enumerate() {
            for b in &vals[i + 1..] {
                discrepancy = discrepancy.max(relative_difference(*a, *b));
            }
        }
        rows.push(CrossRow {
            lambda_matrix: p.lambda,
            lambda_shooting: sh,
            lambda_sl: s,
            connection: cn,
            decay_slope: p.decay_slope,
            discrepancy,
        });
    }
    let mut unmatched = Vec::new();
    let leftovers = [
        (Route::Shooting, shooting.to_vec(), used_sh),
        (Route::SturmLiouville, sl.to_vec(), used_sl),
        (Route::Connection, connection.iter().map(|c| c.0).collect(), used_cn),
    ];
    for (route, xs, used) in leftovers {
        for (x, u) in xs.into_iter().zip(used) {
            if !u {
                unmatched.push(Unmatched { route, lambda: x });
            }
        }
    }
    CrossReport { epsilon, rows, unmatched }
}

fn take_nearest(x: f64, ys: impl Iterator<Item = f64>, used: &mut [bool]) -> Option<usize> {
    let best = ys
        .enumerate()
        .filter(|(i, _)| !used[*i])
        .map(|(i, y)| (i, relative_difference(x, y)))
        .min_by(|a, b| a.1.total_cmp(&b.1))?;
    if best.1 <= MATCH_TOL {
        used[best.0] = true;
        Some(best.0)
    } else {
        None
    }
}
