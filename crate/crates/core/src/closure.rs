//! Asymptotic ratio of the minimal (ℓ²) solution of the recurrence.
//!
//! Writing the recurrence at row `n` with `x = 1/n` and `r_n = v_{n+1}/v_n`
//! gives
//!
//! ```text
//! (ε/2)(1+x)·r_n·r_{n−1} + (λx² − x)·r_{n−1} − (ε/2)(1−x) = 0.
//! ```
//!
//! Substituting `r_n = Σ c_k x^k` and `r_{n−1} = Σ c_k x^k (1−x)^{−k}` and
//! matching powers of `x` fixes `c_0 = −1` on the minimal branch (the other
//! root, `+1`, is the growing solution) and then each `c_m` linearly, since
//! its coefficient at order `m` is `−ε`.
//!
//! A plain section implicitly sets `v_{N+1} = 0`, which mixes in the growing
//! solution with relative weight `N^{−2/ε}`; replacing `v_{N+1}` by
//! `r_N·v_N` removes that error to high order.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex;

use crate::real::{Cx, Real};

/// Series order used by the shooting seeds.
pub const DEFAULT_ORDER: usize = 8;

/// Value and λ-derivative.
#[derive(Clone, Copy, Debug)]
struct Dual<R: Real> {
    v: Cx<R>,
    d: Cx<R>,
}

impl<R: Real> Dual<R> {
    fn zero() -> Self {
        let z = Complex::new(R::zero(), R::zero());
        Dual { v: z, d: z }
    }

    fn konst(v: Cx<R>) -> Self {
        Dual { v, d: Complex::new(R::zero(), R::zero()) }
    }

    fn add(self, o: Self) -> Self {
        Dual { v: self.v + o.v, d: self.d + o.d }
    }

    fn sub(self, o: Self) -> Self {
        Dual { v: self.v - o.v, d: self.d - o.d }
    }

    fn mul(self, o: Self) -> Self {
        Dual { v: self.v * o.v, d: self.d * o.v + self.v * o.d }
    }

    fn scale(self, s: R) -> Self {
        Dual { v: self.v * s, d: self.d * s }
    }
}

fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut b = 1.0;
    for i in 0..k {
        b = b * (n - i) as f64 / (i + 1) as f64;
    }
    b
}

fn series_dual<R: Real>(epsilon: R, lambda: Cx<R>, order: usize) -> Vec<Dual<R>> {
    let one = R::one();
    let half_eps = epsilon * R::from_f64(0.5);
    let lam = Dual { v: lambda, d: Complex::new(one, R::zero()) };
    let mut c = vec![Dual::zero(); order + 1];
    c[0] = Dual::konst(Complex::new(-one, R::zero()));
    let mut b = vec![Dual::zero(); order + 1];
    for m in 1..=order {
        // Coefficients of r_{n−1} with c_m still zero.
        b[0] = c[0];
        for j in 1..=m {
            let mut acc = Dual::zero();
            for k in 1..=j {
                acc = acc.add(c[k].scale(R::from_f64(binomial(j - 1, j - k))));
            }
            b[j] = acc;
        }
        let conv = |p: usize| {
            (0..=p).fold(Dual::zero(), |acc, i| acc.add(c[i].mul(b[p - i])))
        };
        let mut e = conv(m).add(conv(m - 1)).scale(half_eps).sub(b[m - 1]);
        if m >= 2 {
            e = e.add(lam.mul(b[m - 2]));
        }
        if m == 1 {
            e = e.add(Dual::konst(Complex::new(half_eps, R::zero())));
        }
        c[m] = e.scale(one / epsilon);
    }
    c
}

/// Coefficients `c_0..=c_order` of `v_{n+1}/v_n ≈ Σ c_k n^{−k}`.
pub fn ratio_series<R: Real>(epsilon: R, lambda: Cx<R>, order: usize) -> Vec<Cx<R>> {
    series_dual(epsilon, lambda, order).into_iter().map(|d| d.v).collect()
}

/// Ratio and its λ-derivative at index `n`.
pub fn ratio_at_with_derivative<R: Real>(
    epsilon: R,
    lambda: Cx<R>,
    n: usize,
    order: usize,
) -> (Cx<R>, Cx<R>) {
    let c = series_dual(epsilon, lambda, order);
    let x = R::one() / R::from_usize(n);
    // Horner in x.
    let mut acc = Dual::zero();
    for ck in c.iter().rev() {
        acc = acc.scale(x).add(*ck);
    }
    (acc.v, acc.d)
}

/// Minimal-solution ratio `v_{n+1}/v_n` at index `n`.
pub fn ratio_at<R: Real>(epsilon: R, lambda: Cx<R>, n: usize, order: usize) -> Cx<R> {
    ratio_at_with_derivative(epsilon, lambda, n, order).0
}

/// Closed last row of an `M×M` section: the diagonal becomes
/// `M − (ε/2)M(M+1)·r_M(λ)`. Truncated at order 3 the series is affine in
/// λ, `d_M(λ) = d0 + d1·λ`, which keeps the closed section a standard
/// eigenproblem after scaling row `M` by `1/(1 − d1)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AffineClosure<R> {
    pub d0: R,
    pub d1: R,
}

pub fn affine_closure<R: Real>(epsilon: R, m: usize) -> AffineClosure<R> {
    let zero = R::zero();
    let diag_at = |lam: R| {
        let r = ratio_at(epsilon, Complex::new(lam, zero), m, 3);
        let mm = R::from_usize(m);
        mm - epsilon * R::from_f64(0.5) * mm * (mm + R::one()) * r.re
    };
    let d0 = diag_at(zero);
    let d1 = diag_at(R::one()) - d0;
    AffineClosure { d0, d1 }
}
