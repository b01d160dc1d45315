//! Gauss–Jacobi quadrature on `[−1, 1]` with weight `(1−x)^α (1+x)^β`, and
//! the orthonormal Jacobi polynomials behind it.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::NumericalError;
use crate::linalg::tql2;

/// Three-term recurrence of the orthonormal Jacobi polynomials:
/// `x·p_n = b_{n+1}·p_{n+1} + a_n·p_n + b_n·p_{n−1}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct JacobiWeight {
    pub alpha: f64,
    pub beta: f64,
}

impl JacobiWeight {
    pub fn new(alpha: f64, beta: f64) -> Self {
        JacobiWeight { alpha, beta }
    }

    /// Total mass `∫(1−x)^α(1+x)^β dx`.
    pub fn mass(&self) -> f64 {
        let (a, b) = (self.alpha, self.beta);
        libm::exp(
            (a + b + 1.0) * core::f64::consts::LN_2 + libm::lgamma(a + 1.0) + libm::lgamma(b + 1.0)
                - libm::lgamma(a + b + 2.0),
        )
    }

    pub fn diagonal(&self, n: usize) -> f64 {
        let (a, b) = (self.alpha, self.beta);
        if n == 0 {
            return (b - a) / (a + b + 2.0);
        }
        let s = 2.0 * n as f64 + a + b;
        (b * b - a * a) / (s * (s + 2.0))
    }

    /// Off-diagonal `b_n`, `n ≥ 1`.
    pub fn off_diagonal(&self, n: usize) -> f64 {
        let (a, b) = (self.alpha, self.beta);
        let nf = n as f64;
        let s = 2.0 * nf + a + b;
        if n == 1 {
            // n + a + b equals s − 1 here; cancel it so a + b = −1 stays finite.
            return libm::sqrt(4.0 * (1.0 + a) * (1.0 + b) / ((s * s) * (s + 1.0)));
        }
        libm::sqrt(
            4.0 * nf * (nf + a) * (nf + b) * (nf + a + b) / (s * s * (s + 1.0) * (s - 1.0)),
        )
    }

    /// `p_0..p_{k−1}` at `x`, orthonormal for this weight.
    pub fn orthonormal(&self, x: f64, k: usize) -> Vec<f64> {
        let mut p = vec![0.0; k];
        if k == 0 {
            return p;
        }
        p[0] = 1.0 / libm::sqrt(self.mass());
        if k > 1 {
            p[1] = (x - self.diagonal(0)) * p[0] / self.off_diagonal(1);
        }
        for n in 1..k.saturating_sub(1) {
            p[n + 1] = ((x - self.diagonal(n)) * p[n] - self.off_diagonal(n) * p[n - 1])
                / self.off_diagonal(n + 1);
        }
        p
    }

    /// Values and derivatives of `p_0..p_{k−1}` at `x`.
    pub fn orthonormal_with_derivative(&self, x: f64, k: usize) -> (Vec<f64>, Vec<f64>) {
        let p = self.orthonormal(x, k);
        let mut dp = vec![0.0; k];
        if k > 1 {
            dp[1] = p[0] / self.off_diagonal(1);
        }
        for n in 1..k.saturating_sub(1) {
            dp[n + 1] = (p[n] + (x - self.diagonal(n)) * dp[n] - self.off_diagonal(n) * dp[n - 1])
                / self.off_diagonal(n + 1);
        }
        (p, dp)
    }

    /// `q`-point Gauss rule: Golub–Welsch nodes, one Newton step on `p_q`,
    /// then weights from the Christoffel function `1/Σ p_j²`, which keeps the
    /// tiny endpoint weights relatively accurate.
    pub fn gauss(&self, q: usize) -> Result<GaussRule, NumericalError> {
        let mut d: Vec<f64> = (0..q).map(|n| self.diagonal(n)).collect();
        let mut e = vec![0.0; q];
        for (n, en) in e.iter_mut().enumerate().skip(1) {
            *en = self.off_diagonal(n);
        }
        let mut z = vec![vec![0.0; q]];
        if q > 0 {
            z[0][0] = 1.0;
        }
        tql2(&mut d, &mut e, &mut z)?;
        let mut weights = vec![0.0; q];
        for (x, w) in d.iter_mut().zip(weights.iter_mut()) {
            let (p, dp) = self.orthonormal_with_derivative(*x, q + 1);
            if dp[q] != 0.0 {
                let step = p[q] / dp[q];
                if step.abs() < 1e-8 {
                    *x -= step;
                }
            }
            let p = self.orthonormal(*x, q);
            *w = 1.0 / p.iter().map(|v| v * v).sum::<f64>();
        }
        Ok(GaussRule { nodes: d, weights })
    }
}

/// Nodes ascending in `(−1, 1)` with positive weights.
#[derive(Clone, Debug)]
pub struct GaussRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussRule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(x, w)| w * f(*x)).sum()
    }
}
