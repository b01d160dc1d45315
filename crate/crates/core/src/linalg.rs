//! Dense real symmetric linear algebra: Cholesky, Householder
//! tridiagonalization and implicit QL.
//!
//! Matrices are row-major `Vec<Vec<f64>>`. The QL routine accepts any number
//! of rows to rotate, so Golub–Welsch can carry only the first row of the
//! eigenvector matrix.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::NumericalError;

pub type Matrix = Vec<Vec<f64>>;

pub fn identity(n: usize) -> Matrix {
    let mut a = vec![vec![0.0; n]; n];
    for (i, row) in a.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    a
}

/// Lower factor `L` with `A = L·Lᵀ`. Only the lower triangle of `a` is read.
pub fn cholesky(a: &[Vec<f64>]) -> Result<Matrix, NumericalError> {
    let n = a.len();
    let mut l = vec![vec![0.0; n]; n];
    for j in 0..n {
        let mut d = a[j][j];
        for k in 0..j {
            d -= l[j][k] * l[j][k];
        }
        if !(d > 0.0) || !d.is_finite() {
            return Err(NumericalError::NotPositiveDefinite { pivot: j, value: d });
        }
        let djj = libm::sqrt(d);
        l[j][j] = djj;
        for i in j + 1..n {
            let mut s = a[i][j];
            for k in 0..j {
                s -= l[i][k] * l[j][k];
            }
            l[i][j] = s / djj;
        }
    }
    Ok(l)
}

/// Solves `L·x = b` in place.
pub fn forward_substitute(l: &[Vec<f64>], b: &mut [f64]) {
    for i in 0..b.len() {
        let mut s = b[i];
        for k in 0..i {
            s -= l[i][k] * b[k];
        }
        b[i] = s / l[i][i];
    }
}

/// Solves `Lᵀ·x = b` in place.
pub fn back_substitute_transpose(l: &[Vec<f64>], b: &mut [f64]) {
    for i in (0..b.len()).rev() {
        let mut s = b[i];
        for k in i + 1..b.len() {
            s -= l[k][i] * b[k];
        }
        b[i] = s / l[i][i];
    }
}

/// Householder reduction of the symmetric matrix held in `v` to tridiagonal
/// form. On return `d` is the diagonal, `e[1..]` the subdiagonal and `v` the
/// accumulated orthogonal transformation.
pub fn tred2(v: &mut [Vec<f64>], d: &mut [f64], e: &mut [f64]) {
    let n = d.len();
    if n == 0 {
        return;
    }
    for j in 0..n {
        d[j] = v[n - 1][j];
    }
    for i in (1..n).rev() {
        let mut scale = 0.0;
        let mut h = 0.0;
        for k in 0..i {
            scale += d[k].abs();
        }
        if scale == 0.0 {
            e[i] = d[i - 1];
            for j in 0..i {
                d[j] = v[i - 1][j];
                v[i][j] = 0.0;
                v[j][i] = 0.0;
            }
        } else {
            for k in 0..i {
                d[k] /= scale;
                h += d[k] * d[k];
            }
            let mut f = d[i - 1];
            let mut g = libm::sqrt(h);
            if f > 0.0 {
                g = -g;
            }
            e[i] = scale * g;
            h -= f * g;
            d[i - 1] = f - g;
            for ej in e.iter_mut().take(i) {
                *ej = 0.0;
            }
            for j in 0..i {
                f = d[j];
                v[j][i] = f;
                g = e[j] + v[j][j] * f;
                for k in j + 1..i {
                    g += v[k][j] * d[k];
                    e[k] += v[k][j] * f;
                }
                e[j] = g;
            }
            f = 0.0;
            for j in 0..i {
                e[j] /= h;
                f += e[j] * d[j];
            }
            let hh = f / (h + h);
            for j in 0..i {
                e[j] -= hh * d[j];
            }
            for j in 0..i {
                f = d[j];
                g = e[j];
                for k in j..i {
                    v[k][j] -= f * e[k] + g * d[k];
                }
                d[j] = v[i - 1][j];
                v[i][j] = 0.0;
            }
        }
        d[i] = h;
    }
    for i in 0..n - 1 {
        v[n - 1][i] = v[i][i];
        v[i][i] = 1.0;
        let h = d[i + 1];
        if h != 0.0 {
            for k in 0..=i {
                d[k] = v[k][i + 1] / h;
            }
            for j in 0..=i {
                let mut g = 0.0;
                for k in 0..=i {
                    g += v[k][i + 1] * v[k][j];
                }
                for k in 0..=i {
                    v[k][j] -= g * d[k];
                }
            }
        }
        for k in 0..=i {
            v[k][i + 1] = 0.0;
        }
    }
    for j in 0..n {
        d[j] = v[n - 1][j];
        v[n - 1][j] = 0.0;
    }
    v[n - 1][n - 1] = 1.0;
    e[0] = 0.0;
}

/// Implicit QL on the symmetric tridiagonal matrix (`d`, `e[1..]`), applying
/// the rotations to the columns of every row of `z`. Eigenvalues come back
/// ascending in `d`, with the columns of `z` permuted to match.
pub fn tql2(d: &mut [f64], e: &mut [f64], z: &mut [Vec<f64>]) -> Result<(), NumericalError> {
    let n = d.len();
    if n == 0 {
        return Ok(());
    }
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = 0.0;
    let mut f = 0.0;
    let mut tst1: f64 = 0.0;
    let eps = f64::EPSILON;
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n - 1 && e[m].abs() > eps * tst1 {
            m += 1;
        }
        if m > l {
            let mut iter = 0;
            loop {
                iter += 1;
                if iter > 60 {
                    return Err(NumericalError::SymmetricEigen { index: l });
                }
                let mut g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut r = libm::hypot(p, 1.0);
                if p < 0.0 {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for di in d.iter_mut().skip(l + 2) {
                    *di -= h;
                }
                f += h;

                p = d[m];
                let mut c = 1.0;
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = 0.0;
                let mut s2 = 0.0;
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    g = c * e[i];
                    h = c * p;
                    r = libm::hypot(p, e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    for row in z.iter_mut() {
                        let t = row[i + 1];
                        row[i + 1] = s * row[i] + c * t;
                        row[i] = c * row[i] - s * t;
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = 0.0;
    }
    // Selection sort keeps the column swaps cheap to apply.
    for i in 0..n.saturating_sub(1) {
        let mut k = i;
        for j in i + 1..n {
            if d[j] < d[k] {
                k = j;
            }
        }
        if k != i {
            d.swap(i, k);
            for row in z.iter_mut() {
                row.swap(i, k);
            }
        }
    }
    Ok(())
}

/// Eigenvalues ascending; `vectors[j]` is the unit eigenvector of `values[j]`.
#[derive(Clone, Debug)]
pub struct SymmetricEigen {
    pub values: Vec<f64>,
    pub vectors: Vec<Vec<f64>>,
}

pub fn symmetric_eigen(a: &[Vec<f64>]) -> Result<SymmetricEigen, NumericalError> {
    let n = a.len();
    let mut v: Matrix = a.to_vec();
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];
    tred2(&mut v, &mut d, &mut e);
    tql2(&mut d, &mut e, &mut v)?;
    let vectors = (0..n).map(|j| (0..n).map(|i| v[i][j]).collect()).collect();
    Ok(SymmetricEigen { values: d, vectors })
}

/// Solves `S·c = μ·M·c` for symmetric `S` and symmetric positive definite
/// `M` by reduction to `L⁻¹·S·L⁻ᵀ`. The vectors are `M`-orthonormal.
pub fn generalized_symmetric_eigen(
    s: &[Vec<f64>],
    m: &[Vec<f64>],
) -> Result<SymmetricEigen, NumericalError> {
    let n = s.len();
    let l = cholesky(m)?;
    // C = L⁻¹ S L⁻ᵀ, column by column: first W = L⁻¹ S, then C = L⁻¹ Wᵀ.
    let mut w = vec![vec![0.0; n]; n];
    for j in 0..n {
        let mut col: Vec<f64> = (0..n).map(|i| s[i][j]).collect();
        forward_substitute(&l, &mut col);
        for i in 0..n {
            w[i][j] = col[i];
        }
    }
    let mut c = vec![vec![0.0; n]; n];
    for i in 0..n {
        let mut col = w[i].clone();
        forward_substitute(&l, &mut col);
        for j in 0..n {
            c[j][i] = col[j];
        }
    }
    for i in 0..n {
        for j in 0..i {
            let avg = 0.5 * (c[i][j] + c[j][i]);
            c[i][j] = avg;
            c[j][i] = avg;
        }
    }
    let mut eig = symmetric_eigen(&c)?;
    for y in eig.vectors.iter_mut() {
        back_substitute_transpose(&l, y);
    }
    Ok(eig)
}

pub fn mat_vec(a: &[Vec<f64>], x: &[f64]) -> Vec<f64> {
    a.iter().map(|row| row.iter().zip(x).map(|(p, q)| p * q).sum()).collect()
}

pub fn dot(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(p, q)| p * q).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn random_symmetric(seed: &[f64], n: usize) -> Matrix {
        let mut a = vec![vec![0.0; n]; n];
        let mut k = 0;
        for i in 0..n {
            for j in 0..=i {
                a[i][j] = seed[k % seed.len()] * (1.0 + (i * 7 + j * 3) as f64 * 0.01);
                a[j][i] = a[i][j];
                k += 1;
            }
        }
        a
    }

    #[test]
    fn two_by_two_closed_form() {
        let a = vec![vec![2.0, 1.0], vec![1.0, 2.0]];
        let eig = symmetric_eigen(&a).unwrap();
        assert!((eig.values[0] - 1.0).abs() < 1e-15);
        assert!((eig.values[1] - 3.0).abs() < 1e-15);
        let v = &eig.vectors[1];
        assert!((v[0].abs() - v[1].abs()).abs() < 1e-15);
    }

    #[test]
    fn one_by_one_and_diagonal() {
        let eig = symmetric_eigen(&[vec![4.5]]).unwrap();
        assert_eq!(eig.values, vec![4.5]);
        let eig = symmetric_eigen(&[vec![3.0, 0.0], vec![0.0, -1.0]]).unwrap();
        assert_eq!(eig.values, vec![-1.0, 3.0]);
    }

    #[test]
    fn cholesky_rejects_indefinite() {
        let a = vec![vec![1.0, 2.0], vec![2.0, 1.0]];
        match cholesky(&a) {
            Err(NumericalError::NotPositiveDefinite { pivot, .. }) => assert_eq!(pivot, 1),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn hilbert_generalized_problem() {
        // S = diag(1..n) against the (positive definite) Hilbert matrix.
        let n = 6;
        let m: Matrix = (0..n)
            .map(|i| (0..n).map(|j| 1.0 / (i + j + 1) as f64).collect())
            .collect();
        let mut s = vec![vec![0.0; n]; n];
        for (i, row) in s.iter_mut().enumerate() {
            row[i] = (i + 1) as f64;
        }
        let eig = generalized_symmetric_eigen(&s, &m).unwrap();
        for (mu, c) in eig.values.iter().zip(&eig.vectors) {
            let sc = mat_vec(&s, c);
            let mc = mat_vec(&m, c);
            let r: f64 = sc.iter().zip(&mc).map(|(p, q)| (p - mu * q).abs()).fold(0.0, f64::max);
            assert!(r < 1e-8 * mu.abs().max(1.0), "{mu} {r}");
            assert!((dot(c, &mc) - 1.0).abs() < 1e-9);
        }
    }

    proptest! {
        #[test]
        fn eigen_decomposition_reconstructs(
            seed in proptest::collection::vec(-1.0f64..1.0, 1..40), n in 1usize..25
        ) {
            let a = random_symmetric(&seed, n);
            let eig = symmetric_eigen(&a).unwrap();
            let scale = a.iter().flatten().map(|x| x.abs()).fold(1.0, f64::max);
            for w in eig.values.windows(2) {
                prop_assert!(w[0] <= w[1]);
            }
            for (lam, v) in eig.values.iter().zip(&eig.vectors) {
                let av = mat_vec(&a, v);
                for (p, q) in av.iter().zip(v) {
                    prop_assert!((p - lam * q).abs() <= 1e-12 * scale * n as f64);
                }
                prop_assert!((dot(v, v) - 1.0).abs() <= 1e-12);
            }
            let trace: f64 = (0..n).map(|i| a[i][i]).sum();
            let sum: f64 = eig.values.iter().sum();
            prop_assert!((trace - sum).abs() <= 1e-12 * scale * n as f64);
        }

        #[test]
        fn cholesky_reproduces_gram(
            seed in proptest::collection::vec(-1.0f64..1.0, 1..40), n in 1usize..20
        ) {
            let b = random_symmetric(&seed, n);
            let mut a = vec![vec![0.0; n]; n];
            for i in 0..n {
                for j in 0..n {
                    a[i][j] = (0..n).map(|k| b[i][k] * b[j][k]).sum::<f64>() + if i == j { 1.0 } else { 0.0 };
                }
            }
            let l = cholesky(&a).unwrap();
            for i in 0..n {
                for j in 0..n {
                    let r: f64 = (0..n).map(|k| l[i][k] * l[j][k]).sum();
                    prop_assert!((r - a[i][j]).abs() <= 1e-12 * (1.0 + a[i][j].abs()) * n as f64);
                }
            }
        }
    }
}
