//! Small dense matrices: Cholesky, symmetric tridiagonal QL eigensolver and
//! the generalized symmetric-definite reduction built on them.

use std::ops::{Index, IndexMut};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Row-major dense matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseMatrix<T> {
    nrows: usize,
    ncols: usize,
    data: Vec<T>,
}

impl<T: Real> DenseMatrix<T> {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        Self { nrows, ncols, data: vec![T::zero(); nrows * ncols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    pub fn from_fn(nrows: usize, ncols: usize, f: impl Fn(usize, usize) -> T) -> Self {
        let mut m = Self::zeros(nrows, ncols);
        for i in 0..nrows {
            for j in 0..ncols {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    /// Builds a matrix whose columns are the given vectors.
    pub fn from_columns(cols: &[Vec<T>]) -> Self {
        let nrows = cols.first().map_or(0, Vec::len);
        Self::from_fn(nrows, cols.len(), |i, j| cols[j][i])
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn column(&self, j: usize) -> Vec<T> {
        (0..self.nrows).map(|i| self[(i, j)]).collect()
    }

    pub fn row_slice(&self, i: usize) -> &[T] {
        &self.data[i * self.ncols..(i + 1) * self.ncols]
    }

    pub fn mul_vec(&self, x: &[T]) -> Vec<T> {
        (0..self.nrows).map(|i| crate::scalar::dot(self.row_slice(i), x)).collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.ncols, self.nrows, |i, j| self[(j, i)])
    }

    pub fn matmul(&self, rhs: &Self) -> Self {
        assert_eq!(self.ncols, rhs.nrows);
        let mut out = Self::zeros(self.nrows, rhs.ncols);
        for i in 0..self.nrows {
            for k in 0..self.ncols {
                let a = self[(i, k)];
                if a == T::zero() {
                    continue;
                }
                for j in 0..rhs.ncols {
                    out.data[i * rhs.ncols + j] += a * rhs.data[k * rhs.ncols + j];
                }
            }
        }
        out
    }

    /// Lower Cholesky factor `L` with `A = L L^T`.
    pub fn cholesky(&self) -> Result<Self> {
        assert_eq!(self.nrows, self.ncols);
        let n = self.nrows;
        let mut l = Self::zeros(n, n);
        for j in 0..n {
            let mut d = self[(j, j)];
            for k in 0..j {
                d -= l[(j, k)] * l[(j, k)];
            }
            if !(d > T::zero()) {
                return Err(Error::Factorization {
                    index: j,
                    msg: format!("non-positive pivot {d}"),
                });
            }
            let d = d.sqrt();
            l[(j, j)] = d;
            for i in j + 1..n {
                let mut s = self[(i, j)];
                for k in 0..j {
                    s -= l[(i, k)] * l[(j, k)];
                }
                l[(i, j)] = s / d;
            }
        }
        Ok(l)
    }

    /// Determinant by Gaussian elimination with partial pivoting.
    pub fn determinant(&self) -> T {
        assert_eq!(self.nrows, self.ncols);
        let n = self.nrows;
        let mut a = self.clone();
        let mut det = T::one();
        for c in 0..n {
            let p = (c..n)
                .max_by(|&x, &y| a[(x, c)].abs().partial_cmp(&a[(y, c)].abs()).unwrap())
                .unwrap();
            if a[(p, c)] == T::zero() {
                return T::zero();
            }
            if p != c {
                for j in 0..n {
                    a.data.swap(p * n + j, c * n + j);
                }
                det = -det;
            }
            det *= a[(c, c)];
            for r in c + 1..n {
                let f = a[(r, c)] / a[(c, c)];
                for j in c..n {
                    let v = a[(c, j)];
                    a[(r, j)] -= f * v;
                }
            }
        }
        det
    }

    /// Inverse by Gauss-Jordan elimination; `None` if singular.
    pub fn inverse(&self) -> Option<Self> {
        assert_eq!(self.nrows, self.ncols);
        let n = self.nrows;
        let mut a = self.clone();
        let mut inv = Self::identity(n);
        for c in 0..n {
            let p = (c..n)
                .max_by(|&x, &y| a[(x, c)].abs().partial_cmp(&a[(y, c)].abs()).unwrap())
                .unwrap();
            if a[(p, c)] == T::zero() {
                return None;
            }
            for j in 0..n {
                a.data.swap(p * n + j, c * n + j);
                inv.data.swap(p * n + j, c * n + j);
            }
            let piv = a[(c, c)];
            for j in 0..n {
                a[(c, j)] /= piv;
                inv[(c, j)] /= piv;
            }
            for r in 0..n {
                if r == c {
                    continue;
                }
                let f = a[(r, c)];
                if f == T::zero() {
                    continue;
                }
                for j in 0..n {
                    let (av, iv) = (a[(c, j)], inv[(c, j)]);
                    a[(r, j)] -= f * av;
                    inv[(r, j)] -= f * iv;
                }
            }
        }
        Some(inv)
    }
}

impl<T> Index<(usize, usize)> for DenseMatrix<T> {
    type Output = T;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.ncols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for DenseMatrix<T> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.ncols + j]
    }
}

/// Eigen-decomposition of a symmetric matrix.
#[derive(Clone, Debug)]
pub struct SymmetricEigen<T> {
    /// Ascending eigenvalues.
    pub values: Vec<T>,
    /// Orthonormal eigenvectors stored as columns, matching `values`.
    pub vectors: DenseMatrix<T>,
}

/// Householder tridiagonalization followed by implicit QL iterations.
///
/// Only the lower triangle is trusted; the input is symmetrized first.
pub fn symmetric_eigen<T: Real>(a: &DenseMatrix<T>) -> SymmetricEigen<T> {
    assert_eq!(a.nrows, a.ncols, "symmetric_eigen needs a square matrix");
    let n = a.nrows;
    if n == 0 {
        return SymmetricEigen { values: Vec::new(), vectors: DenseMatrix::zeros(0, 0) };
    }
    let half = T::of(0.5);
    let mut v = DenseMatrix::from_fn(n, n, |i, j| half * (a[(i, j)] + a[(j, i)]));
    let mut d = vec![T::zero(); n];
    let mut e = vec![T::zero(); n];
    tridiagonalize(&mut v, &mut d, &mut e);
    tridiagonal_ql(&mut v, &mut d, &mut e);

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| d[x].partial_cmp(&d[y]).unwrap_or(std::cmp::Ordering::Equal));
    let values = order.iter().map(|&k| d[k]).collect();
    let vectors = DenseMatrix::from_fn(n, n, |i, j| v[(i, order[j])]);
    SymmetricEigen { values, vectors }
}

fn tridiagonalize<T: Real>(v: &mut DenseMatrix<T>, d: &mut [T], e: &mut [T]) {
    let n = d.len();
    for j in 0..n {
        d[j] = v[(n - 1, j)];
    }
    for i in (1..n).rev() {
        let mut scale = T::zero();
        let mut h = T::zero();
        for dk in d.iter().take(i) {
            scale += dk.abs();
        }
        if scale == T::zero() {
            e[i] = d[i - 1];
            for j in 0..i {
                d[j] = v[(i - 1, j)];
                v[(i, j)] = T::zero();
                v[(j, i)] = T::zero();
            }
        } else {
            for dk in d.iter_mut().take(i) {
                *dk /= scale;
                h += *dk * *dk;
            }
            let mut f = d[i - 1];
            let mut g = h.sqrt();
            if f > T::zero() {
                g = -g;
            }
            e[i] = scale * g;
            h -= f * g;
            d[i - 1] = f - g;
            for ej in e.iter_mut().take(i) {
                *ej = T::zero();
            }
            for j in 0..i {
                f = d[j];
                v[(j, i)] = f;
                g = e[j] + v[(j, j)] * f;
                for k in j + 1..i {
                    g += v[(k, j)] * d[k];
                    e[k] += v[(k, j)] * f;
                }
                e[j] = g;
            }
            f = T::zero();
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
                    let upd = f * e[k] + g * d[k];
                    v[(k, j)] -= upd;
                }
                d[j] = v[(i - 1, j)];
                v[(i, j)] = T::zero();
            }
        }
        d[i] = h;
    }
    for i in 0..n - 1 {
        v[(n - 1, i)] = v[(i, i)];
        v[(i, i)] = T::one();
        let h = d[i + 1];
        if h != T::zero() {
            for k in 0..=i {
                d[k] = v[(k, i + 1)] / h;
            }
            for j in 0..=i {
                let mut g = T::zero();
                for k in 0..=i {
                    g += v[(k, i + 1)] * v[(k, j)];
                }
                for k in 0..=i {
                    let upd = g * d[k];
                    v[(k, j)] -= upd;
                }
            }
        }
        for k in 0..=i {
            v[(k, i + 1)] = T::zero();
        }
    }
    for j in 0..n {
        d[j] = v[(n - 1, j)];
        v[(n - 1, j)] = T::zero();
    }
    v[(n - 1, n - 1)] = T::one();
    e[0] = T::zero();
}

fn tridiagonal_ql<T: Real>(v: &mut DenseMatrix<T>, d: &mut [T], e: &mut [T]) {
    let n = d.len();
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = T::zero();
    let two = T::of(2.0);
    let eps = T::epsilon();
    let mut f = T::zero();
    let mut tst1 = T::zero();
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
                assert!(iter < 200 * n.max(10), "tridiagonal QL failed to converge");
                let g = d[l];
                let mut p = (d[l + 1] - g) / (two * e[l]);
                let mut r = p.hypot(T::one());
                if p < T::zero() {
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
                let mut c = T::one();
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = T::zero();
                let mut s2 = T::zero();
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    let g = c * e[i];
                    h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    for k in 0..n {
                        let hk = v[(k, i + 1)];
                        let vk = v[(k, i)];
                        v[(k, i + 1)] = s * vk + c * hk;
                        v[(k, i)] = c * vk - s * hk;
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
        e[l] = T::zero();
    }
}

/// Solves `A x = lambda B x` for symmetric `A` and SPD `B`.
///
/// Returns ascending eigenvalues with `B`-orthonormal eigenvectors (columns).
pub fn generalized_symmetric_eigen<T: Real>(
    a: &DenseMatrix<T>,
    b: &DenseMatrix<T>,
) -> Result<SymmetricEigen<T>> {
    let n = a.nrows;
    let l = b.cholesky()?;
    // C = L^{-1} A L^{-T}
    let linv = lower_inverse(&l);
    let c = linv.matmul(a).matmul(&linv.transpose());
    let SymmetricEigen { values, vectors } = symmetric_eigen(&c);
    // x = L^{-T} y
    let vectors = linv.transpose().matmul(&vectors);
    debug_assert_eq!(vectors.nrows(), n);
    Ok(SymmetricEigen { values, vectors })
}

fn lower_inverse<T: Real>(l: &DenseMatrix<T>) -> DenseMatrix<T> {
    let n = l.nrows;
    let mut inv = DenseMatrix::zeros(n, n);
    for j in 0..n {
        inv[(j, j)] = T::one() / l[(j, j)];
        for i in j + 1..n {
            let mut s = T::zero();
            for k in j..i {
                s += l[(i, k)] * inv[(k, j)];
            }
            inv[(i, j)] = -s / l[(i, i)];
        }
    }
    inv
}

#[cfg(test)]
mod tests {
    use super::*;

    fn residual(a: &DenseMatrix<f64>, eig: &SymmetricEigen<f64>) -> f64 {
        let n = a.nrows();
        let mut worst: f64 = 0.0;
        for j in 0..n {
            let x = eig.vectors.column(j);
            let ax = a.mul_vec(&x);
            for i in 0..n {
                worst = worst.max((ax[i] - eig.values[j] * x[i]).abs());
            }
        }
        worst
    }

    #[test]
    fn second_difference_matrix_spectrum() {
        // eigenvalues of tridiag(-1, 2, -1) are 2 - 2 cos(k pi / (n + 1))
        let n = 12;
        let a = DenseMatrix::from_fn(n, n, |i, j| match i.abs_diff(j) {
            0 => 2.0,
            1 => -1.0,
            _ => 0.0,
        });
        let eig = symmetric_eigen(&a);
        for (k, &v) in eig.values.iter().enumerate() {
            let exact = 2.0 - 2.0 * ((k + 1) as f64 * std::f64::consts::PI / (n + 1) as f64).cos();
            assert!((v - exact).abs() < 1e-12, "{k}: {v} vs {exact}");
        }
        assert!(residual(&a, &eig) < 1e-12);
        let vtv = eig.vectors.transpose().matmul(&eig.vectors);
        for i in 0..n {
            for j in 0..n {
                let target = if i == j { 1.0 } else { 0.0 };
                assert!((vtv[(i, j)] - target).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn repeated_eigenvalues_and_diagonal_input() {
        let a = DenseMatrix::from_fn(4, 4, |i, j| if i == j { [3.0, 1.0, 3.0, 1.0][i] } else { 0.0 });
        let eig = symmetric_eigen(&a);
        assert_eq!(eig.values, vec![1.0, 1.0, 3.0, 3.0]);
    }

    #[test]
    fn generalized_problem_is_b_orthonormal() {
        let a = DenseMatrix::<f64>::from_fn(3, 3, |i, j| [[4.0, 1.0, 0.0], [1.0, 3.0, 1.0], [0.0, 1.0, 2.0]][i][j]);
        let b = DenseMatrix::from_fn(3, 3, |i, j| [[2.0, 0.5, 0.0], [0.5, 2.0, 0.5], [0.0, 0.5, 2.0]][i][j]);
        let eig = generalized_symmetric_eigen(&a, &b).unwrap();
        for j in 0..3 {
            let x = eig.vectors.column(j);
            let ax = a.mul_vec(&x);
            let bx = b.mul_vec(&x);
            for i in 0..3 {
                assert!((ax[i] - eig.values[j] * bx[i]).abs() < 1e-12);
            }
            let xbx: f64 = x.iter().zip(&bx).map(|(p, q)| p * q).sum();
            assert!((xbx - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn determinant_and_inverse() {
        let a = DenseMatrix::<f64>::from_fn(3, 3, |i, j| [[0.0, 2.0, 1.0], [1.0, 0.0, 0.0], [3.0, 1.0, 1.0]][i][j]);
        assert!((a.determinant() + 1.0).abs() < 1e-14);
        let inv = a.inverse().unwrap();
        let id = a.matmul(&inv);
        for i in 0..3 {
            for j in 0..3 {
                assert!((id[(i, j)] - if i == j { 1.0 } else { 0.0 }).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn cholesky_rejects_indefinite() {
        let a = DenseMatrix::from_fn(2, 2, |i, j| if i == j { 1.0 } else { 2.0 });
        assert!(a.cholesky().is_err());
    }
}
