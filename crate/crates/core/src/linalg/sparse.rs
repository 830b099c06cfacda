//! Compressed sparse row storage.

use std::ops::AddAssign;

use num_traits::{Num, NumCast};

use crate::linalg::dense::DenseMatrix;
use crate::scalar::Real;

/// Row-major compressed sparse matrix.
///
/// Column indices within a row are strictly increasing. Explicit zeros are
/// kept if they were assembled, so structure is reproducible across runs.
#[derive(Clone, Debug, PartialEq)]
pub struct CsrMatrix<T> {
    nrows: usize,
    ncols: usize,
    indptr: Vec<usize>,
    indices: Vec<usize>,
    data: Vec<T>,
}

impl<T> CsrMatrix<T>
where
    T: Copy + Num + AddAssign,
{
    /// Builds a matrix from `(row, col, value)` triplets, summing duplicates.
    ///
    /// Duplicates are summed in input order, so the result is bit-identical
    /// for identical triplet sequences.
    pub fn from_triplets(nrows: usize, ncols: usize, triplets: &[(usize, usize, T)]) -> Self {
        let mut order: Vec<usize> = (0..triplets.len()).collect();
        order.sort_by_key(|&k| (triplets[k].0, triplets[k].1));

        let mut indptr = vec![0usize; nrows + 1];
        let mut indices = Vec::with_capacity(triplets.len());
        let mut data: Vec<T> = Vec::with_capacity(triplets.len());
        let mut last: Option<(usize, usize)> = None;
        for k in order {
            let (r, c, v) = triplets[k];
            assert!(r < nrows && c < ncols, "triplet ({r}, {c}) out of bounds");
            if last == Some((r, c)) {
                *data.last_mut().unwrap() += v;
            } else {
                indices.push(c);
                data.push(v);
                indptr[r + 1] += 1;
                last = Some((r, c));
            }
        }
        for i in 0..nrows {
            indptr[i + 1] += indptr[i];
        }
        Self { nrows, ncols, indptr, indices, data }
    }

    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        Self { nrows, ncols, indptr: vec![0; nrows + 1], indices: Vec::new(), data: Vec::new() }
    }

    pub fn identity(n: usize) -> Self {
        Self {
            nrows: n,
            ncols: n,
            indptr: (0..=n).collect(),
            indices: (0..n).collect(),
            data: vec![T::one(); n],
        }
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.nrows, self.ncols)
    }

    pub fn nnz(&self) -> usize {
        self.data.len()
    }

    /// Iterates `(col, value)` over the stored entries of row `i`.
    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, T)> + '_ {
        let span = self.indptr[i]..self.indptr[i + 1];
        self.indices[span.clone()].iter().copied().zip(self.data[span].iter().copied())
    }

    /// Iterates all stored entries as `(row, col, value)` in row-major order.
    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, T)> + '_ {
        (0..self.nrows).flat_map(move |i| self.row(i).map(move |(j, v)| (i, j, v)))
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        let span = self.indptr[i]..self.indptr[i + 1];
        match self.indices[span.clone()].binary_search(&j) {
            Ok(k) => self.data[span.start + k],
            Err(_) => T::zero(),
        }
    }

    pub fn mul_vec(&self, x: &[T]) -> Vec<T> {
        assert_eq!(x.len(), self.ncols, "mul_vec: length mismatch");
        (0..self.nrows)
            .map(|i| {
                let mut acc = T::zero();
                for (j, v) in self.row(i) {
                    acc += v * x[j];
                }
                acc
            })
            .collect()
    }

    /// `A^T x`
    pub fn tr_mul_vec(&self, x: &[T]) -> Vec<T> {
        assert_eq!(x.len(), self.nrows, "tr_mul_vec: length mismatch");
        let mut y = vec![T::zero(); self.ncols];
        for (i, &xi) in x.iter().enumerate() {
            for (j, v) in self.row(i) {
                y[j] += v * xi;
            }
        }
        y
    }

    pub fn transpose(&self) -> Self {
        let trips: Vec<_> = self.triplets().map(|(i, j, v)| (j, i, v)).collect();
        Self::from_triplets(self.ncols, self.nrows, &trips)
    }

    /// Sparse product `self * rhs`.
    pub fn matmul(&self, rhs: &Self) -> Self {
        assert_eq!(self.ncols, rhs.nrows, "matmul: inner dimension mismatch");
        let mut trips = Vec::new();
        let mut acc: Vec<Option<T>> = vec![None; rhs.ncols];
        let mut touched = Vec::new();
        for i in 0..self.nrows {
            for (k, a) in self.row(i) {
                for (j, b) in rhs.row(k) {
                    match &mut acc[j] {
                        Some(v) => *v += a * b,
                        slot @ None => {
                            *slot = Some(a * b);
                            touched.push(j);
                        }
                    }
                }
            }
            touched.sort_unstable();
            for &j in &touched {
                trips.push((i, j, acc[j].take().unwrap()));
            }
            touched.clear();
        }
        Self::from_triplets(self.nrows, rhs.ncols, &trips)
    }

    /// `alpha * self + beta * other`
    pub fn lin_comb(&self, alpha: T, other: &Self, beta: T) -> Self {
        assert_eq!(self.shape(), other.shape(), "lin_comb: shape mismatch");
        let trips: Vec<_> = self
            .triplets()
            .map(|(i, j, v)| (i, j, alpha * v))
            .chain(other.triplets().map(|(i, j, v)| (i, j, beta * v)))
            .collect();
        Self::from_triplets(self.nrows, self.ncols, &trips)
    }

    /// Restriction to the given rows and columns (in the given order).
    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Self {
        let mut col_map = vec![usize::MAX; self.ncols];
        for (new, &old) in cols.iter().enumerate() {
            col_map[old] = new;
        }
        let mut trips = Vec::new();
        for (ni, &oi) in rows.iter().enumerate() {
            for (j, v) in self.row(oi) {
                if col_map[j] != usize::MAX {
                    trips.push((ni, col_map[j], v));
                }
            }
        }
        Self::from_triplets(rows.len(), cols.len(), &trips)
    }

    pub fn map<U, F>(&self, f: F) -> CsrMatrix<U>
    where
        F: Fn(T) -> U,
    {
        CsrMatrix {
            nrows: self.nrows,
            ncols: self.ncols,
            indptr: self.indptr.clone(),
            indices: self.indices.clone(),
            data: self.data.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn cast<U: NumCast>(&self) -> CsrMatrix<U>
    where
        T: NumCast,
    {
        self.map(|v| U::from(v).expect("representable entry"))
    }
}

impl<T: Real> CsrMatrix<T> {
    pub fn to_dense(&self) -> DenseMatrix<T> {
        let mut d = DenseMatrix::zeros(self.nrows, self.ncols);
        for (i, j, v) in self.triplets() {
            d[(i, j)] += v;
        }
        d
    }

    /// Maximum absolute asymmetry `|a_ij - a_ji|`.
    pub fn asymmetry(&self) -> T {
        self.triplets()
            .map(|(i, j, v)| (v - self.get(j, i)).abs())
            .fold(T::zero(), T::max)
    }

    pub fn diagonal(&self) -> Vec<T> {
        (0..self.nrows.min(self.ncols)).map(|i| self.get(i, i)).collect()
    }

    /// Quadratic form `x^T A x`.
    pub fn quad_form(&self, x: &[T]) -> T {
        crate::scalar::dot(x, &self.mul_vec(x))
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |m, v| m.max(v.abs()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triplets_sum_duplicates() {
        let m = CsrMatrix::from_triplets(2, 2, &[(0, 0, 1.0), (1, 1, 2.0), (0, 0, 0.5), (0, 1, -1.0)]);
        assert_eq!(m.nnz(), 3);
        assert_eq!(m.get(0, 0), 1.5);
        assert_eq!(m.get(0, 1), -1.0);
        assert_eq!(m.get(1, 0), 0.0);
    }

    #[test]
    fn product_and_transpose() {
        let a = CsrMatrix::from_triplets(2, 3, &[(0, 0, 1i64), (0, 2, 2), (1, 1, 3)]);
        let ata = a.transpose().matmul(&a);
        assert_eq!(ata.shape(), (3, 3));
        assert_eq!(ata.get(0, 2), 2);
        assert_eq!(ata.get(2, 2), 4);
        assert_eq!(ata.get(1, 1), 9);
        assert_eq!(a.tr_mul_vec(&[1, 1]), vec![1, 3, 2]);
    }

    #[test]
    fn submatrix_reorders() {
        let a = CsrMatrix::from_triplets(3, 3, &[(0, 0, 1.0), (1, 2, 5.0), (2, 1, 7.0)]);
        let s = a.submatrix(&[2, 1], &[1, 2]);
        assert_eq!(s.get(0, 0), 7.0);
        assert_eq!(s.get(1, 1), 5.0);
    }
}
