//! Envelope (skyline) `L D L^T` factorization for sparse symmetric matrices.
//!
//! No pivoting is performed, so the input must be symmetric positive
//! definite or symmetric quasi-definite (`[[H, C], [C^T, -G]]` with `H`, `G`
//! positive definite). Both classes factor stably under any symmetric
//! permutation; a reverse Cuthill-McKee ordering keeps the envelope small.

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::linalg::sparse::CsrMatrix;
use crate::scalar::Real;

#[derive(Clone, Debug)]
pub struct Ldl<T> {
    n: usize,
    /// `perm[new] = old`
    perm: Vec<usize>,
    /// first column index of each (permuted) row's envelope
    first: Vec<usize>,
    /// start offset of each row inside `lower`
    offset: Vec<usize>,
    /// strictly lower envelope entries, row by row
    lower: Vec<T>,
    diag: Vec<T>,
}

impl<T: Real> Ldl<T> {
    /// Factorizes a symmetric matrix. Only the lower triangle is read.
    pub fn factor(a: &CsrMatrix<T>) -> Result<Self> {
        let n = a.nrows();
        if a.ncols() != n {
            return Err(Error::Dimension(format!("LDL^T of non-square {:?}", a.shape())));
        }
        let perm = reverse_cuthill_mckee(a);
        let mut inv = vec![0usize; n];
        for (new, &old) in perm.iter().enumerate() {
            inv[old] = new;
        }

        // envelope structure in the permuted numbering
        let mut first: Vec<usize> = (0..n).collect();
        for (i, j, _) in a.triplets() {
            let (pi, pj) = (inv[i], inv[j]);
            let (r, c) = if pi >= pj { (pi, pj) } else { (pj, pi) };
            first[r] = first[r].min(c);
        }
        let mut offset = vec![0usize; n + 1];
        for i in 0..n {
            offset[i + 1] = offset[i] + (i - first[i]);
        }
        let mut lower = vec![T::zero(); offset[n]];
        let mut diag = vec![T::zero(); n];
        for (i, j, v) in a.triplets() {
            let (pi, pj) = (inv[i], inv[j]);
            if pi == pj {
                diag[pi] += v;
            } else if pi > pj {
                lower[offset[pi] + pj - first[pi]] += v;
            }
        }

        let scale = diag.iter().fold(T::zero(), |m, d| m.max(d.abs()));
        let tiny = scale * T::epsilon() * T::of(1e-4);
        for i in 0..n {
            let fi = first[i];
            // row i holds z_j = L_ij * D_j as it is processed
            for j in fi..i {
                let fj = first[j];
                let k0 = fi.max(fj);
                let mut s = lower[offset[i] + j - fi];
                if k0 < j {
                    let ri = &lower[offset[i] + k0 - fi..offset[i] + j - fi];
                    let rj = &lower[offset[j] + k0 - fj..offset[j] + j - fj];
                    s -= ri.iter().zip(rj).fold(T::zero(), |acc, (&x, &y)| acc + x * y);
                }
                lower[offset[i] + j - fi] = s;
            }
            let mut d = diag[i];
            for j in fi..i {
                let z = lower[offset[i] + j - fi];
                let l = z / diag[j];
                d -= l * z;
                lower[offset[i] + j - fi] = l;
            }
            if !(d.abs() > tiny) {
                return Err(Error::Factorization {
                    index: perm[i],
                    msg: format!("pivot {d} is numerically zero"),
                });
            }
            diag[i] = d;
        }
        Ok(Self { n, perm, first, offset, lower, diag })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Number of stored off-diagonal envelope entries.
    pub fn envelope_size(&self) -> usize {
        self.lower.len()
    }

    /// Number of negative pivots (the inertia's negative count).
    pub fn negative_pivots(&self) -> usize {
        self.diag.iter().filter(|d| **d < T::zero()).count()
    }

    pub fn solve(&self, b: &[T]) -> Vec<T> {
        assert_eq!(b.len(), self.n, "Ldl::solve: length mismatch");
        let mut y: Vec<T> = self.perm.iter().map(|&old| b[old]).collect();
        for i in 0..self.n {
            let fi = self.first[i];
            let row = &self.lower[self.offset[i]..self.offset[i + 1]];
            let s = row.iter().zip(&y[fi..i]).fold(T::zero(), |acc, (&l, &v)| acc + l * v);
            y[i] -= s;
        }
        for (yi, d) in y.iter_mut().zip(&self.diag) {
            *yi /= *d;
        }
        for i in (0..self.n).rev() {
            let fi = self.first[i];
            let xi = y[i];
            let row = &self.lower[self.offset[i]..self.offset[i + 1]];
            for (yk, &l) in y[fi..i].iter_mut().zip(row) {
                *yk -= l * xi;
            }
        }
        let mut x = vec![T::zero(); self.n];
        for (new, &old) in self.perm.iter().enumerate() {
            x[old] = y[new];
        }
        x
    }
}

/// Reverse Cuthill-McKee ordering of the symmetric sparsity graph of `a`.
///
/// Returns `perm` with `perm[new] = old`. Deterministic: ties are broken by
/// vertex index.
pub fn reverse_cuthill_mckee<T: Copy>(a: &CsrMatrix<T>) -> Vec<usize>
where
    T: num_traits::Num + std::ops::AddAssign,
{
    let n = a.nrows();
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (i, j, _) in a.triplets() {
        if i != j {
            adj[i].push(j);
            adj[j].push(i);
        }
    }
    for nb in &mut adj {
        nb.sort_unstable();
        nb.dedup();
    }
    let degree: Vec<usize> = adj.iter().map(Vec::len).collect();
    let mut visited = vec![false; n];
    let mut order = Vec::with_capacity(n);

    let bfs_last = |start: usize, visited: &[bool]| -> (usize, usize) {
        // returns (farthest node with min degree among last level, eccentricity)
        let mut dist = vec![usize::MAX; n];
        dist[start] = 0;
        let mut q = VecDeque::from([start]);
        let mut last = start;
        while let Some(u) = q.pop_front() {
            if dist[u] > dist[last] || (dist[u] == dist[last] && degree[u] < degree[last]) {
                last = u;
            }
            for &w in &adj[u] {
                if dist[w] == usize::MAX && !visited[w] {
                    dist[w] = dist[u] + 1;
                    q.push_back(w);
                }
            }
        }
        (last, dist[last])
    };

    while order.len() < n {
        let seed = (0..n).filter(|&v| !visited[v]).min_by_key(|&v| (degree[v], v)).unwrap();
        // pseudo-peripheral start node
        let (mut start, mut ecc) = bfs_last(seed, &visited);
        for _ in 0..4 {
            let (cand, e) = bfs_last(start, &visited);
            if e <= ecc {
                break;
            }
            start = cand;
            ecc = e;
        }
        visited[start] = true;
        let mut q = VecDeque::from([start]);
        while let Some(u) = q.pop_front() {
            order.push(u);
            let mut nbrs: Vec<usize> = adj[u].iter().copied().filter(|&w| !visited[w]).collect();
            nbrs.sort_by_key(|&w| (degree[w], w));
            for w in nbrs {
                visited[w] = true;
                q.push_back(w);
            }
        }
    }
    order.reverse();
    order
}

#[cfg(test)]
mod tests {
    use super::*;

    fn laplacian_1d(n: usize) -> CsrMatrix<f64> {
        let mut t = Vec::new();
        for i in 0..n {
            t.push((i, i, 2.0));
            if i + 1 < n {
                t.push((i, i + 1, -1.0));
                t.push((i + 1, i, -1.0));
            }
        }
        CsrMatrix::from_triplets(n, n, &t)
    }

    #[test]
    fn solves_spd_system() {
        let a = laplacian_1d(30);
        let x_true: Vec<f64> = (0..30).map(|i| (i as f64 * 0.37).sin()).collect();
        let b = a.mul_vec(&x_true);
        let ldl = Ldl::factor(&a).unwrap();
        let x = ldl.solve(&b);
        for (p, q) in x.iter().zip(&x_true) {
            assert!((p - q).abs() < 1e-12);
        }
        assert_eq!(ldl.negative_pivots(), 0);
    }

    #[test]
    fn solves_quasi_definite_system() {
        // [[H, C], [C^T, -G]]
        let h = laplacian_1d(6);
        let mut t: Vec<(usize, usize, f64)> = h.triplets().collect();
        for i in 0..3 {
            t.push((6 + i, 6 + i, -1.5));
            t.push((2 * i, 6 + i, 1.0));
            t.push((6 + i, 2 * i, 1.0));
            t.push((2 * i + 1, 6 + i, -0.5));
            t.push((6 + i, 2 * i + 1, -0.5));
        }
        let a = CsrMatrix::from_triplets(9, 9, &t);
        let x_true: Vec<f64> = (0..9).map(|i| 1.0 + i as f64).collect();
        let b = a.mul_vec(&x_true);
        let ldl = Ldl::factor(&a).unwrap();
        let x = ldl.solve(&b);
        for (p, q) in x.iter().zip(&x_true) {
            assert!((p - q).abs() < 1e-11);
        }
        assert_eq!(ldl.negative_pivots(), 3);
    }

    #[test]
    fn singular_matrix_is_reported() {
        let a = CsrMatrix::from_triplets(2, 2, &[(0, 0, 1.0), (0, 1, 1.0), (1, 0, 1.0), (1, 1, 1.0)]);
        assert!(matches!(Ldl::factor(&a), Err(Error::Factorization { .. })));
    }

    #[test]
    fn rcm_is_a_permutation() {
        let a = laplacian_1d(17);
        let mut p = reverse_cuthill_mckee(&a);
        p.sort_unstable();
        assert_eq!(p, (0..17).collect::<Vec<_>>());
    }
}
