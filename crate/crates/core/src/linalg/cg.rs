//! Conjugate gradients for symmetric positive (semi-)definite operators.

use crate::error::{Error, Result};
use crate::scalar::{axpy, dot, norm2, Real};

#[derive(Clone, Debug)]
pub struct CgOutcome<T> {
    pub solution: Vec<T>,
    pub iterations: usize,
    /// `||b - A x|| / ||b||`
    pub relative_residual: T,
}

/// Solves `A x = b` from `x = 0`.
///
/// Consistent singular systems are fine: the iterates stay in the range of
/// `A` and converge to the minimum-norm solution.
pub fn conjugate_gradient<T, F>(apply: F, b: &[T], rel_tol: T, max_iter: usize) -> Result<CgOutcome<T>>
where
    T: Real,
    F: Fn(&[T]) -> Vec<T>,
{
    let n = b.len();
    let mut x = vec![T::zero(); n];
    let bnorm = norm2(b);
    if bnorm == T::zero() {
        return Ok(CgOutcome { solution: x, iterations: 0, relative_residual: T::zero() });
    }
    let mut r = b.to_vec();
    let mut p = r.clone();
    let mut rr = dot(&r, &r);
    for it in 0..max_iter {
        if rr.sqrt() <= rel_tol * bnorm {
            return Ok(CgOutcome { solution: x, iterations: it, relative_residual: rr.sqrt() / bnorm });
        }
        let ap = apply(&p);
        let pap = dot(&p, &ap);
        if !(pap > T::zero()) {
            break;
        }
        let alpha = rr / pap;
        axpy(alpha, &p, &mut x);
        axpy(-alpha, &ap, &mut r);
        let rr_new = dot(&r, &r);
        let beta = rr_new / rr;
        rr = rr_new;
        for (pi, &ri) in p.iter_mut().zip(&r) {
            *pi = ri + beta * *pi;
        }
    }
    // recompute the true residual before giving up
    let ax = apply(&x);
    let res: Vec<T> = b.iter().zip(&ax).map(|(&bi, &ai)| bi - ai).collect();
    let rel = norm2(&res) / bnorm;
    if rel <= rel_tol {
        return Ok(CgOutcome { solution: x, iterations: max_iter, relative_residual: rel });
    }
    Err(Error::NoConvergence { iterations: max_iter, residual: rel.as_f64() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::sparse::CsrMatrix;

    #[test]
    fn converges_on_spd() {
        let n = 40;
        let mut t = Vec::new();
        for i in 0..n {
            t.push((i, i, 2.5));
            if i + 1 < n {
                t.push((i, i + 1, -1.0));
                t.push((i + 1, i, -1.0));
            }
        }
        let a = CsrMatrix::from_triplets(n, n, &t);
        let b: Vec<f64> = (0..n).map(|i| (i as f64).cos()).collect();
        let out = conjugate_gradient(|x| a.mul_vec(x), &b, 1e-12, 10 * n).unwrap();
        assert!(out.relative_residual <= 1e-12);
    }

    #[test]
    fn reports_non_convergence() {
        let a = CsrMatrix::from_triplets(3, 3, &[(0, 0, 1.0), (1, 1, 100.0), (2, 2, 1e4)]);
        let err = conjugate_gradient(|x| a.mul_vec(x), &[1.0, 1.0, 1.0], 1e-14, 1).unwrap_err();
        assert!(matches!(err, Error::NoConvergence { iterations: 1, .. }));
    }
}
