//! Shift-invert block Lanczos in the `B` inner product.
//!
//! The operator `Op = (A + sigma B)^{-1} B` is self-adjoint in `<x, y>_B`;
//! its largest eigenvalues `1 / (alpha + sigma)` belong to the smallest
//! `alpha`. The Krylov basis is kept fully `B`-orthonormal (two passes of
//! classical Gram-Schmidt) and the projected matrix is formed explicitly
//! from stored `Op` images, which makes thick restarts trivial. Block size
//! above the largest expected multiplicity captures degenerate eigenvalues.

use std::cell::Cell;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{relative_residual, SolveOptions};
use crate::assembly::EigenProblem;
use crate::error::{Error, Result};
use crate::linalg::symmetric_eigen;
use crate::linalg::DenseMatrix;
use crate::scalar::{axpy, dot, Real};

pub(crate) struct KrylovOutcome<T> {
    pub values: Vec<T>,
    pub vectors: Vec<Vec<T>>,
    pub operator_applications: usize,
}

struct Basis<T> {
    v: Vec<Vec<T>>,
    bv: Vec<Vec<T>>,
    w: Vec<Vec<T>>,
}

impl<T: Real> Basis<T> {
    fn len(&self) -> usize {
        self.v.len()
    }

    /// B-orthogonalizes `x` against the basis; returns `(x, Bx, ||x||_B)`.
    fn orthogonalize(&self, mut x: Vec<T>, problem: &EigenProblem<T>) -> (Vec<T>, Vec<T>, T) {
        for _ in 0..2 {
            for (vi, bvi) in self.v.iter().zip(&self.bv) {
                let c = dot(bvi, &x);
                axpy(-c, vi, &mut x);
            }
        }
        let bx = problem.apply_b(&x);
        let nrm = dot(&x, &bx).max(T::zero()).sqrt();
        (x, bx, nrm)
    }

    fn combine(vecs: &[Vec<T>], y: &DenseMatrix<T>, col: usize) -> Vec<T> {
        let mut out = vec![T::zero(); vecs[0].len()];
        for (i, v) in vecs.iter().enumerate() {
            axpy(y[(i, col)], v, &mut out);
        }
        out
    }
}

pub(crate) fn block_lanczos<T: Real>(problem: &EigenProblem<T>, opts: &SolveOptions, available: usize) -> Result<KrylovOutcome<T>> {
    let n = problem.dof();
    let count = opts.count;
    let sigma = T::of(opts.shift);
    let tol = T::of(opts.tol);
    let bsize = opts.block_size.max(1).min(available);
    let max_basis = opts.max_basis.unwrap_or(3 * count + 4 * bsize).max(count + bsize).min(available);
    let keep = (count + bsize).min(max_basis - bsize.min(max_basis)).max(count);

    let solver = problem.factor_shifted(sigma)?;
    let deflator = problem.deflator()?;
    let project = |x: Vec<T>| match &deflator {
        Some(d) => d.project(&x),
        None => x,
    };
    let applications = Cell::new(0usize);
    let apply_op = |x: &[T]| {
        applications.set(applications.get() + 1);
        project(solver.solve(&problem.apply_b(x)))
    };

    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let random = |rng: &mut ChaCha8Rng| project((0..n).map(|_| T::of(rng.gen_range(-1.0..1.0))).collect());

    let mut basis = Basis { v: Vec::new(), bv: Vec::new(), w: Vec::new() };
    let mut block: Vec<Vec<T>> = (0..bsize).map(|_| random(&mut rng)).collect();
    let mut last_residuals = Vec::new();
    let max_steps = opts.max_iterations.max(1);

    for _step in 0..max_steps {
        // extend the basis with the candidate block
        let mut added = Vec::new();
        for cand in block.drain(..) {
            if basis.len() >= available {
                break;
            }
            let b_norm = |x: &[T]| dot(x, &problem.apply_b(x)).max(T::zero()).sqrt();
            let reference = b_norm(&cand);
            let (mut x, mut bx, mut nrm) = basis.orthogonalize(cand, problem);
            let mut independent = nrm > T::of(1e-8) * reference;
            // numerically dependent: refill with a fresh random direction
            for _ in 0..3 {
                if independent {
                    break;
                }
                let r = random(&mut rng);
                let rref = b_norm(&r);
                (x, bx, nrm) = basis.orthogonalize(r, problem);
                independent = nrm > T::of(1e-8) * rref;
            }
            if !independent {
                continue;
            }
            let inv = T::one() / nrm;
            x.iter_mut().for_each(|v| *v *= inv);
            bx.iter_mut().for_each(|v| *v *= inv);
            basis.v.push(x);
            basis.bv.push(bx);
            added.push(basis.len() - 1);
        }
        for &i in &added {
            let wi = apply_op(&basis.v[i]);
            basis.w.push(wi);
        }
        let m = basis.len();
        if m == 0 {
            return Err(Error::EigenNoConvergence { residuals: Vec::new() });
        }

        if m >= count.min(available) && (m >= count + bsize || m >= available || added.is_empty() || m >= max_basis) {
            // Rayleigh-Ritz on the B-orthonormal basis
            let t = DenseMatrix::from_fn(m, m, |i, j| {
                let half = T::of(0.5);
                half * (dot(&basis.bv[i], &basis.w[j]) + dot(&basis.bv[j], &basis.w[i]))
            });
            let eig = symmetric_eigen(&t);
            // largest theta first
            let order: Vec<usize> = (0..m).rev().collect();
            let wanted = count.min(m);
            let mut converged = true;
            let mut ritz = Vec::with_capacity(wanted);
            last_residuals.clear();
            for &col in order.iter().take(wanted) {
                let theta = eig.values[col];
                let x = Basis::combine(&basis.v, &eig.vectors, col);
                let bx = problem.apply_b(&x);
                let xbx = dot(&x, &bx);
                let alpha = dot(&x, &problem.apply_a(&x)) / xbx;
                let res = relative_residual(problem, &x, alpha, sigma);
                last_residuals.push(res.as_f64());
                if !(res <= tol) || !(theta > T::zero()) {
                    converged = false;
                }
                ritz.push((alpha, x, xbx));
            }
            if converged || m >= available {
                let mut values = Vec::with_capacity(wanted);
                let mut vectors = Vec::with_capacity(wanted);
                for (alpha, mut x, xbx) in ritz {
                    let s = T::one() / xbx.sqrt();
                    x.iter_mut().for_each(|v| *v *= s);
                    values.push(alpha);
                    vectors.push(x);
                }
                if !converged {
                    return Err(Error::EigenNoConvergence { residuals: last_residuals });
                }
                return Ok(KrylovOutcome { values, vectors, operator_applications: applications.get() });
            }

            if m + bsize > max_basis {
                // thick restart on the leading Ritz vectors
                let kept: Vec<usize> = order.iter().take(keep.min(m)).copied().collect();
                let new_v: Vec<Vec<T>> = kept.iter().map(|&c| Basis::combine(&basis.v, &eig.vectors, c)).collect();
                let new_bv: Vec<Vec<T>> = kept.iter().map(|&c| Basis::combine(&basis.bv, &eig.vectors, c)).collect();
                let new_w: Vec<Vec<T>> = kept.iter().map(|&c| Basis::combine(&basis.w, &eig.vectors, c)).collect();
                // the Ritz residuals lie in the span of the newest images
                // B-orthogonal to the whole old basis
                block = added.iter().map(|&i| basis.orthogonalize(basis.w[i].clone(), problem).0).collect();
                basis = Basis { v: new_v, bv: new_bv, w: new_w };
                while block.len() < bsize {
                    block.push(random(&mut rng));
                }
                continue;
            }
        }
        block = added.iter().map(|&i| basis.w[i].clone()).collect();
        while block.len() < bsize {
            block.push(random(&mut rng));
        }
    }
    Err(Error::EigenNoConvergence { residuals: last_residuals })
}
