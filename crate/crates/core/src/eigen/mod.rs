//! Smallest eigenpairs of symmetric pencils, eigenform classification and
//! the pairing of co-exact `p`-forms with closed `(p+1)`-forms.

mod classify;
mod lanczos;
mod pairing;

use serde::{Deserialize, Serialize};

use crate::assembly::{BcKind, DofMap, EigenProblem, ProblemMeta};
use crate::error::{Error, Result};
use crate::linalg::generalized_symmetric_eigen;
use crate::scalar::{dot, norm2, Real};

pub use classify::{classify_eigenforms, classify_with, CLASSIFICATION_RATIO, CLUSTER_TOL};
pub use pairing::{coexact_closed_counts, pair_across_degrees, CountCorrespondence, PairEntry, PairingReport};

#[derive(Clone, Debug)]
pub struct SolveOptions {
    /// Number of smallest eigenpairs wanted.
    pub count: usize,
    /// Bound on the relative residual `||Ax - aBx|| / ((|a| + sigma) ||Bx||)`.
    pub tol: f64,
    pub seed: u64,
    /// Spectral shift making `A + sigma B` definite.
    pub shift: f64,
    pub block_size: usize,
    /// Largest Krylov basis before a thick restart (default `3 count + 4 block`).
    pub max_basis: Option<usize>,
    /// Block steps before giving up.
    pub max_iterations: usize,
    /// Problems with fewer unknowns are solved densely.
    pub dense_threshold: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            count: 6,
            tol: 1e-8,
            seed: 0,
            shift: 1.0,
            block_size: 8,
            max_basis: None,
            max_iterations: 500,
            dense_threshold: 500,
        }
    }
}

impl SolveOptions {
    pub fn with_count(count: usize) -> Self {
        Self { count, ..Self::default() }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum FormTag {
    Closed,
    Coexact,
    Harmonic,
    Unresolved,
}

impl FormTag {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Closed => "CLOSED",
            Self::Coexact => "COEXACT",
            Self::Harmonic => "HARMONIC",
            Self::Unresolved => "UNRESOLVED",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolverKind {
    Dense,
    BlockLanczos,
}

/// Ascending eigenvalues with `B`-orthonormal eigenvectors and diagnostics.
#[derive(Clone, Debug)]
pub struct SpectrumResult<T> {
    pub meta: ProblemMeta,
    pub degree: usize,
    pub bc: BcKind,
    pub dof_map: DofMap,
    pub eigenvalues: Vec<T>,
    /// Eigenvectors in pencil unknowns.
    pub eigenvectors: Vec<Vec<T>>,
    pub residuals: Vec<T>,
    /// Empty until [`classify_eigenforms`] runs.
    pub tags: Vec<FormTag>,
    pub harmonic_count: usize,
    pub harmonic_threshold: f64,
    pub shift: f64,
    pub solver: SolverKind,
    pub operator_applications: usize,
}

impl<T: Real> SpectrumResult<T> {
    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn values_f64(&self) -> Vec<f64> {
        self.eigenvalues.iter().map(|v| v.as_f64()).collect()
    }

    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().fold(0.0, |m, r| m.max(r.as_f64()))
    }

    /// `max |<x_i, x_j>_B - delta_ij|`.
    pub fn b_orthonormality_defect(&self, problem: &EigenProblem<T>) -> f64 {
        let bx: Vec<Vec<T>> = self.eigenvectors.iter().map(|x| problem.apply_b(x)).collect();
        let mut worst: f64 = 0.0;
        for (i, xi) in self.eigenvectors.iter().enumerate() {
            for (j, bxj) in bx.iter().enumerate() {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((dot(xi, bxj).as_f64() - target).abs());
            }
        }
        worst
    }
}

/// `||A x - alpha B x|| / ((|alpha| + sigma) ||B x||)`.
pub fn relative_residual<T: Real>(problem: &EigenProblem<T>, x: &[T], alpha: T, sigma: T) -> T {
    let ax = problem.apply_a(x);
    let bx = problem.apply_b(x);
    let r: Vec<T> = ax.iter().zip(&bx).map(|(&a, &b)| a - alpha * b).collect();
    norm2(&r) / ((alpha.abs() + sigma) * norm2(&bx))
}

/// `max(1e-8 * alpha_ref, 0.1 h^2)` with `alpha_ref` the largest computed eigenvalue.
pub fn harmonic_threshold(values: &[f64], h: f64) -> f64 {
    let alpha_ref = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    (1e-8 * alpha_ref).max(0.1 * h * h)
}

/// Computes the `opts.count` smallest eigenpairs of `problem`.
///
/// Kernel directions attached to the problem for deflation are excluded.
/// Runs are deterministic for a fixed seed.
pub fn solve<T: Real>(problem: &EigenProblem<T>, opts: &SolveOptions) -> Result<SpectrumResult<T>> {
    let n = problem.dof();
    let deflated = problem.deflation.as_ref().map_or(0, |g| g.ncols());
    let available = n.saturating_sub(deflated);
    if opts.count == 0 {
        return Err(Error::Parameter("eigenvalue count must be positive".into()));
    }
    if opts.count > available {
        return Err(Error::Parameter(format!("requested {} eigenpairs but only {available} unknowns remain", opts.count)));
    }
    if !(opts.shift > 0.0) {
        return Err(Error::Parameter(format!("shift must be positive, got {}", opts.shift)));
    }
    let sigma = T::of(opts.shift);
    let (mut pairs, solver, applications) = if n < opts.dense_threshold {
        (dense_pairs(problem, opts.count)?, SolverKind::Dense, 0)
    } else {
        let out = lanczos::block_lanczos(problem, opts, available)?;
        (out.values.into_iter().zip(out.vectors).collect::<Vec<_>>(), SolverKind::BlockLanczos, out.operator_applications)
    };
    pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(std::cmp::Ordering::Equal));
    let residuals: Vec<T> = pairs.iter().map(|(a, x)| relative_residual(problem, x, *a, sigma)).collect();
    let worst = residuals.iter().fold(0.0f64, |m, r| m.max(r.as_f64()));
    if !(worst <= opts.tol) {
        return Err(Error::EigenNoConvergence { residuals: residuals.iter().map(|r| r.as_f64()).collect() });
    }
    let (eigenvalues, eigenvectors): (Vec<T>, Vec<Vec<T>>) = pairs.into_iter().unzip();
    let values: Vec<f64> = eigenvalues.iter().map(|v| v.as_f64()).collect();
    let threshold = harmonic_threshold(&values, problem.meta.h);
    Ok(SpectrumResult {
        meta: problem.meta.clone(),
        degree: problem.degree,
        bc: problem.bc,
        dof_map: problem.dof_map.clone(),
        harmonic_count: values.iter().filter(|&&v| v < threshold).count(),
        harmonic_threshold: threshold,
        eigenvalues,
        eigenvectors,
        residuals,
        tags: Vec::new(),
        shift: opts.shift,
        solver,
        operator_applications: applications,
    })
}

fn dense_pairs<T: Real>(problem: &EigenProblem<T>, count: usize) -> Result<Vec<(T, Vec<T>)>> {
    let a = problem.dense_a();
    let b = problem.mass.to_dense();
    let eig = generalized_symmetric_eigen(&a, &b)?;
    let deflator = problem.deflator()?;
    let mut out = Vec::with_capacity(count);
    for (j, &alpha) in eig.values.iter().enumerate() {
        if out.len() == count {
            break;
        }
        let x = eig.vectors.column(j);
        if let Some(d) = &deflator {
            let px = d.project(&x);
            let k: Vec<T> = x.iter().zip(&px).map(|(&a, &b)| a - b).collect();
            if dot(&k, &problem.apply_b(&k)) > T::of(0.5) {
                continue;
            }
        }
        out.push((alpha, x));
    }
    Ok(out)
}
