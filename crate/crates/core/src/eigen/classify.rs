//! Closed / co-exact / harmonic tagging of computed eigenforms.

use super::{relative_residual, FormTag, SpectrumResult};
use crate::assembly::{BcKind, EigenProblem};
use crate::dec::DeRhamComplex;
use crate::error::{Error, Result};
use crate::scalar::{axpy, dot, Real};

/// Energy ratio below which a form counts as closed (or co-exact).
pub const CLASSIFICATION_RATIO: f64 = 1e-6;
/// Relative gap below which neighbouring eigenvalues form one cluster.
pub const CLUSTER_TOL: f64 = 1e-6;
/// `B`-norm below which a projected cluster vector is discarded.
const DROP_TOL: f64 = 1e-4;

/// Tags every eigenpair of `result` with the default ratios.
///
/// Clusters of numerically equal eigenvalues are first rotated so that each
/// basis vector is either closed or co-exact; eigenvalues and residuals of a
/// rotated cluster are recomputed from the new vectors.
pub fn classify_eigenforms<T: Real>(
    result: &mut SpectrumResult<T>,
    problem: &EigenProblem<T>,
    de_rham: &DeRhamComplex<T>,
) -> Result<()> {
    classify_with(result, problem, de_rham, CLASSIFICATION_RATIO, CLUSTER_TOL)
}

/// [`classify_eigenforms`] with explicit ratio and cluster tolerance.
pub fn classify_with<T: Real>(
    result: &mut SpectrumResult<T>,
    problem: &EigenProblem<T>,
    de_rham: &DeRhamComplex<T>,
    ratio: f64,
    cluster_tol: f64,
) -> Result<()> {
    match problem.bc {
        BcKind::Absolute | BcKind::ScalarNeumann | BcKind::ScalarDirichlet => {}
        other => return Err(Error::Unsupported(format!("eigenform classification is not defined for `{other}`"))),
    }
    let p = problem.degree;
    let dim = de_rham.dim();
    let n = result.len();
    let threshold = result.harmonic_threshold;
    let values: Vec<f64> = result.values_f64();
    let mut tags = vec![FormTag::Unresolved; n];
    for (i, &v) in values.iter().enumerate() {
        if v < threshold {
            tags[i] = FormTag::Harmonic;
        } else if p == 0 {
            tags[i] = FormTag::Coexact;
        } else if p == dim {
            tags[i] = FormTag::Closed;
        }
    }
    if p == 0 || p == dim {
        result.tags = tags;
        return Ok(());
    }

    let mut start = 0;
    while start < n {
        if tags[start] == FormTag::Harmonic {
            start += 1;
            continue;
        }
        let mut end = start + 1;
        while end < n && (values[end] - values[end - 1]).abs() <= cluster_tol * values[end].abs().max(values[end - 1].abs()) {
            end += 1;
        }
        if end - start > 1 {
            rotate_cluster(result, problem, de_rham, start, end)?;
        }
        for i in start..end {
            tags[i] = tag_by_energy(de_rham, p, &result.eigenvectors[i], problem, ratio);
        }
        start = end;
    }
    result.tags = tags;
    Ok(())
}

fn tag_by_energy<T: Real>(de_rham: &DeRhamComplex<T>, p: usize, x: &[T], problem: &EigenProblem<T>, ratio: f64) -> FormTag {
    let u = problem.dof_map.expand(x, 0);
    let ed = de_rham.differential_energy(p, &u).as_f64();
    let es = de_rham.codifferential_energy(p, &u).as_f64();
    let total = ed + es;
    if ed <= ratio * total {
        FormTag::Closed
    } else if es <= ratio * total {
        FormTag::Coexact
    } else {
        FormTag::Unresolved
    }
}

/// Replaces the cluster basis `start..end` by closed vectors followed by
/// co-exact ones, if the projected parts span exactly the cluster.
fn rotate_cluster<T: Real>(
    result: &mut SpectrumResult<T>,
    problem: &EigenProblem<T>,
    de_rham: &DeRhamComplex<T>,
    start: usize,
    end: usize,
) -> Result<()> {
    let p = problem.degree;
    let mut closed = Vec::new();
    let mut coexact = Vec::new();
    for x in &result.eigenvectors[start..end] {
        let split = de_rham.hodge_split(p, x)?;
        closed.push(split.closed);
        coexact.push(split.coexact);
    }
    let mut basis: Vec<(Vec<T>, Vec<T>)> = Vec::new();
    let mut n_closed = 0;
    for (group, is_closed) in [(closed, true), (coexact, false)] {
        for mut x in group {
            for _ in 0..2 {
                for (v, bv) in &basis {
                    let c = dot(bv, &x);
                    axpy(-c, v, &mut x);
                }
            }
            let mut bx = problem.apply_b(&x);
            let nrm = dot(&x, &bx).max(T::zero()).sqrt();
            if !(nrm.as_f64() > DROP_TOL) {
                continue;
            }
            let s = T::one() / nrm;
            x.iter_mut().for_each(|v| *v *= s);
            bx.iter_mut().for_each(|v| *v *= s);
            basis.push((x, bx));
            if is_closed {
                n_closed += 1;
            }
        }
    }
    if basis.len() != end - start {
        return Ok(());
    }
    let sigma = T::of(result.shift);
    let mut rotated: Vec<(T, Vec<T>, bool)> = basis
        .into_iter()
        .enumerate()
        .map(|(k, (x, bx))| {
            let alpha = dot(&x, &problem.apply_a(&x)) / dot(&x, &bx);
            (alpha, x, k < n_closed)
        })
        .collect();
    rotated.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(std::cmp::Ordering::Equal).then(b.2.cmp(&a.2)));
    for (offset, (alpha, x, _)) in rotated.into_iter().enumerate() {
        let i = start + offset;
        result.residuals[i] = relative_residual(problem, &x, alpha, sigma);
        result.eigenvalues[i] = alpha;
        result.eigenvectors[i] = x;
    }
    Ok(())
}
