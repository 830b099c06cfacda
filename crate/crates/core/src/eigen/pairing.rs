//! Co-exact `p`-eigenforms mapped by `D_p` to closed `(p+1)`-eigenforms.

use serde::Serialize;

use super::{FormTag, SpectrumResult, CLUSTER_TOL};
use crate::assembly::{hodge_laplacian_absolute, BcKind};
use crate::error::{Error, Result};
use crate::mesh::SimplicialComplex;
use crate::scalar::{dot, Real};

#[derive(Clone, Debug, Serialize)]
pub struct PairEntry {
    /// Position in the degree-`p` spectrum.
    pub index: usize,
    pub eigenvalue: f64,
    /// Rayleigh quotient of `v = D_p xi` in the degree-`(p+1)` absolute pencil.
    pub image_rayleigh: f64,
    /// `|R(v) - alpha| / alpha`.
    pub rayleigh_gap: f64,
    /// `| ||D_p xi||^2 - alpha ||xi||^2 | / (alpha ||xi||^2)`.
    pub energy_defect: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct PairingReport {
    pub degree: usize,
    pub entries: Vec<PairEntry>,
    /// Harmonic pairs, which have no image.
    pub skipped_harmonic: usize,
}

impl PairingReport {
    pub fn max_energy_defect(&self) -> f64 {
        self.entries.iter().fold(0.0, |m, e| m.max(e.energy_defect))
    }

    pub fn max_rayleigh_gap(&self) -> f64 {
        self.entries.iter().fold(0.0, |m, e| m.max(e.rayleigh_gap))
    }
}

/// Maps every co-exact nonharmonic eigenform of a classified absolute
/// (or scalar Neumann) degree-`p` result through `D_p` and measures how well
/// the image is an eigenform of the degree-`(p+1)` absolute pencil.
pub fn pair_across_degrees<T: Real>(result: &SpectrumResult<T>, complex: &SimplicialComplex) -> Result<PairingReport> {
    let p = result.degree;
    if !matches!(result.bc, BcKind::Absolute | BcKind::ScalarNeumann) {
        return Err(Error::Unsupported(format!("pairing needs absolute conditions, got `{}`", result.bc)));
    }
    if p >= complex.dim() {
        return Err(Error::Parameter(format!("no degree above {p} on a {}-dimensional mesh", complex.dim())));
    }
    if result.tags.len() != result.len() {
        return Err(Error::Contract("pairing needs a classified spectrum".into()));
    }
    let upper = hodge_laplacian_absolute::<T>(complex, p + 1)?;
    let lower_mass = crate::dec::mass_matrix::<T>(complex, p)?;
    let d = crate::dec::coboundary_matrix::<T>(complex, p)?;
    let mut entries = Vec::new();
    let mut skipped = 0;
    for (i, (x, tag)) in result.eigenvectors.iter().zip(&result.tags).enumerate() {
        match tag {
            FormTag::Harmonic => skipped += 1,
            FormTag::Coexact => {
                let alpha = result.eigenvalues[i].as_f64();
                let xi = result.dof_map.expand(x, 0);
                let v = d.mul_vec(&xi);
                let vmv = dot(&v, &upper.apply_b(&v)).as_f64();
                let vav = dot(&v, &upper.apply_a(&v)).as_f64();
                let xmx = dot(&xi, &lower_mass.mul_vec(&xi)).as_f64();
                let rq = vav / vmv;
                entries.push(PairEntry {
                    index: i,
                    eigenvalue: alpha,
                    image_rayleigh: rq,
                    rayleigh_gap: (rq - alpha).abs() / alpha,
                    energy_defect: (vmv - alpha * xmx).abs() / (alpha * xmx),
                });
            }
            _ => {}
        }
    }
    Ok(PairingReport { degree: p, entries, skipped_harmonic: skipped })
}

/// Counts compared by [`coexact_closed_counts`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct CountCorrespondence {
    /// Co-exact degree-`p` values considered.
    pub coexact: usize,
    /// Closed nonharmonic degree-`(p+1)` values up to the same cutoff.
    pub closed: usize,
    /// One-to-one matches between the two lists.
    pub matched: usize,
}

impl CountCorrespondence {
    pub fn agrees(&self) -> bool {
        self.coexact == self.closed && self.matched == self.coexact
    }
}

/// Count correspondence between the co-exact part of a degree-`p` spectrum
/// and the closed nonharmonic part of the degree-`(p+1)` spectrum.
///
/// Takes the first `k` co-exact values of `lower`, extended to the end of a
/// cluster; the cutoff is the last of them. Closed values of `upper` up to
/// the cutoff are counted and greedily matched one-to-one within relative
/// `rel_tol`. Errors if `upper` does not reach past the cutoff.
pub fn coexact_closed_counts<T: Real>(
    lower: &SpectrumResult<T>,
    upper: &SpectrumResult<T>,
    k: usize,
    rel_tol: f64,
) -> Result<CountCorrespondence> {
    if upper.degree != lower.degree + 1 {
        return Err(Error::Contract(format!("degrees {} and {} are not consecutive", lower.degree, upper.degree)));
    }
    let coexact = tagged(lower, FormTag::Coexact);
    if coexact.len() < k || k == 0 {
        return Err(Error::Contract(format!("only {} co-exact values available, {k} requested", coexact.len())));
    }
    let close = |a: f64, b: f64| (a - b).abs() <= rel_tol.max(CLUSTER_TOL) * a.abs().max(b.abs());
    let mut take = k;
    while take < coexact.len() && close(coexact[take], coexact[take - 1]) {
        take += 1;
    }
    let wanted = &coexact[..take];
    let cutoff = wanted[take - 1] * (1.0 + rel_tol);
    if upper.eigenvalues.last().is_none_or(|v| v.as_f64() <= cutoff) {
        return Err(Error::Contract(format!("degree-{} spectrum does not extend past {cutoff}", upper.degree)));
    }
    let closed: Vec<f64> = tagged(upper, FormTag::Closed).into_iter().filter(|&b| b <= cutoff).collect();
    let mut used = vec![false; closed.len()];
    let mut matched = 0;
    for &a in wanted {
        if let Some(j) = (0..closed.len()).find(|&j| !used[j] && (a - closed[j]).abs() <= rel_tol * a.abs()) {
            used[j] = true;
            matched += 1;
        }
    }
    Ok(CountCorrespondence { coexact: take, closed: closed.len(), matched })
}

fn tagged<T: Real>(r: &SpectrumResult<T>, tag: FormTag) -> Vec<f64> {
    r.eigenvalues.iter().zip(&r.tags).filter(|(_, &t)| t == tag).map(|(v, _)| v.as_f64()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assembly::scalar_laplacian;
    use crate::dec::DeRhamComplex;
    use crate::eigen::{classify_eigenforms, solve, SolveOptions};
    use crate::mesh::{generate, CanonicalDomain};

    fn run(m: &SimplicialComplex, p: usize, count: usize) -> SpectrumResult<f64> {
        let prob = hodge_laplacian_absolute::<f64>(m, p).unwrap();
        let dr = DeRhamComplex::new(m).unwrap();
        let mut r = solve(&prob, &SolveOptions::with_count(count)).unwrap();
        classify_eigenforms(&mut r, &prob, &dr).unwrap();
        r
    }

    #[test]
    fn neumann_functions_map_to_exact_one_forms() {
        let m = generate(CanonicalDomain::UnitSquare, 12).unwrap();
        let prob = scalar_laplacian::<f64>(&m, BcKind::ScalarNeumann).unwrap();
        let dr = DeRhamComplex::new(&m).unwrap();
        let mut r = solve(&prob, &SolveOptions::with_count(7)).unwrap();
        classify_eigenforms(&mut r, &prob, &dr).unwrap();
        let rep = pair_across_degrees(&r, &m).unwrap();
        assert_eq!(rep.skipped_harmonic, 1);
        assert_eq!(rep.entries.len(), 6);
        assert!(rep.max_energy_defect() < 1e-9, "{rep:?}");
        assert!(rep.max_rayleigh_gap() < 1e-7, "{rep:?}");
    }

    #[test]
    fn one_forms_map_to_closed_two_forms() {
        let m = generate(CanonicalDomain::UnitSquare, 10).unwrap();
        let r1 = run(&m, 1, 10);
        let rep = pair_across_degrees(&r1, &m).unwrap();
        assert!(!rep.entries.is_empty());
        assert!(rep.max_energy_defect() < 1e-7, "{rep:?}");
        assert!(pair_across_degrees(&run(&m, 2, 3), &m).is_err());
    }

    #[test]
    fn counts_agree_on_the_square() {
        let m = generate(CanonicalDomain::UnitSquare, 10).unwrap();
        let r0 = run(&m, 0, 14);
        let r1 = run(&m, 1, 24);
        let c = coexact_closed_counts(&r0, &r1, 8, 1e-6).unwrap();
        assert!(c.coexact >= 8);
        assert!(c.agrees(), "{c:?}");
        assert!(coexact_closed_counts(&r1, &r0, 1, 1e-6).is_err());
    }
}
