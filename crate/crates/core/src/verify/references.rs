//! Oracle spectra for the families appearing in the decomposition, keyed by
//! boundary condition and degree.

use super::{closed_form_spectrum, ordered_disjoint_union, DecompositionReferences, OracleKind, OrderedSpectrum};
use crate::assembly::BcKind;
use crate::error::Result;
use crate::mesh::CanonicalDomain;

fn binomial(n: usize, k: usize) -> usize {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

fn oracle(domain: &CanonicalDomain, kind: OracleKind, k: usize) -> Option<OrderedSpectrum> {
    closed_form_spectrum(domain, kind, k).ok()
}

/// First `k` nonzero values of the closed nonharmonic absolute `p`-forms:
/// empty for `p = 0`, nonzero Neumann values for `p = 1`, Maxwell values
/// for `p = 2` in 3D and Dirichlet values for `p = n`.
pub fn closed_family(domain: &CanonicalDomain, p: usize, k: usize) -> Option<OrderedSpectrum> {
    let n = domain.dim();
    match p {
        0 => Some(OrderedSpectrum::oracle(Vec::new(), None)),
        _ if p == n => oracle(domain, OracleKind::Dirichlet, k),
        1 => oracle(domain, OracleKind::Neumann, k + 1).map(|s| s.skip(1)),
        2 if n == 3 => oracle(domain, OracleKind::MaxwellCavity, k),
        _ => None,
    }
}

/// Co-exact `p`-forms share their spectrum with the closed `(p+1)`-forms.
pub fn coexact_family(domain: &CanonicalDomain, p: usize, k: usize) -> Option<OrderedSpectrum> {
    if p >= domain.dim() {
        Some(OrderedSpectrum::oracle(Vec::new(), None))
    } else {
        closed_family(domain, p + 1, k)
    }
}

pub fn decomposition_references(domain: &CanonicalDomain, p: usize, k: usize) -> DecompositionReferences {
    DecompositionReferences { closed: closed_family(domain, p, k), coexact: coexact_family(domain, p, k) }
}

/// First `k` nonzero eigenvalues of the continuum problem discretized by
/// `bc` in degree `p`, or `None` without a closed form.
pub fn nonzero_reference(domain: &CanonicalDomain, bc: BcKind, p: usize, k: usize) -> Result<Option<OrderedSpectrum>> {
    Ok(match bc {
        BcKind::ScalarDirichlet => oracle(domain, OracleKind::Dirichlet, k),
        BcKind::ScalarNeumann => oracle(domain, OracleKind::Neumann, k + 1).map(|s| s.skip(1)),
        BcKind::CurlcurlRelative => oracle(domain, OracleKind::MaxwellCavity, k),
        BcKind::TrueDirichlet => {
            let copies = binomial(domain.dim(), p);
            oracle(domain, OracleKind::Dirichlet, k).map(|s| {
                let mut r = s.repeated(copies);
                r.values.truncate(k);
                r
            })
        }
        BcKind::Absolute => match (closed_family(domain, p, k), coexact_family(domain, p, k)) {
            (Some(a), Some(b)) => {
                let mut u = ordered_disjoint_union(&a, &b)?;
                u.values.truncate(k);
                u.labels = None;
                Some(u)
            }
            _ => None,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn square_one_form_reference() {
        let sq = CanonicalDomain::UnitSquare;
        let r = nonzero_reference(&sq, BcKind::Absolute, 1, 10).unwrap().unwrap();
        let e: Vec<f64> = r.values.iter().map(|v| (v / (PI * PI)).round()).collect();
        assert_eq!(e, vec![1.0, 1.0, 2.0, 2.0, 4.0, 4.0, 5.0, 5.0, 5.0, 5.0]);
        let top = nonzero_reference(&sq, BcKind::Absolute, 2, 3).unwrap().unwrap();
        assert!((top.values[0] - 2.0 * PI * PI).abs() < 1e-12);
        let td = nonzero_reference(&sq, BcKind::TrueDirichlet, 1, 3).unwrap().unwrap();
        assert_eq!(td.values[0], td.values[1]);
        assert!(nonzero_reference(&CanonicalDomain::LShape, BcKind::Absolute, 1, 3).unwrap().is_none());
    }

    #[test]
    fn cube_families() {
        let c = CanonicalDomain::UnitCube;
        let one = decomposition_references(&c, 1, 4);
        assert!((one.coexact.unwrap().values[0] - 2.0 * PI * PI).abs() < 1e-12);
        assert!((one.closed.unwrap().values[0] - PI * PI).abs() < 1e-12);
        let two = decomposition_references(&c, 2, 4);
        assert!((two.coexact.unwrap().values[0] - 3.0 * PI * PI).abs() < 1e-12);
        assert_eq!(binomial(3, 2), 3);
    }
}
