//! Spectrum multisets, closed-form oracles and the spectral checks.

mod oracle;
mod references;

use std::collections::BTreeMap;

use serde::Serialize;

use crate::eigen::{FormTag, SpectrumResult};
use crate::error::{Error, Result};
use crate::scalar::Real;

pub use oracle::{bessel_j, bessel_j_prime, bessel_prime_zeros, bessel_zeros, closed_form_spectrum, counting_function, OracleKind};
pub use references::{closed_family, coexact_family, decomposition_references, nonzero_reference};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    Computed,
    Oracle,
    Union,
}

/// A nondecreasing finite prefix of an eigenvalue sequence.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OrderedSpectrum {
    pub values: Vec<f64>,
    pub provenance: Provenance,
    /// Optional per-value source tags.
    pub labels: Option<Vec<String>>,
}

impl OrderedSpectrum {
    /// Checked constructor; rejects unsorted or non-finite values.
    pub fn new(values: Vec<f64>, provenance: Provenance) -> Result<Self> {
        let s = Self { values, provenance, labels: None };
        s.check_sorted()?;
        Ok(s)
    }

    /// Sorts `values` first.
    pub fn computed(mut values: Vec<f64>) -> Self {
        values.sort_by(f64::total_cmp);
        Self { values, provenance: Provenance::Computed, labels: None }
    }

    pub(crate) fn oracle(values: Vec<f64>, labels: Option<Vec<String>>) -> Self {
        Self { values, provenance: Provenance::Oracle, labels }
    }

    pub fn of_result<T: Real>(result: &SpectrumResult<T>) -> Self {
        Self::computed(result.values_f64())
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Drops the first `n` values (e.g. a kernel).
    pub fn skip(&self, n: usize) -> Self {
        Self {
            values: self.values.iter().skip(n).copied().collect(),
            provenance: self.provenance,
            labels: self.labels.as_ref().map(|l| l.iter().skip(n).cloned().collect()),
        }
    }

    /// Each value repeated `copies` times.
    pub fn repeated(&self, copies: usize) -> Self {
        Self {
            values: self.values.iter().flat_map(|&v| std::iter::repeat_n(v, copies)).collect(),
            provenance: self.provenance,
            labels: None,
        }
    }

    fn check_sorted(&self) -> Result<()> {
        if let Some(i) = self.values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Contract(format!("spectrum value {i} is not finite")));
        }
        if let Some(i) = self.values.windows(2).position(|w| w[1] < w[0]) {
            return Err(Error::Contract(format!("spectrum decreases at index {}", i + 1)));
        }
        if let Some(l) = &self.labels {
            if l.len() != self.values.len() {
                return Err(Error::Contract("label count differs from value count".into()));
            }
        }
        Ok(())
    }
}

/// Ordered disjoint union: the sorted merge, in which every value occurs as
/// often as in `a` and `b` together. Ties keep `a` first.
pub fn ordered_disjoint_union(a: &OrderedSpectrum, b: &OrderedSpectrum) -> Result<OrderedSpectrum> {
    a.check_sorted()?;
    b.check_sorted()?;
    let mut values = Vec::with_capacity(a.len() + b.len());
    let keep_labels = a.labels.is_some() && b.labels.is_some();
    let mut labels = Vec::new();
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        let take_a = j == b.len() || (i < a.len() && a.values[i] <= b.values[j]);
        let (src, k) = if take_a { (a, &mut i) } else { (b, &mut j) };
        values.push(src.values[*k]);
        if keep_labels {
            labels.push(src.labels.as_ref().unwrap()[*k].clone());
        }
        *k += 1;
    }
    Ok(OrderedSpectrum { values, provenance: Provenance::Union, labels: keep_labels.then_some(labels) })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    Exploratory,
}

impl Status {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Pass => "pass",
            Self::Fail => "fail",
            Self::Exploratory => "exploratory",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Violation {
    /// 1-based position in the compared prefix.
    pub index: usize,
    pub value: f64,
    pub reference: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerificationReport {
    pub name: String,
    pub status: Status,
    /// Largest relative deviation (or slack used, for inequalities).
    pub worst_dev: f64,
    pub first_violation: Option<Violation>,
    /// Per-index deviation or slack.
    pub deviations: Vec<f64>,
    pub parameters: BTreeMap<String, f64>,
    pub notes: Vec<String>,
    /// Sub-checks, for composite reports.
    pub parts: Vec<VerificationReport>,
}

impl VerificationReport {
    pub fn new(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            status: Status::Pass,
            worst_dev: 0.0,
            first_violation: None,
            deviations: Vec::new(),
            parameters: BTreeMap::new(),
            notes: Vec::new(),
            parts: Vec::new(),
        }
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }

    pub fn with_param(mut self, key: &str, value: f64) -> Self {
        self.parameters.insert(key.to_string(), value);
        self
    }

    fn record(&mut self, dev: f64, index: usize, value: f64, reference: f64, ok: bool) {
        self.deviations.push(dev);
        self.worst_dev = self.worst_dev.max(dev);
        if !ok && self.first_violation.is_none() {
            self.status = Status::Fail;
            self.first_violation = Some(Violation { index, value, reference });
        }
    }

    /// Folds a sub-check into this report. Failure dominates exploratory.
    pub fn absorb(&mut self, part: VerificationReport) {
        self.worst_dev = self.worst_dev.max(part.worst_dev);
        match (self.status, part.status) {
            (Status::Fail, _) => {}
            (_, Status::Fail) => {
                self.status = Status::Fail;
                self.first_violation = part.first_violation.clone();
            }
            (_, Status::Exploratory) => self.status = Status::Exploratory,
            _ => {}
        }
        self.parts.push(part);
    }

    pub fn exploratory(mut self, note: impl Into<String>) -> Self {
        if self.status == Status::Pass {
            self.status = Status::Exploratory;
        }
        self.notes.push(note.into());
        self
    }
}

/// Index-wise comparison of the first `k` values:
/// `|a_i - b_i| <= rel_tol * max(|b_i|, 1e-9 b_k)`.
pub fn match_spectra(a: &OrderedSpectrum, b: &OrderedSpectrum, rel_tol: f64, k: usize) -> Result<VerificationReport> {
    if a.len() < k || b.len() < k {
        return Err(Error::Contract(format!("match_spectra needs {k} values, got {} and {}", a.len(), b.len())));
    }
    let mut rep = VerificationReport::new("match_spectra").with_param("K", k as f64).with_param("rel_tol", rel_tol);
    if k == 0 {
        return Ok(rep);
    }
    let floor = 1e-9 * b.values[k - 1].abs();
    for i in 0..k {
        let (x, y) = (a.values[i], b.values[i]);
        let scale = y.abs().max(floor);
        let dev = if scale > 0.0 { (x - y).abs() / scale } else { (x - y).abs() };
        rep.record(dev, i + 1, x, y, dev <= rel_tol);
    }
    Ok(rep)
}

/// Independent references for the two families of a decomposition check.
#[derive(Clone, Debug, Default)]
pub struct DecompositionReferences {
    /// Expected nonharmonic closed values.
    pub closed: Option<OrderedSpectrum>,
    /// Expected co-exact values.
    pub coexact: Option<OrderedSpectrum>,
}

/// Splits the first `k` eigenpairs by tag and checks
/// (i) that closed (with harmonic) and co-exact values merge back to the
/// computed prefix exactly, and (ii) that each family matches its reference.
///
/// UNRESOLVED tags in the prefix, a non-simply-connected domain or a missing
/// reference make the reference part exploratory.
pub fn check_decomposition<T: Real>(
    full: &SpectrumResult<T>,
    k: usize,
    rel_tol: f64,
    references: &DecompositionReferences,
) -> Result<VerificationReport> {
    if full.tags.len() != full.len() {
        return Err(Error::Contract("check_decomposition needs a classified spectrum".into()));
    }
    if full.len() < k {
        return Err(Error::Contract(format!("need {k} eigenpairs, have {}", full.len())));
    }
    let values = full.values_f64();
    let pick = |want: &dyn Fn(FormTag) -> bool| -> Vec<f64> {
        values[..k].iter().zip(&full.tags[..k]).filter(|(_, &t)| want(t)).map(|(&v, _)| v).collect()
    };
    let closed_all = OrderedSpectrum::computed(pick(&|t| matches!(t, FormTag::Closed | FormTag::Harmonic)));
    let closed = OrderedSpectrum::computed(pick(&|t| t == FormTag::Closed));
    let coexact = OrderedSpectrum::computed(pick(&|t| t == FormTag::Coexact));
    let unresolved = full.tags[..k].iter().filter(|&&t| t == FormTag::Unresolved).count();

    let mut rep = VerificationReport::new("decomposition")
        .with_param("K", k as f64)
        .with_param("rel_tol", rel_tol)
        .with_param("h", full.meta.h)
        .with_param("degree", full.degree as f64);
    rep.parameters.insert("closed_count".into(), closed_all.len() as f64);
    rep.parameters.insert("coexact_count".into(), coexact.len() as f64);

    // (i) tag partition, exact
    let mut partition = VerificationReport::new("tag_partition");
    let merged = ordered_disjoint_union(&closed_all, &coexact)?;
    let resolved: Vec<f64> =
        values[..k].iter().zip(&full.tags[..k]).filter(|(_, &t)| t != FormTag::Unresolved).map(|(&v, _)| v).collect();
    if merged.len() != resolved.len() {
        partition.status = Status::Fail;
        partition.notes.push(format!("{} values tagged, {} resolved", merged.len(), resolved.len()));
    }
    for (i, (a, b)) in merged.values.iter().zip(&resolved).enumerate() {
        partition.record((a - b).abs(), i + 1, *a, *b, a == b);
    }
    rep.absorb(partition);

    // (ii) references
    for (name, part, reference) in
        [("closed_vs_reference", &closed, &references.closed), ("coexact_vs_reference", &coexact, &references.coexact)]
    {
        let sub = match reference {
            Some(r) if r.len() >= part.len() => {
                let mut m = match_spectra(part, r, rel_tol, part.len())?;
                m.name = name.to_string();
                m
            }
            Some(r) => VerificationReport::new(name).exploratory(format!("reference has {} values, need {}", r.len(), part.len())),
            None => VerificationReport::new(name).exploratory("no independent reference"),
        };
        let sub = if !full.meta.simply_connected {
            sub.exploratory("domain is not simply connected")
        } else if full.meta.exploratory {
            sub.exploratory("domain has a re-entrant corner")
        } else {
            sub
        };
        rep.absorb(sub);
    }
    if unresolved > 0 {
        rep = rep.exploratory(format!("{unresolved} UNRESOLVED tags in the prefix"));
    }
    Ok(rep)
}

/// Index relation of an eigenvalue inequality `theta_{idx(m)} <= lambda_m`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IndexMap {
    /// `idx(m) = (n - 1) m + 1`.
    Dimension(usize),
    /// `idx(m) = m + s`.
    Shift(usize),
}

impl IndexMap {
    pub fn index(&self, m: usize) -> usize {
        match *self {
            Self::Dimension(n) => (n.max(1) - 1) * m + 1,
            Self::Shift(s) => m + s,
        }
    }
}

/// Checks `theta_{idx(m)} <= lambda_m (1 + slack)` for `m = 1..=m_max`
/// (1-based indices). Deviations record `theta / lambda - 1`.
pub fn check_inequality(
    theta: &OrderedSpectrum,
    lambda: &OrderedSpectrum,
    map: IndexMap,
    m_max: usize,
    slack: f64,
) -> Result<VerificationReport> {
    let need = map.index(m_max);
    if theta.len() < need || lambda.len() < m_max {
        return Err(Error::Contract(format!(
            "inequality up to m = {m_max} needs {need} upper and {m_max} lower values, got {} and {}",
            theta.len(),
            lambda.len()
        )));
    }
    let mut rep = VerificationReport::new("inequality").with_param("m_max", m_max as f64).with_param("slack", slack);
    match map {
        IndexMap::Dimension(n) => rep.parameters.insert("n".into(), n as f64),
        IndexMap::Shift(s) => rep.parameters.insert("shift".into(), s as f64),
    };
    rep.worst_dev = f64::NEG_INFINITY;
    for m in 1..=m_max {
        let t = theta.values[map.index(m) - 1];
        let l = lambda.values[m - 1];
        let dev = t / l - 1.0;
        rep.record(dev, m, t, l, t <= l * (1.0 + slack));
    }
    if m_max == 0 {
        rep.worst_dev = 0.0;
    }
    Ok(rep)
}

/// Harmonic count against an expected Betti number.
pub fn check_harmonic_count<T: Real>(result: &SpectrumResult<T>, expected: usize) -> VerificationReport {
    let mut rep = VerificationReport::new("harmonic_count")
        .with_param("expected", expected as f64)
        .with_param("threshold", result.harmonic_threshold);
    rep.parameters.insert("count".into(), result.harmonic_count as f64);
    let c = result.harmonic_count;
    let ok = c == expected;
    rep.record((c as f64 - expected as f64).abs(), 1, c as f64, expected as f64, ok);
    if c < result.len() && c > 0 {
        let v = result.values_f64();
        let gap = v[c] / v[c - 1].abs().max(f64::MIN_POSITIVE);
        rep.parameters.insert("gap_ratio".into(), gap);
    }
    rep
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn spec(v: &[f64]) -> OrderedSpectrum {
        OrderedSpectrum::new(v.to_vec(), Provenance::Computed).unwrap()
    }

    #[test]
    fn union_examples() {
        assert_eq!(ordered_disjoint_union(&spec(&[1.0, 3.0]), &spec(&[2.0])).unwrap().values, vec![1.0, 2.0, 3.0]);
        assert_eq!(ordered_disjoint_union(&spec(&[1.0, 1.0]), &spec(&[1.0])).unwrap().values, vec![1.0; 3]);
        let a = spec(&[0.5, 4.0]);
        let u = ordered_disjoint_union(&a, &spec(&[])).unwrap();
        assert_eq!(u.values, a.values);
        assert_eq!(u.provenance, Provenance::Union);
        let bad = OrderedSpectrum { values: vec![2.0, 1.0], provenance: Provenance::Computed, labels: None };
        assert!(matches!(ordered_disjoint_union(&bad, &a), Err(Error::Contract(_))));
        assert!(OrderedSpectrum::new(vec![2.0, 1.0], Provenance::Oracle).is_err());
    }

    #[test]
    fn union_keeps_labels() {
        let sq = crate::mesh::CanonicalDomain::UnitSquare;
        let d = closed_form_spectrum(&sq, OracleKind::Dirichlet, 3).unwrap();
        let n = closed_form_spectrum(&sq, OracleKind::Neumann, 3).unwrap();
        let u = ordered_disjoint_union(&d, &n).unwrap();
        assert_eq!(u.labels.as_ref().unwrap().len(), 6);
        assert_eq!(u.labels.unwrap()[0], "j=0,k=0");
    }

    #[test]
    fn matching_examples() {
        let b = spec(&[1.0, 2.0, 2.0, 5.0]);
        let same = match_spectra(&b, &b, 0.0, 4).unwrap();
        assert!(same.passed());
        assert_eq!(same.worst_dev, 0.0);
        let shifted = OrderedSpectrum::computed(b.values.iter().map(|v| v * 1.01).collect());
        assert!(match_spectra(&shifted, &b, 0.02, 4).unwrap().passed());
        let missing = spec(&[1.0, 2.0, 5.0, 6.0]);
        let r = match_spectra(&missing, &b, 0.02, 4).unwrap();
        assert_eq!(r.status, Status::Fail);
        assert_eq!(r.first_violation.unwrap().index, 3);
        assert!(match_spectra(&b, &b, 0.1, 5).is_err());
    }

    #[test]
    fn near_zero_entries_use_the_floor() {
        let a = spec(&[1e-14, 1.0]);
        let b = spec(&[0.0, 1.0]);
        assert!(match_spectra(&a, &b, 0.01, 2).unwrap().passed());
    }

    #[test]
    fn oracle_inequalities() {
        let sq = crate::mesh::CanonicalDomain::UnitSquare;
        let mu = closed_form_spectrum(&sq, OracleKind::Neumann, 30).unwrap();
        let lam = closed_form_spectrum(&sq, OracleKind::Dirichlet, 20).unwrap();
        assert!(check_inequality(&mu, &lam, IndexMap::Shift(2), 20, 0.0).unwrap().passed());
        assert!(check_inequality(&mu, &lam, IndexMap::Shift(1), 20, 0.0).unwrap().passed());
        // mu_3 = pi^2 <= lambda_1 = 2 pi^2
        let r = check_inequality(&mu, &lam, IndexMap::Shift(2), 5, 0.0).unwrap();
        assert!((r.deviations[0] + 0.5).abs() < 1e-12);

        let cube = crate::mesh::CanonicalDomain::UnitCube;
        let th = closed_form_spectrum(&cube, OracleKind::MaxwellCavity, 11).unwrap();
        let lc = closed_form_spectrum(&cube, OracleKind::Dirichlet, 5).unwrap();
        let r = check_inequality(&th, &lc, IndexMap::Dimension(3), 5, 0.0).unwrap();
        assert!(r.passed());
        assert!((th.values[2] - 2.0 * PI * PI).abs() < 1e-12);

        let disk = crate::mesh::CanonicalDomain::Disk { radius: 1.0 };
        let md = closed_form_spectrum(&disk, OracleKind::Neumann, 6).unwrap();
        let ld = closed_form_spectrum(&disk, OracleKind::Dirichlet, 3).unwrap();
        let sharp = check_inequality(&md, &ld, IndexMap::Shift(3), 1, 0.0).unwrap();
        assert_eq!(sharp.status, Status::Fail);
        let v = sharp.first_violation.unwrap();
        assert!((v.value - 9.3284).abs() < 1e-3 && (v.reference - 5.7832).abs() < 1e-3);
        assert!(check_inequality(&md, &ld, IndexMap::Shift(2), 1, 0.0).unwrap().passed());
        assert!(check_inequality(&md, &ld, IndexMap::Shift(3), 4, 0.0).is_err());
    }

    fn sorted_vec() -> impl Strategy<Value = Vec<f64>> {
        prop::collection::vec(0u32..50, 0..20).prop_map(|mut v| {
            v.sort();
            v.into_iter().map(f64::from).collect()
        })
    }

    proptest! {
        #[test]
        fn union_is_commutative_and_associative(a in sorted_vec(), b in sorted_vec(), c in sorted_vec()) {
            let (a, b, c) = (spec(&a), spec(&b), spec(&c));
            let ab = ordered_disjoint_union(&a, &b).unwrap();
            prop_assert_eq!(&ab.values, &ordered_disjoint_union(&b, &a).unwrap().values);
            let left = ordered_disjoint_union(&ab, &c).unwrap();
            let right = ordered_disjoint_union(&a, &ordered_disjoint_union(&b, &c).unwrap()).unwrap();
            prop_assert_eq!(&left.values, &right.values);
            prop_assert_eq!(ab.len(), a.len() + b.len());
            if !ab.is_empty() {
                let m = a.values.first().copied().unwrap_or(f64::INFINITY).min(b.values.first().copied().unwrap_or(f64::INFINITY));
                prop_assert_eq!(ab.values[0], m);
            }
            for r in ab.values.iter() {
                let count = |s: &OrderedSpectrum| s.values.iter().filter(|&&x| x == *r).count();
                prop_assert_eq!(count(&ab), count(&a) + count(&b));
            }
        }

        #[test]
        fn matching_is_reflexive(a in sorted_vec()) {
            let s = spec(&a);
            let r = match_spectra(&s, &s, 0.0, s.len()).unwrap();
            prop_assert!(r.passed());
        }
    }
}
