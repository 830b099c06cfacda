use std::path::Path;

use hodge_spectra::verify::{Status, VerificationReport, Violation};
use hodge_spectra::{SimplicialComplex, Spectrum};
use serde::Serialize;
use serde_json::{Map, Value};
use sha2::{Digest, Sha256};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Serialize, Debug)]
pub struct CheckEntry {
    pub name: String,
    pub status: Status,
    pub worst_dev: f64,
    pub first_violation: Option<Violation>,
}

impl CheckEntry {
    /// The report itself followed by its parts, flattened.
    pub fn flatten(rep: &VerificationReport) -> Vec<Self> {
        let mut out = vec![Self {
            name: rep.name.clone(),
            status: rep.status,
            worst_dev: rep.worst_dev,
            first_violation: rep.first_violation.clone(),
        }];
        for p in &rep.parts {
            out.extend(Self::flatten(p));
        }
        out
    }
}

/// Run report; field order is part of the output format.
#[derive(Serialize, Debug)]
pub struct Report {
    pub schema_version: u32,
    pub command: String,
    pub domain: String,
    pub dim: usize,
    pub degree: usize,
    pub bc: String,
    pub h: f64,
    pub mesh_hash: String,
    pub seed: u64,
    pub eigenvalues: Vec<f64>,
    pub tags: Vec<String>,
    pub residuals: Vec<f64>,
    pub harmonic_count: usize,
    pub checks: Vec<CheckEntry>,
    /// Tolerances and other inputs needed to reproduce the run.
    pub parameters: Map<String, Value>,
    /// Full verification detail, when the command ran checks.
    pub details: Vec<VerificationReport>,
    pub timestamp: String,
}

impl Report {
    pub fn new(command: &str, complex: &SimplicialComplex, seed: u64) -> Self {
        let meta = hodge_spectra::assembly::ProblemMeta::of(complex);
        Self {
            schema_version: SCHEMA_VERSION,
            command: command.to_string(),
            domain: meta.domain,
            dim: complex.dim(),
            degree: 0,
            bc: String::new(),
            h: meta.h,
            mesh_hash: mesh_hash(complex),
            seed,
            eigenvalues: Vec::new(),
            tags: Vec::new(),
            residuals: Vec::new(),
            harmonic_count: 0,
            checks: Vec::new(),
            parameters: Map::new(),
            details: Vec::new(),
            timestamp: chrono::Utc::now().to_rfc3339(),
        }
    }

    pub fn with_spectrum(mut self, s: &Spectrum) -> Self {
        self.degree = s.degree;
        self.bc = s.bc.as_str().to_string();
        self.eigenvalues = s.eigenvalues.clone();
        self.tags = s.tags.iter().map(|t| t.as_str().to_string()).collect();
        self.residuals = s.residuals.clone();
        self.harmonic_count = s.harmonic_count;
        self
    }

    pub fn param(&mut self, key: &str, value: impl Into<Value>) {
        self.parameters.insert(key.to_string(), value.into());
    }

    pub fn add_check(&mut self, rep: VerificationReport) {
        self.checks.extend(CheckEntry::flatten(&rep));
        self.details.push(rep);
    }

    pub fn write(&self, out: Option<&Path>) -> anyhow::Result<()> {
        let text = serde_json::to_string_pretty(self)? + "\n";
        match out {
            Some(p) => std::fs::write(p, text)?,
            None => print!("{text}"),
        }
        Ok(())
    }
}

/// SHA-256 of the mesh in its text format.
pub fn mesh_hash(complex: &SimplicialComplex) -> String {
    let digest = Sha256::digest(hodge_spectra::mesh::write_mesh(complex).as_bytes());
    digest.iter().map(|b| format!("{b:02x}")).collect()
}
