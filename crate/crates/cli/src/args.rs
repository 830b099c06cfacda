use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use hodge_spectra::{BcKind, CanonicalDomain};

#[derive(Parser, Debug)]
#[command(name = "hodge-spectra", version, about = "Hodge-Laplacian spectra on simplicial meshes")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Generate a mesh of a canonical domain and write it to a file.
    Mesh(MeshArgs),
    /// Solve an eigenproblem and write a JSON report.
    Solve(SolveArgs),
    /// Run a named spectral check.
    Verify(VerifyArgs),
    /// Tabulate eigenvalues over a sequence of resolutions as CSV.
    Convergence(ConvergenceArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum DomainKind {
    Square,
    Rectangle,
    Disk,
    Annulus,
    Lshape,
    Cube,
}

#[derive(Args, Debug, Clone)]
pub struct DomainArgs {
    #[arg(long, value_enum)]
    pub domain: Option<DomainKind>,
    /// Rectangle width.
    #[arg(long, default_value_t = 1.0)]
    pub a: f64,
    /// Rectangle height.
    #[arg(long, default_value_t = 1.0)]
    pub b: f64,
    /// Annulus inner radius.
    #[arg(long = "r", default_value_t = 0.5)]
    pub inner: f64,
    /// Disk radius or annulus outer radius.
    #[arg(long = "R", default_value_t = 1.0)]
    pub outer: f64,
}

pub fn default_degree(degree: Option<usize>, bc: BcKind) -> usize {
    degree.unwrap_or(if matches!(bc, BcKind::CurlcurlRelative) { 1 } else { 0 })
}

impl ProblemArgs {
    pub fn degree(&self) -> usize {
        self.degree.unwrap_or(0)
    }

    pub fn degree_for(&self, bc: BcKind) -> usize {
        default_degree(self.degree, bc)
    }
}

impl DomainArgs {
    pub fn canonical(&self) -> Option<CanonicalDomain> {
        Some(match self.domain? {
            DomainKind::Square => CanonicalDomain::UnitSquare,
            DomainKind::Rectangle => CanonicalDomain::Rectangle { a: self.a, b: self.b },
            DomainKind::Disk => CanonicalDomain::Disk { radius: self.outer },
            DomainKind::Annulus => CanonicalDomain::Annulus { inner: self.inner, outer: self.outer },
            DomainKind::Lshape => CanonicalDomain::LShape,
            DomainKind::Cube => CanonicalDomain::UnitCube,
        })
    }
}

#[derive(Args, Debug)]
pub struct MeshArgs {
    #[command(flatten)]
    pub domain: DomainArgs,
    /// Mesh resolution.
    #[arg(long)]
    pub res: usize,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug, Clone)]
pub struct ProblemArgs {
    #[command(flatten)]
    pub domain: DomainArgs,
    /// Read the mesh from a file instead of generating one.
    #[arg(long, conflicts_with = "domain")]
    pub mesh: Option<PathBuf>,
    /// Mesh resolution for generated meshes.
    #[arg(long)]
    pub res: Option<usize>,
    /// Form degree; defaults to 1 for curl-curl and 0 otherwise.
    #[arg(long)]
    pub degree: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Relative residual tolerance of the eigensolver.
    #[arg(long = "solver-tol", default_value_t = 1e-8)]
    pub solver_tol: f64,
}

#[derive(Args, Debug)]
pub struct SolveArgs {
    #[command(flatten)]
    pub problem: ProblemArgs,
    /// Boundary condition: absolute, dirichlet, neumann, true_dirichlet, curlcurl.
    #[arg(long, default_value = "absolute")]
    pub bc: BcKind,
    #[arg(long, default_value_t = 6)]
    pub count: usize,
    /// Report path; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also write the pencil as Matrix Market files into this directory.
    #[arg(long)]
    pub export: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum CheckKind {
    Decomposition,
    TopDegree,
    Inequality,
    HarmonicCount,
    TrueDirichlet,
}

impl CheckKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Decomposition => "decomposition",
            Self::TopDegree => "top-degree",
            Self::Inequality => "inequality",
            Self::HarmonicCount => "harmonic-count",
            Self::TrueDirichlet => "true-dirichlet",
        }
    }
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[arg(value_enum)]
    pub check: CheckKind,
    #[command(flatten)]
    pub problem: ProblemArgs,
    /// Prefix length (for inequalities: largest m).
    #[arg(long = "K", default_value_t = 8)]
    pub k: usize,
    /// Relative tolerance of spectrum matches.
    #[arg(long, default_value_t = 0.02)]
    pub tol: f64,
    /// Inequality slack; defaults to 0 on oracles and 0.02 on computed spectra.
    #[arg(long)]
    pub slack: Option<f64>,
    /// Inequality index shift `m + shift` instead of `(n - 1) m + 1`.
    #[arg(long)]
    pub shift: Option<usize>,
    /// Random vectors for the true-Dirichlet operator identity.
    #[arg(long, default_value_t = 50)]
    pub samples: usize,
    /// Report path; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct ConvergenceArgs {
    #[command(flatten)]
    pub domain: DomainArgs,
    #[arg(long, default_value = "dirichlet")]
    pub bc: BcKind,
    /// Form degree; defaults to 1 for curl-curl and 0 otherwise.
    #[arg(long)]
    pub degree: Option<usize>,
    /// Comma-separated resolutions.
    #[arg(long = "res", value_delimiter = ',', required = true)]
    pub resolutions: Vec<usize>,
    /// Number of nonzero eigenvalues tabulated per resolution.
    #[arg(long, default_value_t = 1)]
    pub count: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// CSV path; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}
