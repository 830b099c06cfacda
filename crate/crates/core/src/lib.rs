//! Hodge-Laplacian spectra on simplicial meshes.
//!
//! Whitney-form discretizations of the Hodge Laplacian under absolute,
//! scalar and true-Dirichlet conditions, a shift-invert block Lanczos
//! eigensolver, closed/co-exact classification of eigenforms, closed-form
//! oracles and an exact symbolic layer for forms on `R^n`.
//!
//! Numerical code is generic over [`Real`] (`f32` or `f64`); symbolic code is
//! generic over [`symbolic::Coefficient`]. The aliases below fix the usual
//! choices.

// `!(x > 0)` style tests are used on purpose so that NaN is rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod assembly;
pub mod dec;
pub mod eigen;
pub mod error;
pub mod linalg;
pub mod mesh;
pub mod scalar;
pub mod symbolic;
pub mod verify;

pub use assembly::{build_problem, BcKind, EigenProblem};
pub use eigen::{classify_eigenforms, pair_across_degrees, solve, FormTag, SolveOptions, SpectrumResult};
pub use error::{Error, Result};
pub use mesh::{generate, CanonicalDomain, SimplicialComplex};
pub use scalar::Real;
pub use verify::{OrderedSpectrum, VerificationReport};

/// Sparse matrix in double precision.
pub type Csr = linalg::CsrMatrix<f64>;
/// Sparse matrix in single precision.
pub type Csr32 = linalg::CsrMatrix<f32>;
/// Double precision eigenproblem.
pub type Pencil = assembly::EigenProblem<f64>;
/// Single precision eigenproblem.
pub type Pencil32 = assembly::EigenProblem<f32>;
/// Double precision spectrum.
pub type Spectrum = eigen::SpectrumResult<f64>;
/// Single precision spectrum.
pub type Spectrum32 = eigen::SpectrumResult<f32>;
/// Discrete de Rham complex in double precision.
pub type DeRham = dec::DeRhamComplex<f64>;
/// Exact symbolic form with 64-bit rational coefficients.
pub type Form = symbolic::SymbolicForm<num_rational::Rational64>;
/// Exact symbolic form with arbitrary precision rational coefficients.
pub type BigForm = symbolic::SymbolicForm<num_rational::BigRational>;
/// Symbolic form with floating point coefficients.
pub type FloatForm = symbolic::SymbolicForm<f64>;
