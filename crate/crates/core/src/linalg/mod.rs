//! Linear algebra building blocks.

pub mod cg;
pub mod dense;
pub mod ldl;
pub mod mtx;
pub mod sparse;

pub use cg::{conjugate_gradient, CgOutcome};
pub use dense::{generalized_symmetric_eigen, symmetric_eigen, DenseMatrix, SymmetricEigen};
pub use ldl::Ldl;
pub use mtx::{read_matrix_market, write_matrix_market};
pub use sparse::CsrMatrix;
