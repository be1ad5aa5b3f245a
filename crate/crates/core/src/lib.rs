//! Junction representations of the Temperley–Lieb and blob algebras.
//!
//! Every representation matrix is a [`SparseMatrix`] of complex entries over
//! a real scalar type (`f64` or `f32`). The crate root re-exports the
//! double-precision aliases used by the command-line tool.

pub mod error;
pub mod hecke;
pub mod integrable;
pub mod linalg;
pub mod qsym;
pub mod scalar;
pub mod tl_rep;

pub use error::{Error, Result};
pub use linalg::{CheckReport, SparseMatrix};
pub use scalar::Real;

pub type Complex64 = num_complex::Complex<f64>;
pub type Matrix = SparseMatrix<f64>;
pub type Params = hecke::JunctionParams<f64>;
pub type Context = tl_rep::RepContext<f64>;
pub type Boundary = tl_rep::BoundaryParams<f64>;
pub type Transfer = integrable::TransferContext<f64>;
