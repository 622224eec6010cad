//! Scalars over R, C, H and dense matrix algebra over them.

mod eig;
mod mat;
pub mod random;
mod scalar;

pub use eig::{sym_eig_small, symmetric_from_fn, SymEigen, SYM_EIG_MAX_DIM};
pub use mat::{column_dot, Mat};
pub use scalar::{Field, Quat, Scalar};

/// Tolerance for structural invariant checks of dense algebra.
pub const TOL_ALG: f64 = 1e-10;
