use thiserror::Error;

use crate::algebra::Field;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("field mismatch: expected {expected}, found {found}")]
    FieldMismatch { expected: Field, found: String },

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("degenerate input: column {column} is linearly dependent on the previous ones")]
    Degenerate { column: usize },

    #[error("matrix is not symmetric (asymmetry {asymmetry:.3e})")]
    NotSymmetric { asymmetry: f64 },

    #[error("operation `{op}` is not supported over {field}")]
    UnsupportedField { op: &'static str, field: Field },

    #[error("tangent vectors are based at different points")]
    BaseMismatch,

    #[error("map is not an immersion at u = {u:?} (min Gram eigenvalue {eigenvalue:.3e})")]
    NotAnImmersion { u: Vec<f64>, eigenvalue: f64 },

    #[error("point {u:?} is within {margin:.1e} of the chart boundary")]
    BoundaryProximity { u: Vec<f64>, margin: f64 },

    #[error("non-finite value encountered in {0}")]
    NonFinite(&'static str),

    #[error("vector is not in the given subspace (residual {residual:.3e})")]
    NotInSpan { residual: f64 },

    #[error("zero vector where a nonzero one is required")]
    ZeroVector,

    #[error("basis is not orthonormal (residual {residual:.3e})")]
    NotOrthonormal { residual: f64 },

    #[error("fiber constraint violated (residual {residual:.3e})")]
    FiberConstraint { residual: f64 },

    #[error("integration step count must be positive")]
    StepUnderflow,

    #[error("matrix is too far from the identity for the logarithm series ({distance:.3e})")]
    LogOutOfRange { distance: f64 },

    #[error("{what}: independent computations disagree by {deviation:.3e}")]
    OracleDisagreement { what: &'static str, deviation: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}
