//! Numerical steps and thresholds shared by the evaluators and the oracle.

use serde::{Deserialize, Serialize};

pub use crate::algebra::TOL_ALG;

/// First-derivative finite-difference step (one Richardson level on top).
pub const FD_STEP: f64 = 1e-3;

/// Second-derivative finite-difference step, `10^-2.5`.
pub const FD_STEP_SECOND: f64 = 3.162_277_660_168_379_5e-3;

/// Smallest admissible eigenvalue of the pull-back Gram matrix.
pub const IMMERSION_EPS: f64 = 1e-8;

/// Symmetry and normality of the second fundamental form.
pub const FD_TOL: f64 = 1e-6;

/// Analytic vs finite-difference differential agreement.
pub const FD_CHECK_TOL: f64 = 1e-8;

/// A margin counts as strictly positive only above this.
pub const STRICT_EPS: f64 = 1e-6;

/// Run-time tolerances; defaults are the constants above.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub tol_alg: f64,
    pub fd_step: f64,
    pub fd_step_second: f64,
    pub fd_tol: f64,
    pub immersion_eps: f64,
    pub strict_eps: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            tol_alg: TOL_ALG,
            fd_step: FD_STEP,
            fd_step_second: FD_STEP_SECOND,
            fd_tol: FD_TOL,
            immersion_eps: IMMERSION_EPS,
            strict_eps: STRICT_EPS,
        }
    }
}

impl Tolerances {
    /// Distance from the chart boundary every evaluation must keep.
    pub fn boundary_margin(&self) -> f64 {
        2.0 * self.fd_step.max(self.fd_step_second)
    }
}
