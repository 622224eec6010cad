//! Pull-backs of the universal connection on Grassmannians.
//!
//! A classifying map `phi: B -> G_k(K^N)` pulls the tautological bundle and
//! its projection connection back to `B`. This crate evaluates, pointwise
//! on sampled charts, whether the pulled-back connection is fat, parallel or
//! radially symmetric, and how close it comes to the curvature inequality
//! that yields nonnegatively curved connection metrics. Every closed-form
//! evaluator in [`connection`] has a brute-force counterpart in [`oracle`].

pub mod algebra;
pub mod catalog;
pub mod connection;
mod error;
pub mod homogeneous;
pub mod immersion;
pub mod oracle;
pub mod tolerances;

pub use algebra::{Field, Mat, Quat};
pub use error::{Error, Result};
pub use homogeneous::{FrameLift, GrassPoint, GrassTangent, LieLift};
