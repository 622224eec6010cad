//! Brute-force counterparts of the closed-form evaluators: covariant
//! derivatives and curvature by finite differences, parallel transport and
//! holonomy by RK4, Levi-Civita transport of the pull-back metric.

mod curvature;
mod lemma;
mod transport;

pub use curvature::{
    connection_curvature, covariant_derivative, curvature_closed_form, curvature_commutator, curvature_oracle,
    curvature_paths, dr_oracle, frame_to_chart, inequality_oracle, vertizontal_curvature_norm, CurvaturePath,
    InequalitySides, CURVATURE_PATH_TOL, CURVATURE_SCALE,
};
pub use lemma::{
    holonomy_generator, lemma_omega_check, ExponentialChart, LemmaOmegaReport, LemmaTrial, LEMMA_EPS, LEMMA_STEPS,
};
pub use transport::{
    base_curvature_oracle, base_sectional_curvature_oracle, base_transport, christoffel, coordinate_gram, holonomy,
    parallel_transport, parallel_transport_fixed, parallelogram_lasso, projector_derivatives, square_lasso,
    TransportResult, DEFAULT_TRANSPORT_STEPS,
};
