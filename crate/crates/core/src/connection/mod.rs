//! Formula-side evaluators for the curvature of the pulled-back connection
//! and the per-point verdicts built on them.
//!
//! For `k = 1` a unit structure element `alpha` acts on `p` as a structure
//! `J`: `ad alpha = J`, so `1/2 <[X~, Z~], alpha>_0 = 1/2 <J X, Z>`. The
//! element representing a fiber pair `(w, v)` is `2 skew(v w*)`, twice the
//! unit element of the corresponding structure.

mod alpha;
mod analysis;
mod formulas;

pub use alpha::AlphaElement;
pub use analysis::{
    analyze_context, analyze_point, AnalysisOptions, ConnectionVerdict, CorollaryBound, FrameChoice, PointAnalysis,
    PointContext, StructureKind,
};
pub use formulas::{
    bracket_with_alpha, corollary_rhs, curvature_norm, curvature_pairing, dr_component, dr_component_lie,
    dr_component_structure, lift_orthonormality_residual, tangent_coordinates,
};
