//! Grassmannians `G_k(K^N)` as normal homogeneous spaces `G/K` with the
//! metric induced by `g0(A, B) = 1/2 Re trace(A B*)`.
//!
//! The group chain is `H < K < G` with `G = O(N), U(N), Sp(N)`,
//! `K = G(k) x G(N-k)` and `H = G(N-k)`. Lie algebra elements are `N x N`
//! anti-Hermitian matrices; `m` is the upper-left `k x k` block and `p` the
//! off-diagonal blocks.

mod curvature;
mod lift;
mod point;
mod structure;

pub use curvature::{
    bracket_norm_sqr, curvature_normalization, geodesic, sectional_curvature_g0, CurvatureNormalization,
};
pub use lift::{diagonal_size, lie_lift, m_block, m_element, off_diagonal_size, p_element, p_part, FrameLift, LieLift};
pub use point::{GrassPoint, GrassTangent};
pub use structure::{
    decompose, j_apply, orthonormality_residual, structure_gram, structure_units, unit_from_coefficients,
    wirtinger_angle,
};
