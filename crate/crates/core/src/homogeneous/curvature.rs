use std::sync::Arc;

use nalgebra::DVector;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::lift::{lie_lift, FrameLift, LieLift};
use super::point::{GrassPoint, GrassTangent};
use crate::algebra::random::random_unit_vector;
use crate::algebra::{sym_eig_small, symmetric_from_fn, Field, Mat};
use crate::error::Result;

/// Point reached at time `s` along the geodesic with initial velocity `t`:
/// the span of the first `k` columns of `g exp(s X~)`.
pub fn geodesic(t: &GrassTangent, s: f64) -> Result<GrassPoint> {
    let base = t.base();
    if s == 0.0 {
        return Ok((**base).clone());
    }
    let frame = Arc::new(FrameLift::standard(base));
    let lift = lie_lift(&frame, t)?;
    let moved = frame.matrix() * &lift.matrix().scale(s).expm();
    GrassPoint::from_stiefel(moved.columns(0, base.k()))
}

/// Unnormalized sectional curvature `|[X~, Y~]|_0^2` of the plane spanned by
/// `x` and `y` in the metric induced by `g0`. Equals the sectional curvature
/// when `x, y` are orthonormal.
pub fn sectional_curvature_g0(x: &GrassTangent, y: &GrassTangent) -> Result<f64> {
    x.check_same_base(y)?;
    let frame = Arc::new(FrameLift::standard(x.base()));
    let lx = lie_lift(&frame, x)?;
    let ly = lie_lift(&frame, y)?;
    Ok(bracket_norm_sqr(&lx, &ly))
}

/// `|[X~, Y~]|_0^2` computed from the blocks.
pub fn bracket_norm_sqr(x: &LieLift, y: &LieLift) -> f64 {
    let (bx, by) = (x.block(), y.block());
    let xy = &bx.adjoint() * by;
    let top = &xy.adjoint() - &xy; // -Bx* By + By* Bx
    let bottom_a = bx * &by.adjoint();
    let bottom = &bottom_a.adjoint() - &bottom_a; // -Bx By* + By Bx*
    0.5 * (top.norm_sqr() + bottom.norm_sqr())
}

/// Extreme sectional curvatures of `G_k(K^N)` in `g0` units, and the metric
/// rescaling that brings the maximum to one.
///
/// Sectional curvature scales inversely with a constant rescaling of the
/// metric, so `g = lambda g0` with `lambda` the maximal `g0`-curvature has
/// maximal sectional curvature 1.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct CurvatureNormalization {
    pub max_curvature_g0: f64,
    pub min_curvature_g0: f64,
}

impl CurvatureNormalization {
    /// Factor `lambda` in `g = lambda g0`.
    pub fn metric_scale(&self) -> f64 {
        self.max_curvature_g0
    }

    /// Sectional curvature in the rescaled metric.
    pub fn normalize_curvature(&self, k_g0: f64) -> f64 {
        k_g0 / self.metric_scale()
    }

    /// Quantities quadratic in the second fundamental form (`|S|^2`, curvature
    /// inequality margins) transform like curvature.
    pub fn normalize_quadratic(&self, q_g0: f64) -> f64 {
        q_g0 / self.metric_scale()
    }

    /// Ratio min/max (1/4 for the projective spaces).
    pub fn pinching(&self) -> f64 {
        self.min_curvature_g0 / self.max_curvature_g0
    }
}

/// Brackets `[X~, e_a]` against a basis of `p`, and the Gram form of `Y -> |[X~, Y~]|^2`.
fn bracket_form(x: &LieLift, basis: &[LieLift]) -> nalgebra::DMatrix<f64> {
    let brackets: Vec<Mat> = basis.iter().map(|e| Mat::commutator(x.matrix(), e.matrix())).collect();
    symmetric_from_fn(basis.len(), |a, b| 0.5 * brackets[a].re_inner(&brackets[b]))
}

fn combine(frame: &Arc<FrameLift>, basis: &[LieLift], coeffs: &[f64]) -> LieLift {
    let mut b = Mat::zeros(frame.field(), frame.ambient_dim() - frame.k(), frame.k());
    for (c, e) in coeffs.iter().zip(basis) {
        b = &b + &e.block().scale(*c);
    }
    LieLift::from_block(frame.clone(), b)
}

/// Extremize the sectional curvature over orthonormal pairs by alternating
/// eigen-steps from deterministic and seeded random starts. `maximize` picks
/// the top eigenvector each step, otherwise the bottom one on `X^perp`.
fn alternate_extreme(frame: &Arc<FrameLift>, basis: &[LieLift], maximize: bool, starts: usize) -> Result<f64> {
    let d = basis.len();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_c0de);
    let mut start_vectors: Vec<Vec<f64>> = (0..d)
        .map(|a| {
            let mut v = vec![0.0; d];
            v[a] = 1.0;
            v
        })
        .collect();
    for _ in 0..starts {
        start_vectors.push(random_unit_vector(d, &mut rng));
    }
    let mut best = if maximize { f64::NEG_INFINITY } else { f64::INFINITY };
    for start in start_vectors {
        let mut x = start;
        let mut value = if maximize { f64::NEG_INFINITY } else { f64::INFINITY };
        for _ in 0..100 {
            let lx = combine(frame, basis, &x);
            let mut m = bracket_form(&lx, basis);
            if !maximize {
                // lift X itself (where the form vanishes) out of the way
                let xv = DVector::from_column_slice(&x);
                let shift = 10.0 * m.amax().max(1.0);
                m += &xv * xv.transpose() * shift;
            }
            let eig = sym_eig_small(&m)?;
            let (lambda, y) = if maximize { eig.max() } else { eig.min() };
            let improved = if maximize {
                lambda > value + 1e-15
            } else {
                lambda < value - 1e-15
            };
            value = if maximize { value.max(lambda) } else { value.min(lambda) };
            x = y.to_vec();
            if !improved {
                break;
            }
        }
        best = if maximize { best.max(value) } else { best.min(value) };
    }
    Ok(best)
}

/// Maximal and minimal sectional curvature of `G_k(K^N)` in `g0` units.
///
/// By homogeneity the standard point suffices.
pub fn curvature_normalization(field: Field, n: usize, k: usize) -> Result<CurvatureNormalization> {
    let base = GrassPoint::standard(field, n, k);
    let frame = Arc::new(FrameLift::standard(&base));
    let basis = frame.p_basis();
    let max = alternate_extreme(&frame, &basis, true, 16)?;
    let min = if basis.len() > 1 {
        alternate_extreme(&frame, &basis, false, 16)?
    } else {
        max
    };
    Ok(CurvatureNormalization {
        max_curvature_g0: max,
        min_curvature_g0: min.max(0.0),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::random::random_mat;
    use crate::algebra::Quat;

    #[test]
    fn zero_time_geodesic_is_the_base() {
        let base = Arc::new(GrassPoint::standard(Field::Complex, 3, 1));
        let t = GrassTangent::from_horizontal(base.clone(), Mat::unit(Field::Complex, 3, 1, 1, 0)).unwrap();
        assert_eq!(geodesic(&t, 0.0).unwrap(), *base);
    }

    #[test]
    fn geodesic_stays_on_the_grassmannian() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for field in [Field::Real, Field::Complex, Field::Quaternion] {
            let base = Arc::new(GrassPoint::from_stiefel(random_mat(field, 5, 2, &mut rng)).unwrap());
            let t = GrassTangent::from_ambient_frame(base, &random_mat(field, 5, 2, &mut rng));
            for s in [-10.0, -3.3, 0.5, 7.0, 10.0] {
                let q = geodesic(&t, s).unwrap();
                assert!(q.projector_residual() < 1e-10);
            }
        }
    }

    #[test]
    fn proportional_and_commuting_planes_are_flat() {
        let base = Arc::new(GrassPoint::standard(Field::Complex, 3, 1));
        let x = GrassTangent::from_horizontal(base.clone(), Mat::unit(Field::Complex, 3, 1, 1, 0)).unwrap();
        assert_eq!(sectional_curvature_g0(&x, &x.scale(-2.5)).unwrap(), 0.0);

        // G_2(R^4): B_x = E_11, B_y = E_22 commute
        let base = Arc::new(GrassPoint::standard(Field::Real, 4, 2));
        let x = GrassTangent::from_horizontal(base.clone(), Mat::unit(Field::Real, 4, 2, 2, 0)).unwrap();
        let y = GrassTangent::from_horizontal(base, Mat::unit(Field::Real, 4, 2, 3, 1)).unwrap();
        assert!(sectional_curvature_g0(&x, &y).unwrap().abs() < 1e-15);
    }

    #[test]
    fn holomorphic_and_totally_real_planes_of_cp2() {
        let base = Arc::new(GrassPoint::standard(Field::Complex, 3, 1));
        let x = GrassTangent::from_horizontal(base.clone(), Mat::unit(Field::Complex, 3, 1, 1, 0)).unwrap();
        let jx = x.mul_right(Quat::I);
        let y = GrassTangent::from_horizontal(base, Mat::unit(Field::Complex, 3, 1, 2, 0)).unwrap();
        let k_hol = sectional_curvature_g0(&x, &jx).unwrap();
        let k_real = sectional_curvature_g0(&x, &y).unwrap();
        assert!((k_hol / k_real - 4.0).abs() < 1e-12);
    }

    #[test]
    fn normalization_of_projective_spaces() {
        for field in [Field::Complex, Field::Quaternion] {
            let norm = curvature_normalization(field, 3, 1).unwrap();
            assert!((norm.pinching() - 0.25).abs() < 1e-9, "{field}: {norm:?}");
            assert!((norm.normalize_curvature(norm.max_curvature_g0) - 1.0).abs() < 1e-12);
        }
        let rp = curvature_normalization(Field::Real, 4, 1).unwrap();
        assert!((rp.pinching() - 1.0).abs() < 1e-9);
    }
}
