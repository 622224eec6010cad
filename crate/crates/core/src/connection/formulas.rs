use std::sync::Arc;

use super::alpha::AlphaElement;
use crate::algebra::{Mat, Quat};
use crate::error::{Error, Result};
use crate::homogeneous::{j_apply, lie_lift, FrameLift, LieLift};
use crate::immersion::SecondFF;

/// `1/2 <[X~, Z~], alpha>_0`
pub fn curvature_pairing(x: &LieLift, z: &LieLift, alpha: &AlphaElement) -> Result<f64> {
    x.check_same_frame(z)?;
    check_alpha(x.frame(), alpha)?;
    let bracket = Mat::commutator(x.matrix(), z.matrix());
    Ok(0.5 * bracket.inner_g0(&alpha.embedded(x.frame().ambient_dim()))?)
}

fn check_alpha(frame: &FrameLift, alpha: &AlphaElement) -> Result<()> {
    if alpha.k() != frame.k() || alpha.block().field() != frame.field() {
        return Err(Error::ShapeMismatch(format!(
            "alpha is {}x{} over {}, frame has k = {} over {}",
            alpha.k(),
            alpha.k(),
            alpha.block().field(),
            frame.k(),
            frame.field()
        )));
    }
    Ok(())
}

/// `[X~, alpha]` as an element of `p`.
pub fn bracket_with_alpha(x: &LieLift, alpha: &AlphaElement) -> Result<LieLift> {
    check_alpha(x.frame(), alpha)?;
    let a = alpha.embedded(x.frame().ambient_dim());
    Ok(LieLift::from_p_part(
        x.frame().clone(),
        &Mat::commutator(x.matrix(), &a),
    ))
}

/// Largest deviation of the `g0`-Gram matrix of `lifts` from the identity.
pub fn lift_orthonormality_residual(lifts: &[LieLift]) -> f64 {
    let mut worst: f64 = 0.0;
    for (i, a) in lifts.iter().enumerate() {
        for (j, b) in lifts.iter().enumerate() {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((a.inner_g0(b) - target).abs());
        }
    }
    worst
}

/// Coordinates of `y` against an orthonormal list of lifts.
pub fn tangent_coordinates(y: &LieLift, tangent: &[LieLift]) -> Vec<f64> {
    tangent.iter().map(|e| e.inner_g0(y)).collect()
}

/// `1/2 |[X~, alpha]^T|_0`, the projection taken onto the span of `tangent`.
pub fn curvature_norm(x: &LieLift, alpha: &AlphaElement, tangent: &[LieLift]) -> Result<f64> {
    let residual = lift_orthonormality_residual(tangent);
    if residual > 1e-8 {
        return Err(Error::NotOrthonormal { residual });
    }
    for t in tangent {
        x.check_same_frame(t)?;
    }
    let b = bracket_with_alpha(x, alpha)?;
    let c = tangent_coordinates(&b, tangent);
    Ok(0.5 * c.iter().map(|v| v * v).sum::<f64>().sqrt())
}

/// `<S_{(J X)perp} Y - S_{(J Y)perp} X, Z>` for frame coordinates `x, y, z`
/// and `J = J_q` (`k = 1` over C or H).
pub fn dr_component_structure(sff: &SecondFF, x: &[f64], y: &[f64], z: &[f64], q: Quat) -> Result<f64> {
    let frame = sff.frame();
    let jx = frame.normal_part(&j_apply(&frame.vector(x), q)?);
    let jy = frame.normal_part(&j_apply(&frame.vector(y), q)?);
    Ok(sff.apply(y, z).inner(&jx) - sff.apply(x, z).inner(&jy))
}

/// `1/2 <[X~, II~(Z, Y)] - [Y~, II~(Z, X)], alpha>_0` through a frame lift.
pub fn dr_component_lie(
    sff: &SecondFF,
    lift: &Arc<FrameLift>,
    x: &[f64],
    y: &[f64],
    z: &[f64],
    alpha: &AlphaElement,
) -> Result<f64> {
    let frame = sff.frame();
    let xl = lie_lift(lift, &frame.vector(x))?;
    let yl = lie_lift(lift, &frame.vector(y))?;
    let izy = lie_lift(lift, &sff.apply(z, y))?;
    let izx = lie_lift(lift, &sff.apply(z, x))?;
    Ok(curvature_pairing(&xl, &izy, alpha)? - curvature_pairing(&yl, &izx, alpha)?)
}

/// `D R` component paired against `alpha`.
///
/// For `k = 1` over C or H this is the structure path with `J = ad_alpha`
/// (not normalized), which equals `2 <(D_Z R)(X, Y) W, V>` when `alpha`
/// comes from `from_fiber_pair(W, V)`. Otherwise it is the Lie path, which
/// equals `<(D_Z R)(X, Y) W, V>` for the same `alpha`.
pub fn dr_component(
    sff: &SecondFF,
    lift: &Arc<FrameLift>,
    x: &[f64],
    y: &[f64],
    z: &[f64],
    alpha: &AlphaElement,
) -> Result<f64> {
    let field = sff.frame().point().field();
    if alpha.k() == 1 && field != crate::algebra::Field::Real {
        check_alpha(lift, alpha)?;
        let q = -alpha.block()[(0, 0)];
        let r = q.norm();
        if r == 0.0 {
            return Ok(0.0);
        }
        return Ok(r * dr_component_structure(sff, x, y, z, q * (1.0 / r))?);
    }
    dr_component_lie(sff, lift, x, y, z, alpha)
}

/// `1 / (16 tan^2 theta + 8)`, exactly `0` at `theta = pi/2`.
pub fn corollary_rhs(theta: f64) -> f64 {
    if theta >= std::f64::consts::FRAC_PI_2 - 1e-12 {
        return 0.0;
    }
    let t = theta.tan();
    1.0 / (16.0 * t * t + 8.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::random::{random_mat, random_unit_imaginary};
    use crate::algebra::Field;
    use crate::homogeneous::{GrassPoint, GrassTangent};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn pairing_is_antisymmetric_and_matches_structure() {
        let mut rng = ChaCha8Rng::seed_from_u64(61);
        for field in [Field::Complex, Field::Quaternion] {
            let base = Arc::new(GrassPoint::from_stiefel(random_mat(field, 4, 1, &mut rng)).unwrap());
            let lift = Arc::new(FrameLift::standard(&base));
            for _ in 0..10 {
                let x = GrassTangent::from_ambient_frame(base.clone(), &random_mat(field, 4, 1, &mut rng));
                let z = GrassTangent::from_ambient_frame(base.clone(), &random_mat(field, 4, 1, &mut rng));
                let q = random_unit_imaginary(field, &mut rng);
                let alpha = AlphaElement::from_structure(field, q).unwrap();
                let (xl, zl) = (lie_lift(&lift, &x).unwrap(), lie_lift(&lift, &z).unwrap());
                let v = curvature_pairing(&xl, &zl, &alpha).unwrap();
                let expected = 0.5 * j_apply(&x, q).unwrap().inner(&z);
                assert!((v - expected).abs() < 1e-10, "{v} vs {expected}");
                assert!(curvature_pairing(&xl, &xl, &alpha).unwrap().abs() < 1e-14);
            }
        }
    }

    #[test]
    fn g2r4_commuting_blocks_pair_to_zero() {
        // B_x = E_11, B_z = E_22 commute, so [X~, Z~] has zero m-block... but
        // its o(2) part is -Bx^T Bz + Bz^T Bx = 0 as well
        let base = Arc::new(GrassPoint::standard(Field::Real, 4, 2));
        let lift = Arc::new(FrameLift::standard(&base));
        let x = LieLift::from_block(lift.clone(), Mat::unit(Field::Real, 2, 2, 0, 0));
        let z = LieLift::from_block(lift.clone(), Mat::unit(Field::Real, 2, 2, 1, 1));
        let alpha = AlphaElement::decomposable(&[1.0, 0.0], &[0.0, 1.0]).unwrap();
        assert_eq!(curvature_pairing(&x, &z, &alpha).unwrap(), 0.0);
        // B_x = E_11, B_z = E_12: [X~, Z~] top block = -E_12 + E_21 -> pairing 1/2 <-e1^e2, e1^e2>_0
        let z = LieLift::from_block(lift, Mat::unit(Field::Real, 2, 2, 0, 1));
        assert!((curvature_pairing(&x, &z, &alpha).unwrap() + 0.5).abs() < 1e-15);
    }

    #[test]
    fn corollary_rhs_values() {
        assert!((corollary_rhs(0.0) - 0.125).abs() < 1e-15);
        assert!((corollary_rhs(std::f64::consts::FRAC_PI_4) - 1.0 / 24.0).abs() < 1e-15);
        assert_eq!(corollary_rhs(std::f64::consts::FRAC_PI_2), 0.0);
        assert!(corollary_rhs(std::f64::consts::FRAC_PI_2 - 1e-6) < 1e-10);
    }
}
