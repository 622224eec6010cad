//! The almost complex structure of `CP^{N-1}` and the almost quaternionic
//! structure of `HP^{N-1}`, and Wirtinger angles of tangent subspaces.
//!
//! On horizontal coordinates a structure `J_q` acts as right multiplication
//! by a unit imaginary scalar `q`. For quaternions the triple `{I, J, K}` so
//! obtained depends on the Stiefel representative; it is conjugated by a
//! change of representative, so only quantities extremized over the whole
//! span are meaningful.

use nalgebra::DMatrix;

use super::point::GrassTangent;
use crate::algebra::{sym_eig_small, symmetric_from_fn, Field, Quat};
use crate::error::{Error, Result};

/// Imaginary units spanning the structure for `field` (`{i}` or `{i, j, k}`).
pub fn structure_units(field: Field) -> Result<&'static [Quat]> {
    match field {
        Field::Real => Err(Error::UnsupportedField {
            op: "almost complex/quaternionic structure",
            field,
        }),
        _ => Ok(field.imaginary_units()),
    }
}

/// `H -> H q` for a unit imaginary `q` (requires `k = 1` over C or H).
pub fn j_apply(t: &GrassTangent, q: Quat) -> Result<GrassTangent> {
    let field = t.base().field();
    structure_units(field)?;
    if t.base().k() != 1 {
        return Err(Error::InvalidParameter(format!(
            "structure J is only defined for k = 1 (got k = {})",
            t.base().k()
        )));
    }
    if !field.contains(q) || q.re().abs() > 1e-12 || (q.norm() - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidParameter(format!(
            "J must come from a unit imaginary scalar of {field}, got {q}"
        )));
    }
    Ok(t.mul_right(q))
}

/// Unit imaginary scalar `sum_a c_a u_a` for coefficients on `structure_units`.
pub fn unit_from_coefficients(field: Field, coeffs: &[f64]) -> Result<Quat> {
    let units = structure_units(field)?;
    if coeffs.len() != units.len() {
        return Err(Error::ShapeMismatch(format!(
            "{} structure coefficients for {} units",
            coeffs.len(),
            units.len()
        )));
    }
    let q = units
        .iter()
        .zip(coeffs)
        .fold(Quat::ZERO, |acc, (u, c)| acc + u.scale(*c));
    let n = q.norm();
    if n == 0.0 {
        return Err(Error::ZeroVector);
    }
    Ok(q.scale(1.0 / n))
}

/// Largest deviation of the real Gram matrix of `basis` from the identity.
pub fn orthonormality_residual(basis: &[GrassTangent]) -> f64 {
    let mut worst: f64 = 0.0;
    for (i, a) in basis.iter().enumerate() {
        for (j, b) in basis.iter().enumerate() {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((a.inner(b) - target).abs());
        }
    }
    worst
}

/// Coordinates of `v` against an orthonormal `basis`, and the norm of what
/// is left over.
pub fn decompose(basis: &[GrassTangent], v: &GrassTangent) -> (Vec<f64>, GrassTangent) {
    let coeffs: Vec<f64> = basis.iter().map(|e| e.inner(v)).collect();
    let mut rest = v.clone();
    for (c, e) in coeffs.iter().zip(basis) {
        rest = rest.add_scaled(-c, e);
    }
    (coeffs, rest)
}

/// Gram forms of `a -> |proj_T(J_a x)|^2` and `a -> |perp_T(J_a x)|^2` on the
/// structure coefficients `a`.
pub fn structure_gram(basis: &[GrassTangent], x: &GrassTangent) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    let units = structure_units(x.base().field())?;
    let mut tangential = Vec::with_capacity(units.len());
    let mut normal = Vec::with_capacity(units.len());
    for &u in units {
        let jx = j_apply(x, u)?;
        let (coeffs, rest) = decompose(basis, &jx);
        tangential.push(coeffs);
        normal.push(rest);
    }
    let d = units.len();
    let g_tan = symmetric_from_fn(d, |a, b| {
        tangential[a].iter().zip(&tangential[b]).map(|(p, q)| p * q).sum()
    });
    let g_perp = symmetric_from_fn(d, |a, b| normal[a].inner(&normal[b]));
    Ok((g_tan, g_perp))
}

/// Wirtinger angle of `x` against the subspace spanned by `basis`: the
/// largest angle any `J x`, `J` a unit element of the structure's span,
/// makes with the subspace.
///
/// Over H the maximizing `J` is the top eigenvector of the 3x3 Gram form of
/// the normal components. The angle is returned as
/// `atan2(|perp|, |proj|)`, which stays accurate near `0` and `pi/2`.
pub fn wirtinger_angle(basis: &[GrassTangent], x: &GrassTangent) -> Result<f64> {
    let residual = orthonormality_residual(basis);
    if residual > 1e-8 {
        return Err(Error::NotOrthonormal { residual });
    }
    for e in basis {
        x.check_same_base(e)?;
    }
    let norm = x.norm();
    if norm == 0.0 {
        return Err(Error::ZeroVector);
    }
    let (_, rest) = decompose(basis, x);
    let off = rest.norm();
    if off > 1e-6 * norm {
        return Err(Error::NotInSpan { residual: off / norm });
    }
    let unit = x.scale(1.0 / norm);
    let (g_tan, g_perp) = structure_gram(basis, &unit)?;
    let eig = sym_eig_small(&g_perp)?;
    let (_, dir) = eig.max();
    let quad = |g: &DMatrix<f64>| -> f64 {
        let v = nalgebra::DVector::from_column_slice(dir);
        (v.transpose() * g * &v)[(0, 0)].max(0.0)
    };
    Ok(quad(&g_perp).sqrt().atan2(quad(&g_tan).sqrt()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::random::{random_mat, random_unit_imaginary};
    use crate::algebra::Mat;
    use crate::homogeneous::point::GrassPoint;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::FRAC_PI_2;
    use std::sync::Arc;

    fn unit_tangent(base: &Arc<GrassPoint>, row: usize, q: Quat) -> GrassTangent {
        let mut h = Mat::zeros(base.field(), base.ambient_dim(), 1);
        h[(row, 0)] = q;
        GrassTangent::from_horizontal(base.clone(), h).unwrap()
    }

    #[test]
    fn j_squares_to_minus_one_and_is_isometric() {
        let mut rng = ChaCha8Rng::seed_from_u64(51);
        for field in [Field::Complex, Field::Quaternion] {
            let base = Arc::new(GrassPoint::from_stiefel(random_mat(field, 4, 1, &mut rng)).unwrap());
            let t = GrassTangent::from_ambient_frame(base, &random_mat(field, 4, 1, &mut rng));
            let q = random_unit_imaginary(field, &mut rng);
            let jt = j_apply(&t, q).unwrap();
            let jjt = j_apply(&jt, q).unwrap();
            assert!(jjt.horizontal().max_abs_diff(&t.scale(-1.0).horizontal().clone()) < 1e-14);
            assert!((jt.norm() - t.norm()).abs() < 1e-14);
            assert!(jt.inner(&t).abs() < 1e-14);
        }
    }

    #[test]
    fn quaternion_triple_composes() {
        // I J = K as composed maps: H -> (H j) i = H (j i) = -H k, i.e. (I o J) = -K on the right;
        // with J_q(H) = H q, J_i(J_j(H)) = H j i = -H k.
        let base = Arc::new(GrassPoint::standard(Field::Quaternion, 3, 1));
        let t = unit_tangent(&base, 1, Quat::new(0.3, 0.1, -0.5, 0.2));
        let composed = j_apply(&j_apply(&t, Quat::J).unwrap(), Quat::I).unwrap();
        let k = j_apply(&t, Quat::K).unwrap();
        assert!(composed.horizontal().max_abs_diff(k.scale(-1.0).horizontal()) < 1e-15);
    }

    #[test]
    fn real_field_has_no_structure() {
        let base = Arc::new(GrassPoint::standard(Field::Real, 3, 1));
        let t = GrassTangent::zero(base);
        assert!(matches!(j_apply(&t, Quat::I), Err(Error::UnsupportedField { .. })));
    }

    #[test]
    fn kahler_and_totally_real_angles() {
        let base = Arc::new(GrassPoint::standard(Field::Complex, 3, 1));
        let e1 = unit_tangent(&base, 1, Quat::ONE);
        let e2 = unit_tangent(&base, 1, Quat::I);
        let x = e1.scale(0.6).add_scaled(0.8, &e2);
        assert!(wirtinger_angle(&[e1.clone(), e2], &x).unwrap().abs() < 1e-15);

        // real directions of RP^2 inside CP^2
        let f2 = unit_tangent(&base, 2, Quat::ONE);
        let y = e1.scale(0.6).add_scaled(-0.8, &f2);
        let theta = wirtinger_angle(&[e1, f2], &y).unwrap();
        assert!((theta - FRAC_PI_2).abs() < 1e-15);
    }

    #[test]
    fn quaternionic_span_maximum() {
        // T = span{X, I X}: J X and K X are normal, so the max angle is pi/2
        let base = Arc::new(GrassPoint::standard(Field::Quaternion, 3, 1));
        let x = unit_tangent(&base, 1, Quat::ONE);
        let ix = unit_tangent(&base, 1, Quat::I);
        let theta = wirtinger_angle(&[x.clone(), ix], &x).unwrap();
        assert!((theta - FRAC_PI_2).abs() < 1e-15);
    }

    #[test]
    fn input_validation() {
        let base = Arc::new(GrassPoint::standard(Field::Complex, 3, 1));
        let e1 = unit_tangent(&base, 1, Quat::ONE);
        let f2 = unit_tangent(&base, 2, Quat::ONE);
        assert_eq!(
            wirtinger_angle(&[e1.clone()], &GrassTangent::zero(base.clone())),
            Err(Error::ZeroVector)
        );
        assert!(matches!(
            wirtinger_angle(&[e1.clone()], &f2),
            Err(Error::NotInSpan { .. })
        ));
        assert!(matches!(
            wirtinger_angle(&[e1.clone(), e1.clone()], &e1),
            Err(Error::NotOrthonormal { .. })
        ));
    }
}
