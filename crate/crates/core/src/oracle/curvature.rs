use crate::algebra::Mat;
use crate::error::{Error, Result};
use crate::immersion::{point_frame, richardson, ImmersionChart};
use crate::tolerances::Tolerances;

use super::transport::{
    base_curvature_oracle, base_transport, check_fiber, parallel_transport_fixed, projector_derivatives,
};

/// `R^nabla = CURVATURE_SCALE * R_std`, where `R_std = P [dP_i, dP_j]` is the
/// curvature of the projection connection. The two-form convention pairs
/// against `alpha` through `1/2 <[X~, Z~], alpha>_0`, which is half the
/// holonomy curvature with opposite sign. Fixed by the holonomy regression
/// in [`super::lemma_omega_check`].
pub const CURVATURE_SCALE: f64 = -0.5;

/// Mutual agreement required of the two curvature paths.
pub const CURVATURE_PATH_TOL: f64 = 1e-6;

/// RK4 steps for the short transports inside [`dr_oracle`].
const DR_TRANSPORT_STEPS: usize = 4;

fn shifted(u: &[f64], i: usize, s: f64) -> Vec<f64> {
    let mut v = u.to_vec();
    v[i] += s;
    v
}

/// `P(u) ds/du_i` by central differences with one Richardson level.
pub fn covariant_derivative(
    chart: &ImmersionChart,
    u: &[f64],
    i: usize,
    section: &dyn Fn(&[f64]) -> Result<Mat>,
    tol: &Tolerances,
) -> Result<Mat> {
    let h = tol.fd_step;
    chart.check_interior(u, 2.0 * h)?;
    let eval = |s: f64| -> Result<Mat> {
        let p = shifted(u, i, s);
        let v = section(&p)?;
        check_fiber(&chart.projector(&p)?, &v)?;
        Ok(v)
    };
    let central = |s: f64| -> Result<Mat> { Ok((&eval(s)? - &eval(-s)?).scale(0.5 / s)) };
    let p = chart.projector(u)?;
    check_fiber(&p, &section(u)?)?;
    Ok(&p * &richardson(&central(h)?, &central(2.0 * h)?))
}

/// `R_std(d_i, d_j) w = P [dP_i, dP_j] w`.
pub fn curvature_closed_form(
    chart: &ImmersionChart,
    u: &[f64],
    i: usize,
    j: usize,
    w: &Mat,
    tol: &Tolerances,
) -> Result<Mat> {
    let dp = projector_derivatives(chart, u, tol)?;
    let p = chart.projector(u)?;
    check_fiber(&p, w)?;
    Ok(&p * &(&Mat::commutator(&dp[i], &dp[j]) * w))
}

/// `R_std(d_i, d_j) w` as the commutator of covariant derivatives of the
/// coordinate-extended section `s(u') = P(u') w`, by nested central
/// differences at step `h` (optionally with one Richardson level).
pub fn curvature_commutator(
    chart: &ImmersionChart,
    u: &[f64],
    i: usize,
    j: usize,
    w: &Mat,
    h: f64,
    extrapolate: bool,
) -> Result<Mat> {
    let reach = if extrapolate { 4.0 * h } else { 2.0 * h };
    chart.check_interior(u, reach)?;
    let p0 = chart.projector(u)?;
    check_fiber(&p0, w)?;
    let s = |x: &[f64]| -> Result<Mat> { Ok(&chart.projector(x)? * w) };
    // nabla_b s at x with step t
    let nabla = |x: &[f64], b: usize, t: f64| -> Result<Mat> {
        let d = (&s(&shifted(x, b, t))? - &s(&shifted(x, b, -t))?).scale(0.5 / t);
        Ok(&chart.projector(x)? * &d)
    };
    let one = |t: f64| -> Result<Mat> {
        let outer = |a: usize, b: usize| -> Result<Mat> {
            let d = (&nabla(&shifted(u, a, t), b, t)? - &nabla(&shifted(u, a, -t), b, t)?).scale(0.5 / t);
            Ok(&p0 * &d)
        };
        Ok(&outer(i, j)? - &outer(j, i)?)
    };
    if extrapolate {
        Ok(richardson(&one(h)?, &one(2.0 * h)?))
    } else {
        one(h)
    }
}

/// Both curvature paths: `(commutator, closed form)`.
pub fn curvature_paths(
    chart: &ImmersionChart,
    u: &[f64],
    i: usize,
    j: usize,
    w: &Mat,
    tol: &Tolerances,
) -> Result<(Mat, Mat)> {
    Ok((
        curvature_commutator(chart, u, i, j, w, tol.fd_step_second, true)?,
        curvature_closed_form(chart, u, i, j, w, tol)?,
    ))
}

/// `R_std(d_i, d_j) w`, after checking that the commutator and closed-form
/// paths agree within [`CURVATURE_PATH_TOL`] (relative to `|w|`).
pub fn curvature_oracle(
    chart: &ImmersionChart,
    u: &[f64],
    i: usize,
    j: usize,
    w: &Mat,
    tol: &Tolerances,
) -> Result<Mat> {
    let (a, b) = curvature_paths(chart, u, i, j, w, tol)?;
    let deviation = (&a - &b).norm() / w.norm().max(1e-300);
    if deviation > CURVATURE_PATH_TOL {
        return Err(Error::OracleDisagreement {
            what: "curvature paths",
            deviation,
        });
    }
    Ok(b)
}

/// Which brute-force curvature to use in the derived quantities below.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum CurvaturePath {
    ClosedForm,
    Commutator { h: f64, extrapolate: bool },
}

fn std_curvature(
    chart: &ImmersionChart,
    u: &[f64],
    i: usize,
    j: usize,
    w: &Mat,
    path: CurvaturePath,
    tol: &Tolerances,
) -> Result<Mat> {
    match path {
        CurvaturePath::ClosedForm => curvature_closed_form(chart, u, i, j, w, tol),
        CurvaturePath::Commutator { h, extrapolate } => curvature_commutator(chart, u, i, j, w, h, extrapolate),
    }
}

/// `R^nabla(X, Y) w` for chart components `xi`, `eta`.
pub fn connection_curvature(
    chart: &ImmersionChart,
    u: &[f64],
    xi: &[f64],
    eta: &[f64],
    w: &Mat,
    path: CurvaturePath,
    tol: &Tolerances,
) -> Result<Mat> {
    let n = chart.domain_dim();
    let mut acc = Mat::zeros(w.field(), w.rows(), w.cols());
    for a in 0..n {
        for b in (a + 1)..n {
            let c = xi[a] * eta[b] - xi[b] * eta[a];
            if c != 0.0 {
                acc = &acc + &std_curvature(chart, u, a, b, w, path, tol)?.scale(c);
            }
        }
    }
    Ok(acc.scale(CURVATURE_SCALE))
}

/// Chart components of the frame vector with frame coordinates `x`.
pub fn frame_to_chart(to_frame: &nalgebra::DMatrix<f64>, x: &[f64]) -> Vec<f64> {
    let v = to_frame * nalgebra::DVector::from_column_slice(x);
    v.iter().copied().collect()
}

/// `|R^nabla(W, V) X|` through `<R^nabla(W, V) X, Z> = <R^nabla(X, Z) w, v>`
/// summed over an orthonormal frame `Z = E_b`; `x` in frame coordinates.
pub fn vertizontal_curvature_norm(
    chart: &ImmersionChart,
    u: &[f64],
    x: &[f64],
    w: &Mat,
    v: &Mat,
    path: CurvaturePath,
    tol: &Tolerances,
) -> Result<f64> {
    let frame = point_frame(chart, u, tol)?;
    let n = frame.dim();
    let xi = frame_to_chart(frame.to_frame(), x);
    let mut sum = 0.0;
    for b in 0..n {
        let mut e = vec![0.0; n];
        e[b] = 1.0;
        let zeta = frame_to_chart(frame.to_frame(), &e);
        let r = connection_curvature(chart, u, &xi, &zeta, w, path, tol)?;
        sum += v.re_inner(&r).powi(2);
    }
    Ok(sum.sqrt())
}

/// `<(D_Z R^nabla)(X, Y) w, v>` for frame coordinates `x, y, z` and fiber
/// vectors `w, v` at `u`: the covariant derivative of the curvature along
/// the coordinate line `u + t zeta` (`zeta` the chart components of `Z`),
/// base arguments carried by Levi-Civita transport and fiber arguments by
/// parallel transport, differentiated by central differences with one
/// Richardson level.
pub fn dr_oracle(
    chart: &ImmersionChart,
    u: &[f64],
    x: &[f64],
    y: &[f64],
    z: &[f64],
    w: &Mat,
    v: &Mat,
    tol: &Tolerances,
) -> Result<f64> {
    let frame = point_frame(chart, u, tol)?;
    let xi = frame_to_chart(frame.to_frame(), x);
    let eta = frame_to_chart(frame.to_frame(), y);
    let zeta = frame_to_chart(frame.to_frame(), z);
    let p = chart.projector(u)?;
    check_fiber(&p, w)?;
    check_fiber(&p, v)?;
    let h = tol.fd_step;
    let znorm = zeta.iter().map(|c| c * c).sum::<f64>().sqrt();
    chart.check_interior(u, 2.0 * h * znorm + tol.boundary_margin())?;
    let f = |t: f64| -> Result<f64> {
        let end: Vec<f64> = u.iter().zip(&zeta).map(|(a, b)| a + t * b).collect();
        let path = vec![u.to_vec(), end.clone()];
        let xt = base_transport(chart, &path, &xi, DR_TRANSPORT_STEPS, tol)?;
        let yt = base_transport(chart, &path, &eta, DR_TRANSPORT_STEPS, tol)?;
        let wt = parallel_transport_fixed(chart, &path, w, DR_TRANSPORT_STEPS, tol)?;
        let vt = parallel_transport_fixed(chart, &path, v, DR_TRANSPORT_STEPS, tol)?;
        let r = connection_curvature(chart, &end, &xt, &yt, &wt, CurvaturePath::ClosedForm, tol)?;
        Ok(vt.re_inner(&r))
    };
    let central = |s: f64| -> Result<f64> { Ok((f(s)? - f(-s)?) / (2.0 * s)) };
    let (d1, d2) = (central(h)?, central(2.0 * h)?);
    Ok((4.0 * d1 - d2) / 3.0)
}

/// Loop side and steps for the base-curvature factor in [`inequality_oracle`].
const BASE_LOOP_EPS: f64 = 0.02;
const BASE_LOOP_STEPS: usize = 8;

/// Both sides of `<(D_X R)(X, Y) w, v>^2 <= k_B(X, Y) |R(W, V) X|^2` from
/// brute-force pieces, for orthonormal frame coordinates `x, y`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InequalitySides {
    pub dr: f64,
    pub base_curvature: f64,
    pub curvature_norm: f64,
}

impl InequalitySides {
    /// `k_B |R|^2 - dr^2`
    pub fn margin(&self) -> f64 {
        self.base_curvature * self.curvature_norm.powi(2) - self.dr.powi(2)
    }
}

pub fn inequality_oracle(
    chart: &ImmersionChart,
    u: &[f64],
    x: &[f64],
    y: &[f64],
    w: &Mat,
    v: &Mat,
    tol: &Tolerances,
) -> Result<InequalitySides> {
    let frame = point_frame(chart, u, tol)?;
    let xi = frame_to_chart(frame.to_frame(), x);
    let eta = frame_to_chart(frame.to_frame(), y);
    Ok(InequalitySides {
        dr: dr_oracle(chart, u, x, y, x, w, v, tol)?,
        base_curvature: base_curvature_oracle(chart, u, &xi, &eta, BASE_LOOP_EPS, BASE_LOOP_STEPS, tol)?,
        curvature_norm: vertizontal_curvature_norm(chart, u, x, w, v, CurvaturePath::ClosedForm, tol)?,
    })
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeMap;
    use std::sync::Arc;

    use super::*;
    use crate::algebra::{Field, Quat};
    use crate::catalog;
    use crate::connection::{curvature_norm, AlphaElement, AnalysisOptions, PointContext};
    use crate::homogeneous::lie_lift;
    use crate::immersion::{second_fundamental_form, ChartMap};

    #[derive(Debug)]
    struct Constant;

    impl ChartMap for Constant {
        fn field(&self) -> Field {
            Field::Complex
        }
        fn ambient_dim(&self) -> usize {
            3
        }
        fn k(&self) -> usize {
            1
        }
        fn domain_dim(&self) -> usize {
            2
        }
        fn frame(&self, _u: &[f64]) -> Mat {
            Mat::column(Field::Complex, &[Quat::ONE, Quat::I, Quat::ZERO])
        }
    }

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    #[test]
    fn constant_chart_is_flat() {
        let chart = ImmersionChart::new("constant", BTreeMap::new(), vec![(-1.0, 1.0); 2], Arc::new(Constant)).unwrap();
        let w = chart.eval(&[0.0, 0.0]).unwrap().stiefel().clone();
        let s = |_: &[f64]| Ok(w.clone());
        assert!(covariant_derivative(&chart, &[0.1, 0.2], 0, &s, &tol()).unwrap().norm() < 1e-14);
        let (a, b) = curvature_paths(&chart, &[0.1, 0.2], 0, 1, &w, &tol()).unwrap();
        assert!(a.norm() < 1e-14 && b.norm() < 1e-14);
    }

    #[test]
    fn covariant_derivative_of_projected_constant() {
        let chart = catalog::veronese(3).unwrap();
        let u = [0.2, -0.4];
        let c = Mat::column(
            Field::Complex,
            &[
                Quat::new(0.3, 0.1, 0.0, 0.0),
                Quat::ONE,
                Quat::I,
                Quat::new(-0.5, 0.0, 0.0, 0.0),
            ],
        );
        let s = |x: &[f64]| Ok(&chart.projector(x)? * &c);
        let p = chart.projector(&u).unwrap();
        let dp = projector_derivatives(&chart, &u, &tol()).unwrap();
        for i in 0..2 {
            let nabla = covariant_derivative(&chart, &u, i, &s, &tol()).unwrap();
            assert!((&nabla - &(&p * &(&dp[i] * &c))).norm() < 1e-8);
            // d|s|^2 = 2 <nabla s, s>
            let h = 1e-5;
            let sq = |t: f64| {
                let mut x = u.to_vec();
                x[i] += t;
                s(&x).unwrap().norm_sqr()
            };
            let d = (sq(h) - sq(-h)) / (2.0 * h);
            assert!((d - 2.0 * nabla.re_inner(&s(&u).unwrap())).abs() < 1e-6);
        }
    }

    #[test]
    fn oracle_curvature_symmetries() {
        let chart = catalog::perturbed(&catalog::veronese(2).unwrap(), 0.05, 5).unwrap();
        let u = [0.15, -0.25];
        let v = chart.eval(&u).unwrap().stiefel().clone();
        let (w, x) = (
            v.mul_right(Quat::new(0.6, 0.8, 0.0, 0.0)),
            v.mul_right(Quat::new(-0.3, 0.2, 0.0, 0.0)),
        );
        let rij = curvature_oracle(&chart, &u, 0, 1, &w, &tol()).unwrap();
        let rji = curvature_oracle(&chart, &u, 1, 0, &w, &tol()).unwrap();
        assert!((&rij + &rji).norm() < 1e-10);
        let rx = curvature_oracle(&chart, &u, 0, 1, &x, &tol()).unwrap();
        assert!((x.re_inner(&rij) + rx.re_inner(&w)).abs() < 1e-8);
    }

    #[test]
    fn line_curvature_matches_formula() {
        let chart = catalog::veronese(1).unwrap();
        let u = [0.3, 0.2];
        let sff = second_fundamental_form(&chart, &u, &tol()).unwrap();
        let ctx = PointContext::new(sff, &AnalysisOptions::default()).unwrap();
        let w = chart.eval(&u).unwrap().stiefel().clone();
        let v = w.mul_right(Quat::I);
        let alpha = AlphaElement::from_fiber_pair(
            &Mat::column(Field::Complex, &[Quat::ONE]),
            &Mat::column(Field::Complex, &[Quat::I]),
        )
        .unwrap();
        let x = [0.6, -0.8];
        let xl = lie_lift(ctx.frame_lift(), &ctx.sff().frame().vector(&x)).unwrap();
        let formula = curvature_norm(&xl, &alpha, ctx.lifted_basis()).unwrap();
        let oracle = vertizontal_curvature_norm(&chart, &u, &x, &w, &v, CurvaturePath::ClosedForm, &tol()).unwrap();
        assert!((formula - oracle).abs() < 1e-4 * formula);
    }

    #[test]
    fn dr_oracle_vanishes_on_parallel_examples() {
        for (chart, bound) in [
            (catalog::linear_embedding(Field::Complex, 2, 3).unwrap(), 1e-5),
            (catalog::veronese(3).unwrap(), 1e-4),
        ] {
            let u: Vec<f64> = chart.domain().iter().map(|(a, b)| a + 0.4 * (b - a)).collect();
            let w = chart.eval(&u).unwrap().stiefel().clone();
            let v = w.mul_right(Quat::I);
            let d = dr_oracle(&chart, &u, &[1.0, 0.0], &[0.0, 1.0], &[0.6, 0.8], &w, &v, &tol()).unwrap();
            assert!(d.abs() < bound, "{} {d}", chart.name());
        }
    }
}
