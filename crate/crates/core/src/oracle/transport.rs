use nalgebra::{DMatrix, DVector};

use crate::algebra::Mat;
use crate::error::{Error, Result};
use crate::homogeneous::GrassTangent;
use crate::immersion::ImmersionChart;
use crate::tolerances::Tolerances;

/// Default RK4 steps per path segment.
pub const DEFAULT_TRANSPORT_STEPS: usize = 32;

/// Outcome of transporting fiber vectors along a polyline.
#[derive(Clone, Debug)]
pub struct TransportResult {
    pub initial: Mat,
    pub final_vector: Mat,
    pub path: Vec<Vec<f64>>,
    /// RK4 steps per segment of the reported (finer) run.
    pub steps: usize,
    /// `|s_fine - s_coarse| / 15` from a run at half the step count.
    pub error_estimate: f64,
}

impl TransportResult {
    /// `| |final| - |initial| |`
    pub fn norm_drift(&self) -> f64 {
        (self.final_vector.norm() - self.initial.norm()).abs()
    }
}

pub(crate) fn fiber_residual(p: &Mat, s: &Mat) -> f64 {
    (s - &(p * s)).norm()
}

pub(crate) fn check_fiber(p: &Mat, s: &Mat) -> Result<()> {
    let residual = fiber_residual(p, s);
    if residual > 1e-8 * s.norm().max(1.0) {
        return Err(Error::FiberConstraint { residual });
    }
    Ok(())
}

/// `dP/du_i` at `u`.
pub fn projector_derivatives(chart: &ImmersionChart, u: &[f64], tol: &Tolerances) -> Result<Vec<Mat>> {
    Ok(chart
        .differential(u, tol)?
        .iter()
        .map(GrassTangent::projector_form)
        .collect())
}

fn path_length(path: &[Vec<f64>]) -> f64 {
    path.windows(2)
        .map(|w| w[0].iter().zip(&w[1]).map(|(a, b)| (b - a).powi(2)).sum::<f64>().sqrt())
        .sum()
}

fn lerp(a: &[f64], b: &[f64], t: f64) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + t * (y - x)).collect()
}

fn check_path(chart: &ImmersionChart, path: &[Vec<f64>], tol: &Tolerances) -> Result<()> {
    if path.is_empty() {
        return Err(Error::ShapeMismatch("empty path".into()));
    }
    for p in path {
        chart.check_interior(p, tol.boundary_margin())?;
    }
    Ok(())
}

/// `ds/dt = (dP/dt) s` along one segment, RK4 with projection onto the
/// fiber after each step.
fn transport_segment(
    chart: &ImmersionChart,
    a: &[f64],
    b: &[f64],
    s0: &Mat,
    steps: usize,
    tol: &Tolerances,
) -> Result<Mat> {
    let dir: Vec<f64> = a.iter().zip(b).map(|(x, y)| y - x).collect();
    if dir.iter().all(|d| *d == 0.0) {
        return Ok(s0.clone());
    }
    let pdot = |t: f64| -> Result<Mat> {
        let dp = projector_derivatives(chart, &lerp(a, b, t), tol)?;
        let mut acc = Mat::zeros(s0.field(), dp[0].rows(), dp[0].cols());
        for (d, c) in dp.iter().zip(&dir) {
            acc = &acc + &d.scale(*c);
        }
        Ok(acc)
    };
    let h = 1.0 / steps as f64;
    let mut s = s0.clone();
    let mut a_start = pdot(0.0)?;
    for n in 0..steps {
        let t = n as f64 * h;
        let a_mid = pdot(t + 0.5 * h)?;
        let a_end = pdot(t + h)?;
        let k1 = &a_start * &s;
        let k2 = &a_mid * &(&s + &k1.scale(0.5 * h));
        let k3 = &a_mid * &(&s + &k2.scale(0.5 * h));
        let k4 = &a_end * &(&s + &k3.scale(h));
        let incr = &(&(&k1 + &k2.scale(2.0)) + &k3.scale(2.0)) + &k4;
        s = &s + &incr.scale(h / 6.0);
        s = &chart.projector(&lerp(a, b, t + h))? * &s;
        a_start = a_end;
    }
    Ok(s)
}

fn transport_path(chart: &ImmersionChart, path: &[Vec<f64>], v0: &Mat, steps: usize, tol: &Tolerances) -> Result<Mat> {
    let mut s = v0.clone();
    for w in path.windows(2) {
        s = transport_segment(chart, &w[0], &w[1], &s, steps, tol)?;
    }
    Ok(s)
}

/// Parallel transport of the columns of `v0` (fiber vectors at `path[0]`)
/// along the polyline `path` with `steps` RK4 steps per segment.
pub fn parallel_transport(
    chart: &ImmersionChart,
    path: &[Vec<f64>],
    v0: &Mat,
    steps: usize,
    tol: &Tolerances,
) -> Result<TransportResult> {
    if steps == 0 {
        return Err(Error::StepUnderflow);
    }
    check_path(chart, path, tol)?;
    check_fiber(&chart.projector(&path[0])?, v0)?;
    if path_length(path) == 0.0 {
        return Ok(TransportResult {
            initial: v0.clone(),
            final_vector: v0.clone(),
            path: path.to_vec(),
            steps,
            error_estimate: 0.0,
        });
    }
    let coarse = transport_path(chart, path, v0, steps, tol)?;
    let fine = transport_path(chart, path, v0, 2 * steps, tol)?;
    Ok(TransportResult {
        initial: v0.clone(),
        error_estimate: (&fine - &coarse).norm() / 15.0,
        final_vector: fine,
        path: path.to_vec(),
        steps: 2 * steps,
    })
}

/// Transport along `path` at exactly `steps` steps per segment, without the
/// error estimate.
pub fn parallel_transport_fixed(
    chart: &ImmersionChart,
    path: &[Vec<f64>],
    v0: &Mat,
    steps: usize,
    tol: &Tolerances,
) -> Result<Mat> {
    if steps == 0 {
        return Err(Error::StepUnderflow);
    }
    check_path(chart, path, tol)?;
    check_fiber(&chart.projector(&path[0])?, v0)?;
    transport_path(chart, path, v0, steps, tol)
}

/// Lasso around the parallelogram spanned by `eps a` and `eps b`, centred
/// at `u`: out to a corner, once around (`a` first), back to `u`.
pub fn parallelogram_lasso(u: &[f64], a: &[f64], b: &[f64], eps: f64) -> Vec<Vec<f64>> {
    let corner = |s: f64, t: f64| -> Vec<f64> { (0..u.len()).map(|c| u[c] + eps * (s * a[c] + t * b[c])).collect() };
    vec![
        u.to_vec(),
        corner(-0.5, -0.5),
        corner(0.5, -0.5),
        corner(0.5, 0.5),
        corner(-0.5, 0.5),
        corner(-0.5, -0.5),
        u.to_vec(),
    ]
}

/// [`parallelogram_lasso`] on the coordinate directions `i`, `j`.
pub fn square_lasso(u: &[f64], i: usize, j: usize, eps: f64) -> Vec<Vec<f64>> {
    let n = u.len();
    let (mut a, mut b) = (vec![0.0; n], vec![0.0; n]);
    a[i] = 1.0;
    b[j] = 1.0;
    parallelogram_lasso(u, &a, &b, eps)
}

/// Holonomy of the pulled-back connection around [`square_lasso`], as a
/// `k x k` matrix against the Stiefel representative `V` of `phi(u)`:
/// transporting `V` returns `V hol`.
pub fn holonomy(
    chart: &ImmersionChart,
    u: &[f64],
    i: usize,
    j: usize,
    eps: f64,
    steps: usize,
    tol: &Tolerances,
) -> Result<Mat> {
    let v = chart.eval(u)?.stiefel().clone();
    let s = parallel_transport_fixed(chart, &square_lasso(u, i, j, eps), &v, steps, tol)?;
    Ok(&v.adjoint() * &s)
}

/// Christoffel symbols of the pull-back metric in chart coordinates,
/// `gamma[(l * n + i) * n + j] = Gamma^l_{ij}`, from
/// `Gamma_{m, ij} = g0(dP_m, d^2 P_{ij})`.
pub fn christoffel(chart: &ImmersionChart, u: &[f64], tol: &Tolerances) -> Result<Vec<f64>> {
    let dp = projector_derivatives(chart, u, tol)?;
    let hess = chart.projector_hessian(u, tol)?;
    let n = dp.len();
    let gram = DMatrix::from_fn(n, n, |a, b| 0.5 * dp[a].re_inner(&dp[b]));
    let chol = gram.cholesky().ok_or(Error::NotAnImmersion {
        u: u.to_vec(),
        eigenvalue: 0.0,
    })?;
    let mut gamma = vec![0.0; n * n * n];
    for i in 0..n {
        for j in 0..n {
            let sym = (&hess[i][j] + &hess[j][i]).scale(0.5);
            let lowered = DVector::from_fn(n, |m, _| 0.5 * dp[m].re_inner(&sym));
            let raised = chol.solve(&lowered);
            for l in 0..n {
                gamma[(l * n + i) * n + j] = raised[l];
            }
        }
    }
    Ok(gamma)
}

/// `g_ij` of the pull-back metric in chart coordinates.
pub fn coordinate_gram(chart: &ImmersionChart, u: &[f64], tol: &Tolerances) -> Result<DMatrix<f64>> {
    let dp = projector_derivatives(chart, u, tol)?;
    let n = dp.len();
    Ok(DMatrix::from_fn(n, n, |a, b| 0.5 * dp[a].re_inner(&dp[b])))
}

fn base_rhs(gamma: &[f64], dir: &[f64], xi: &[f64]) -> Vec<f64> {
    let n = xi.len();
    (0..n)
        .map(|l| {
            let mut acc = 0.0;
            for i in 0..n {
                for j in 0..n {
                    acc += gamma[(l * n + i) * n + j] * dir[i] * xi[j];
                }
            }
            -acc
        })
        .collect()
}

fn axpy(x: &[f64], s: f64, y: &[f64]) -> Vec<f64> {
    x.iter().zip(y).map(|(a, b)| a + s * b).collect()
}

/// Levi-Civita transport of the pull-back metric along `path` of a tangent
/// vector given by chart components `xi` (so `X = sum xi_i d_i`).
pub fn base_transport(
    chart: &ImmersionChart,
    path: &[Vec<f64>],
    xi: &[f64],
    steps: usize,
    tol: &Tolerances,
) -> Result<Vec<f64>> {
    if steps == 0 {
        return Err(Error::StepUnderflow);
    }
    check_path(chart, path, tol)?;
    if xi.len() != chart.domain_dim() {
        return Err(Error::ShapeMismatch(format!(
            "{} components for a {}-dimensional chart",
            xi.len(),
            chart.domain_dim()
        )));
    }
    let mut x = xi.to_vec();
    for w in path.windows(2) {
        let (a, b) = (&w[0], &w[1]);
        let dir: Vec<f64> = a.iter().zip(b).map(|(p, q)| q - p).collect();
        if dir.iter().all(|d| *d == 0.0) {
            continue;
        }
        let h = 1.0 / steps as f64;
        let mut g_start = christoffel(chart, a, tol)?;
        for n in 0..steps {
            let t = n as f64 * h;
            let g_mid = christoffel(chart, &lerp(a, b, t + 0.5 * h), tol)?;
            let g_end = christoffel(chart, &lerp(a, b, t + h), tol)?;
            let k1 = base_rhs(&g_start, &dir, &x);
            let k2 = base_rhs(&g_mid, &dir, &axpy(&x, 0.5 * h, &k1));
            let k3 = base_rhs(&g_mid, &dir, &axpy(&x, 0.5 * h, &k2));
            let k4 = base_rhs(&g_end, &dir, &axpy(&x, h, &k3));
            for c in 0..x.len() {
                x[c] += h / 6.0 * (k1[c] + 2.0 * k2[c] + 2.0 * k3[c] + k4[c]);
            }
            g_start = g_end;
        }
    }
    Ok(x)
}

/// Sectional curvature of the pull-back metric on the plane of the chart
/// vectors `xi`, `eta` at `u`, from base holonomy around
/// [`parallelogram_lasso`] with one Richardson level in `eps`. Independent
/// of the second fundamental form.
pub fn base_curvature_oracle(
    chart: &ImmersionChart,
    u: &[f64],
    xi: &[f64],
    eta: &[f64],
    eps: f64,
    steps: usize,
    tol: &Tolerances,
) -> Result<f64> {
    let g = coordinate_gram(chart, u, tol)?;
    let n = chart.domain_dim();
    let ip = |a: &[f64], b: &[f64]| -> f64 {
        (0..n)
            .map(|i| (0..n).map(|j| a[i] * g[(i, j)] * b[j]).sum::<f64>())
            .sum()
    };
    let area = ip(xi, xi) * ip(eta, eta) - ip(xi, eta).powi(2);
    let at = |e: f64| -> Result<f64> {
        let back = base_transport(chart, &parallelogram_lasso(u, xi, eta, e), eta, steps, tol)?;
        // hol = I - R(X, Y) eps^2, so R(X, Y) Y = (Y - hol Y) / eps^2
        let r: Vec<f64> = eta.iter().zip(&back).map(|(a, b)| (a - b) / (e * e)).collect();
        Ok(ip(xi, &r) / area)
    };
    Ok((4.0 * at(0.5 * eps)? - at(eps)?) / 3.0)
}

/// [`base_curvature_oracle`] on the coordinate plane `(d_i, d_j)`.
pub fn base_sectional_curvature_oracle(
    chart: &ImmersionChart,
    u: &[f64],
    i: usize,
    j: usize,
    eps: f64,
    steps: usize,
    tol: &Tolerances,
) -> Result<f64> {
    let n = chart.domain_dim();
    let (mut a, mut b) = (vec![0.0; n], vec![0.0; n]);
    a[i] = 1.0;
    b[j] = 1.0;
    base_curvature_oracle(chart, u, &a, &b, eps, steps, tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::homogeneous::GrassPoint;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    #[test]
    fn zero_length_and_zero_steps() {
        let chart = catalog::veronese(2).unwrap();
        let u = vec![0.1, 0.2];
        let v = chart.eval(&u).unwrap().stiefel().clone();
        let r = parallel_transport(&chart, &[u.clone(), u.clone()], &v, 4, &tol()).unwrap();
        assert_eq!(r.final_vector, v);
        assert_eq!(
            parallel_transport(&chart, &[u.clone()], &v, 0, &tol()).unwrap_err(),
            Error::StepUnderflow
        );
        let off = GrassPoint::standard(chart.field(), 3, 1).stiefel().clone();
        assert!(matches!(
            parallel_transport(&chart, &[u.clone(), vec![0.3, 0.3]], &off, 4, &tol()),
            Err(Error::FiberConstraint { .. })
        ));
    }

    #[test]
    fn reversible_and_norm_preserving() {
        let chart = catalog::veronese(3).unwrap();
        let path = vec![vec![0.1, 0.2], vec![0.5, -0.3], vec![-0.2, 0.4]];
        let v = chart.eval(&path[0]).unwrap().stiefel().clone();
        let there = parallel_transport(&chart, &path, &v, DEFAULT_TRANSPORT_STEPS, &tol()).unwrap();
        let length = path_length(&path);
        assert!(there.norm_drift() < 1e-8 * length);
        assert!(there.error_estimate < 1e-8);
        let back: Vec<Vec<f64>> = path.iter().rev().cloned().collect();
        let home = parallel_transport(&chart, &back, &there.final_vector, DEFAULT_TRANSPORT_STEPS, &tol()).unwrap();
        assert!((&home.final_vector - &v).norm() < 1e-7);
    }

    #[test]
    fn transport_is_fourth_order() {
        let chart = catalog::veronese(3).unwrap();
        let path = vec![vec![-0.6, -0.5], vec![0.7, 0.6]];
        let v = chart.eval(&path[0]).unwrap().stiefel().clone();
        let reference = parallel_transport_fixed(&chart, &path, &v, 256, &tol()).unwrap();
        let err = |s: usize| (&parallel_transport_fixed(&chart, &path, &v, s, &tol()).unwrap() - &reference).norm();
        let (e1, e2) = (err(4), err(8));
        assert!(e1 / e2 >= 8.0, "ratio {}", e1 / e2);
    }

    #[test]
    fn holonomy_generator_converges_to_minus_curvature() {
        let chart = catalog::veronese(2).unwrap();
        let u = [0.2, -0.1];
        let v = chart.eval(&u).unwrap().stiefel().clone();
        let dp = projector_derivatives(&chart, &u, &tol()).unwrap();
        let r = &v.adjoint() * &(&Mat::commutator(&dp[0], &dp[1]) * &v);
        let err = |eps: f64| {
            let log = holonomy(&chart, &u, 0, 1, eps, 8, &tol())
                .unwrap()
                .log_near_identity()
                .unwrap();
            (&log + &r.scale(eps * eps)).norm()
        };
        let e: Vec<f64> = [0.02, 0.01, 0.005].iter().map(|&x| err(x)).collect();
        for w in e.windows(2) {
            assert!((w[0] / w[1]).log2() >= 2.7, "{e:?}");
        }
    }

    #[test]
    fn base_transport_is_an_isometry() {
        let chart = catalog::perturbed(&catalog::veronese(2).unwrap(), 0.05, 3).unwrap();
        let path = vec![vec![0.1, 0.1], vec![0.4, -0.2], vec![-0.3, 0.2]];
        let (x, y) = ([1.0, 0.3], [-0.2, 0.7]);
        let tx = base_transport(&chart, &path, &x, DEFAULT_TRANSPORT_STEPS, &tol()).unwrap();
        let ty = base_transport(&chart, &path, &y, DEFAULT_TRANSPORT_STEPS, &tol()).unwrap();
        let g0 = coordinate_gram(&chart, &path[0], &tol()).unwrap();
        let g1 = coordinate_gram(&chart, &path[2], &tol()).unwrap();
        let ip = |g: &DMatrix<f64>, a: &[f64], b: &[f64]| {
            (0..2)
                .map(|i| (0..2).map(|j| a[i] * g[(i, j)] * b[j]).sum::<f64>())
                .sum::<f64>()
        };
        assert!((ip(&g0, &x, &y) - ip(&g1, &tx, &ty)).abs() < 1e-7);
        assert!((ip(&g0, &x, &x) - ip(&g1, &tx, &tx)).abs() < 1e-7);
        assert_eq!(base_transport(&chart, &path[..1], &x, 4, &tol()).unwrap(), x.to_vec());
    }

    #[test]
    fn flat_torus_has_trivial_base_holonomy() {
        let chart = catalog::clifford_torus().unwrap();
        let rect = vec![
            vec![-0.5, -0.4],
            vec![0.6, -0.4],
            vec![0.6, 0.7],
            vec![-0.5, 0.7],
            vec![-0.5, -0.4],
        ];
        let x = [0.8, -0.6];
        let back = base_transport(&chart, &rect, &x, 8, &tol()).unwrap();
        assert!(back.iter().zip(&x).all(|(a, b)| (a - b).abs() < 1e-6));
    }

    #[test]
    fn base_curvature_of_the_line() {
        // CP^1 in g0 units has constant curvature 4
        let chart = catalog::veronese(1).unwrap();
        let k = base_sectional_curvature_oracle(&chart, &[0.3, 0.1], 0, 1, 0.02, 8, &tol()).unwrap();
        assert!((k - 4.0).abs() < 1e-5, "{k}");
    }
}
