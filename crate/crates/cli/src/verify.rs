use std::sync::Arc;
use std::time::Instant;

use anyhow::{Context, Result};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::json;

use pullback_core::algebra::random::{random_mat, random_unit_imaginary, random_unit_vector};
use pullback_core::connection::{
    curvature_norm, dr_component, AlphaElement, AnalysisOptions, PointContext, StructureKind,
};
use pullback_core::homogeneous::lie_lift;
use pullback_core::immersion::{second_fundamental_form, ImmersionChart};
use pullback_core::oracle::{
    base_sectional_curvature_oracle, curvature_closed_form, curvature_commutator, curvature_paths, dr_oracle,
    frame_to_chart, inequality_oracle, lemma_omega_check, vertizontal_curvature_norm, CurvaturePath, LEMMA_EPS,
};
use pullback_core::tolerances::Tolerances;
use pullback_core::{Field, FrameLift, Mat, Quat};

use crate::config::RunConfig;
use crate::report::{Assertion, ChartInfo, Comparison, Report, Skipped};

const VERIFY_SEED: u64 = 0x5e1f_c0de;

const PATHS_TOL: f64 = 1e-6;
const VERTIZONTAL_H: f64 = 1e-3;
const VERTIZONTAL_TOL: f64 = 1e-4;
/// Denominator floor of the relative error (Lagrangian charts have `|R| = 0`).
const VERTIZONTAL_FLOOR: f64 = 1e-2;
const DR_TOL: f64 = 2e-3;
const DR_TRIPLES: usize = 3;
const GAUSS_TOL: f64 = 1e-4;
const GAUSS_LOOP_EPS: f64 = 0.02;
const GAUSS_LOOP_STEPS: usize = 8;
const INEQUALITY_TOL: f64 = 2e-3;
const ORDER_H: f64 = 0.04;
const ORDER_MIN_RATIO: f64 = 4.0;
const ORDER_NOISE_FLOOR: f64 = 1e-12;
const LEMMA_TRIALS: usize = 20;
const LEMMA_C_TOL: f64 = 1e-3;
const LEMMA_DEVIATION_TOL: f64 = 1e-4;

fn compare(
    suite: &'static str,
    u: &[f64],
    detail: String,
    formula: f64,
    oracle: f64,
    tol: f64,
    floor: f64,
) -> Comparison {
    let abs_err = (formula - oracle).abs();
    let rel_err = abs_err / oracle.abs().max(floor);
    let measured = if floor > 0.0 { rel_err } else { abs_err };
    Comparison {
        suite,
        u: u.to_vec(),
        detail,
        formula,
        oracle,
        abs_err,
        rel_err,
        tolerance: tol,
        pass: measured < tol,
    }
}

/// Orthonormal fiber pair as `k x 1` coordinates.
fn fiber_pair(field: Field, k: usize, rng: &mut ChaCha8Rng) -> (Mat, Mat) {
    if k == 1 {
        let q = random_unit_imaginary(field, rng);
        return (Mat::column(field, &[Quat::real(1.0)]), Mat::column(field, &[q]));
    }
    let (x, y) = orthonormal_pair(&random_unit_vector(k, rng), &random_unit_vector(k, rng));
    let col = |v: &[f64]| Mat::column(field, &v.iter().map(|&c| Quat::real(c)).collect::<Vec<_>>());
    (col(&x), col(&y))
}

fn orthonormal_pair(a: &[f64], b: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let na = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let x: Vec<f64> = a.iter().map(|v| v / na).collect();
    let d: f64 = x.iter().zip(b).map(|(p, q)| p * q).sum();
    let y: Vec<f64> = b.iter().zip(&x).map(|(q, p)| q - d * p).collect();
    let ny = y.iter().map(|v| v * v).sum::<f64>().sqrt();
    (x, y.iter().map(|v| v / ny).collect())
}

fn fmt(v: &[f64]) -> String {
    let parts: Vec<String> = v.iter().map(|x| format!("{x:.4}")).collect();
    format!("[{}]", parts.join(", "))
}

fn has_structure(kind: StructureKind) -> bool {
    matches!(
        kind,
        StructureKind::Complex | StructureKind::Quaternionic | StructureKind::RealGrassmannian
    )
}

/// All formula-versus-oracle comparisons at one point.
fn point_comparisons(chart: &ImmersionChart, u: &[f64], index: usize, tol: &Tolerances) -> Result<Vec<Comparison>> {
    let mut rng = ChaCha8Rng::seed_from_u64(VERIFY_SEED.wrapping_add(index as u64));
    let mut out = Vec::new();
    let sff = second_fundamental_form(chart, u, tol)?;
    let ctx = PointContext::new(
        sff.clone(),
        &AnalysisOptions {
            tol: *tol,
            ..Default::default()
        },
    )?;
    let frame = sff.frame();
    let stiefel = frame.point().stiefel().clone();
    let (n, field, k) = (sff.dim(), chart.field(), chart.k());

    // curvature paths
    let p = chart.projector(u)?;
    let w = &p * &random_mat(field, chart.ambient_dim(), 1, &mut rng);
    let w = w.scale(1.0 / w.norm());
    for i in 0..n {
        for j in (i + 1)..n {
            let (a, b) = curvature_paths(chart, u, i, j, &w, tol)?;
            // values are |R w| along each path; the error is |R_a w - R_b w|
            let abs_err = (&a - &b).norm();
            out.push(Comparison {
                suite: "curvature-paths",
                u: u.to_vec(),
                detail: format!("plane ({i}, {j})"),
                formula: a.norm(),
                oracle: b.norm(),
                abs_err,
                rel_err: abs_err / b.norm().max(1e-12),
                tolerance: PATHS_TOL,
                pass: abs_err < PATHS_TOL,
            });
        }
    }

    if has_structure(ctx.kind()) {
        // |R(W, V) X| = curvature_norm(X, alpha(W, V))
        let x = random_unit_vector(n, &mut rng);
        let (a, b) = fiber_pair(field, k, &mut rng);
        let alpha = AlphaElement::from_fiber_pair(&a, &b)?;
        let xl = lie_lift(ctx.frame_lift(), &frame.vector(&x))?;
        let formula = curvature_norm(&xl, &alpha, ctx.lifted_basis())?;
        let (wv, vv) = (&stiefel * &a, &stiefel * &b);
        let path = CurvaturePath::Commutator {
            h: VERTIZONTAL_H,
            extrapolate: true,
        };
        let oracle = vertizontal_curvature_norm(chart, u, &x, &wv, &vv, path, tol)?;
        out.push(compare(
            "vertizontal-norm",
            u,
            format!("X = {}", fmt(&x)),
            formula,
            oracle,
            VERTIZONTAL_TOL,
            VERTIZONTAL_FLOOR,
        ));

        // dr_component = 2 dr_oracle for k = 1, = dr_oracle for real k >= 2
        let factor = if k == 1 { 2.0 } else { 1.0 };
        let lift = Arc::new(FrameLift::standard(frame.point()));
        for _ in 0..DR_TRIPLES {
            let (x, y, z) = (
                random_unit_vector(n, &mut rng),
                random_unit_vector(n, &mut rng),
                random_unit_vector(n, &mut rng),
            );
            let (a, b) = fiber_pair(field, k, &mut rng);
            let alpha = AlphaElement::from_fiber_pair(&a, &b)?;
            let formula = dr_component(&sff, &lift, &x, &y, &z, &alpha)?;
            let oracle = dr_oracle(chart, u, &x, &y, &z, &(&stiefel * &a), &(&stiefel * &b), tol)?;
            out.push(compare(
                "curvature-derivative",
                u,
                format!("X = {}, Y = {}, Z = {}, factor {factor}", fmt(&x), fmt(&y), fmt(&z)),
                formula,
                factor * oracle,
                DR_TOL,
                0.0,
            ));
        }
    }

    if n >= 2 {
        // Gauss equation on the first coordinate plane against base holonomy
        let to_frame = frame
            .to_frame()
            .clone()
            .try_inverse()
            .context("singular coordinate frame")?;
        let e = |i: usize| {
            let mut v = vec![0.0; n];
            v[i] = 1.0;
            frame_to_chart(&to_frame, &v)
        };
        let (x, y) = orthonormal_pair(&e(0), &e(1));
        let formula = ctx.base_curvature_g0(&x, &y)?;
        let oracle = base_sectional_curvature_oracle(chart, u, 0, 1, GAUSS_LOOP_EPS, GAUSS_LOOP_STEPS, tol)?;
        out.push(compare(
            "gauss",
            u,
            "plane (d0, d1)".into(),
            formula,
            oracle,
            GAUSS_TOL,
            0.0,
        ));

        if has_structure(ctx.kind()) {
            // Inequality margin: exact for a single structure, otherwise the
            // formula minimizes over all structure elements.
            let (x, y) = orthonormal_pair(&random_unit_vector(n, &mut rng), &random_unit_vector(n, &mut rng));
            let (a, b) = fiber_pair(field, k, &mut rng);
            let formula = ctx.inequality_margin(&x, &y)?.unwrap_or(f64::NAN);
            let sides = inequality_oracle(chart, u, &x, &y, &(&stiefel * &a), &(&stiefel * &b), tol)?;
            // the formula pairs (2 curvature_norm, 2 Lie) for real k >= 2
            let factor = if k == 1 { 1.0 } else { 4.0 };
            let oracle = factor * sides.margin();
            let mut c = compare(
                "inequality",
                u,
                format!("X = {}, Y = {}, factor {factor}", fmt(&x), fmt(&y)),
                formula,
                oracle,
                INEQUALITY_TOL,
                0.0,
            );
            if ctx.kind() != StructureKind::Complex {
                c.detail.push_str(", one-sided");
                c.pass = formula <= oracle + INEQUALITY_TOL;
            }
            out.push(c);
        }
    }
    Ok(out)
}

fn order_test(chart: &ImmersionChart, points: &[Vec<f64>], tol: &Tolerances) -> Result<Option<Assertion>> {
    if chart.domain_dim() < 2 {
        return Ok(None);
    }
    let Some(u) = points
        .iter()
        .max_by(|a, b| chart.boundary_distance(a).total_cmp(&chart.boundary_distance(b)))
    else {
        return Ok(None);
    };
    if chart.boundary_distance(u) < 4.0 * ORDER_H + tol.boundary_margin() {
        return Ok(None);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(VERIFY_SEED);
    let p = chart.projector(u)?;
    let w = &p * &random_mat(chart.field(), chart.ambient_dim(), 1, &mut rng);
    let w = w.scale(1.0 / w.norm());
    let exact = curvature_closed_form(chart, u, 0, 1, &w, tol)?;
    let coarse = (&curvature_commutator(chart, u, 0, 1, &w, ORDER_H, true)? - &exact).norm();
    let fine = (&curvature_commutator(chart, u, 0, 1, &w, 0.5 * ORDER_H, true)? - &exact).norm();
    let (observed, pass) = if coarse < ORDER_NOISE_FLOOR {
        (
            json!({"coarse_error": coarse, "fine_error": fine, "ratio": null, "exact": true}),
            true,
        )
    } else {
        let ratio = coarse / fine;
        (
            json!({"coarse_error": coarse, "fine_error": fine, "ratio": ratio, "exact": false}),
            ratio >= ORDER_MIN_RATIO,
        )
    };
    Ok(Some(Assertion {
        name: format!("curvature-order: error ratio for h = {ORDER_H} -> {}", 0.5 * ORDER_H),
        expected: json!({"min_ratio": ORDER_MIN_RATIO}),
        observed,
        tolerance: None,
        pass,
    }))
}

pub fn run(config: RunConfig, pool: &rayon::ThreadPool) -> Result<Report> {
    let chart = config.build_chart()?.chart;
    let tol = config.tolerances;
    let points = config.points(&chart)?;
    for u in &points {
        chart.check_interior(u, tol.boundary_margin())?;
    }
    let mut report = Report::new(config);
    report.chart = Some(ChartInfo::of(&chart));
    let start = Instant::now();
    let per_point: Vec<Vec<Comparison>> = pool.install(|| {
        points
            .par_iter()
            .enumerate()
            .map(|(i, u)| point_comparisons(&chart, u, i, &tol).with_context(|| format!("verification at u = {u:?}")))
            .collect::<Result<_>>()
    })?;
    report.comparisons = per_point.into_iter().flatten().collect();

    let kind = StructureKind::of(chart.field(), chart.k());
    if !has_structure(kind) {
        let reason = format!("no structure algebra to pair against ({kind:?})");
        for suite in ["vertizontal-norm", "curvature-derivative", "inequality"] {
            report.skipped.push(Skipped {
                suite,
                reason: reason.clone(),
            });
        }
    }
    if chart.domain_dim() < 2 {
        report.skipped.push(Skipped {
            suite: "gauss",
            reason: "base is 1-dimensional".into(),
        });
    }
    for suite in [
        "curvature-paths",
        "vertizontal-norm",
        "curvature-derivative",
        "gauss",
        "inequality",
    ] {
        let rows: Vec<&Comparison> = report.comparisons.iter().filter(|c| c.suite == suite).collect();
        if rows.is_empty() {
            continue;
        }
        let worst = rows
            .iter()
            .map(|c| {
                if suite == "vertizontal-norm" {
                    c.rel_err
                } else {
                    c.abs_err
                }
            })
            .fold(0.0, f64::max);
        report.assertions.push(Assertion {
            name: format!("{suite}: all {} comparisons within tolerance", rows.len()),
            expected: json!({"max_error": rows[0].tolerance}),
            observed: json!({"max_error": worst, "failures": rows.iter().filter(|c| !c.pass).count()}),
            tolerance: Some(rows[0].tolerance),
            pass: rows.iter().all(|c| c.pass),
        });
    }
    match order_test(&chart, &points, &tol)? {
        Some(a) => report.assertions.push(a),
        None => report.skipped.push(Skipped {
            suite: "curvature-order",
            reason: format!(
                "needs a 2-dimensional base and a point {} from the boundary",
                4.0 * ORDER_H
            ),
        }),
    }

    if chart.field() == Field::Real && chart.k() == 1 {
        report.skipped.push(Skipped {
            suite: "lemma-omega",
            reason: "fiber algebra of a real line bundle is trivial".into(),
        });
    } else {
        let lemma = lemma_omega_check(
            chart.field(),
            chart.ambient_dim(),
            chart.k(),
            LEMMA_TRIALS,
            LEMMA_EPS,
            &tol,
        )?;
        report.assertions.push(Assertion {
            name: format!(
                "lemma-omega: fitted c on the target Grassmannian ({} trials)",
                LEMMA_TRIALS
            ),
            expected: json!(0.5),
            observed: json!(lemma.fitted_c),
            tolerance: Some(LEMMA_C_TOL),
            pass: (lemma.fitted_c - 0.5).abs() < LEMMA_C_TOL,
        });
        report.assertions.push(Assertion {
            name: "lemma-omega: max deviation of the holonomy curvature from half the bracket".into(),
            expected: json!(0.0),
            observed: json!(lemma.max_deviation),
            tolerance: Some(LEMMA_DEVIATION_TOL),
            pass: lemma.max_deviation < LEMMA_DEVIATION_TOL,
        });
    }
    report.timing.evaluation_seconds = start.elapsed().as_secs_f64();
    Ok(report)
}
