use std::time::Instant;

use anyhow::{Context, Result};
use rayon::prelude::*;
use serde_json::json;

use pullback_core::catalog::Expectations;
use pullback_core::connection::{analyze_point, AnalysisOptions, ConnectionVerdict, PointAnalysis};
use pullback_core::immersion::ImmersionChart;

use crate::config::RunConfig;
use crate::report::{Assertion, ChartInfo, PointRecord, Report, VerdictRecord};

/// Tolerances for catalog expectations.
const ANGLE_TOL: f64 = 1e-6;
const MARGIN_TOL: f64 = 1e-6;
const SHAPE_TOL: f64 = 1e-6;
const BASE_CURVATURE_TOL: f64 = 1e-4;

pub fn evaluate(
    chart: &ImmersionChart,
    points: &[Vec<f64>],
    options: &AnalysisOptions,
    pool: &rayon::ThreadPool,
) -> Result<Vec<PointAnalysis>> {
    pool.install(|| {
        points
            .par_iter()
            .map(|u| analyze_point(chart, u, options).with_context(|| format!("analysis at u = {u:?}")))
            .collect()
    })
}

fn max_of(points: &[PointAnalysis], f: impl Fn(&PointAnalysis) -> Option<f64>) -> Option<f64> {
    points.iter().filter_map(f).reduce(f64::max)
}

/// Checks every expectation the catalog declares for the chart.
pub fn expectation_assertions(
    expected: &Expectations,
    points: &[PointAnalysis],
    verdict: &VerdictRecord,
    prefix: &str,
) -> Vec<Assertion> {
    let mut out = Vec::new();
    let mut push = |name: &str, expected, observed, tolerance, pass| {
        out.push(Assertion {
            name: format!("{prefix}{name}"),
            expected,
            observed,
            tolerance,
            pass,
        })
    };
    if let Some(tg) = expected.totally_geodesic {
        let m = max_of(points, |p| Some(p.shape_norm)).unwrap_or(0.0);
        push(
            "totally_geodesic",
            json!(tg),
            json!(m),
            Some(SHAPE_TOL),
            (m < SHAPE_TOL) == tg,
        );
    }
    for (name, flag) in [("kahler", expected.kahler), ("quaternionic", expected.quaternionic)] {
        if let Some(flag) = flag {
            let theta = max_of(points, |p| p.theta);
            let holds = theta.is_some_and(|t| t < ANGLE_TOL);
            push(name, json!(flag), json!(theta), Some(ANGLE_TOL), holds == flag);
        }
    }
    if let Some(fat) = expected.fat {
        let v = &verdict.verdict;
        push("fat", json!(fat), json!(v.fat), None, v.fat == Some(fat));
    }
    if let Some(parallel) = expected.parallel {
        push(
            "parallel",
            json!(parallel),
            json!(verdict.verdict.parallel_residual),
            Some(verdict.parallel_tolerance),
            verdict.parallel == Some(parallel),
        );
    }
    if let Some(theta) = expected.theta {
        let dev = max_of(points, |p| p.theta.map(|t| (t - theta).abs()));
        push(
            "theta",
            json!(theta),
            json!(dev.map(|d| theta + d)),
            Some(ANGLE_TOL),
            dev.is_some_and(|d| d < ANGLE_TOL),
        );
    }
    if let Some(m) = expected.fatness_margin {
        let dev = max_of(points, |p| p.fatness_margin.map(|f| (f - m).abs()));
        push(
            "fatness_margin",
            json!(m),
            json!(verdict.verdict.fatness_margin),
            Some(MARGIN_TOL),
            dev.is_some_and(|d| d < MARGIN_TOL),
        );
    }
    if let Some(k) = expected.base_curvature_g0 {
        let dev = max_of(points, |p| p.base_curvature.map(|b| (b * p.metric_scale - k).abs()));
        push(
            "base_curvature_g0",
            json!(k),
            json!(dev.map(|d| k + d)),
            Some(BASE_CURVATURE_TOL),
            dev.is_some_and(|d| d < BASE_CURVATURE_TOL),
        );
    }
    out
}

pub fn run(config: RunConfig, pool: &rayon::ThreadPool) -> Result<Report> {
    let built = config.build_chart()?;
    let chart = built.chart;
    let options = config.options(&chart)?;
    let points = config.points(&chart)?;
    let mut report = Report::new(config);
    report.chart = Some(ChartInfo::of(&chart));
    let start = Instant::now();
    let analyses = evaluate(&chart, &points, &options, pool)?;
    report.timing.evaluation_seconds = start.elapsed().as_secs_f64();
    let verdict = VerdictRecord::new(&analyses, ConnectionVerdict::aggregate(&analyses, &options.tol));
    report.assertions = expectation_assertions(&built.expected, &analyses, &verdict, "");
    report.points = analyses.into_iter().map(PointRecord::new).collect();
    report.verdict = Some(verdict);
    Ok(report)
}
