use std::time::Instant;

use anyhow::{bail, Result};

use pullback_core::connection::ConnectionVerdict;

use crate::analyze::{evaluate, expectation_assertions};
use crate::config::RunConfig;
use crate::report::{ChartInfo, Report, SweepRow, VerdictRecord};

pub fn run(config: RunConfig, pool: &rayon::ThreadPool) -> Result<Report> {
    let Some(vary) = config.vary.clone() else {
        bail!("sweep needs --vary NAME=v1,v2,... or NAME=start:stop:count");
    };
    if vary.values.is_empty() {
        bail!("sweep range for `{}` is empty", vary.param);
    }
    let mut report = Report::new(config.clone());
    let start = Instant::now();
    let mut first_mean: Option<f64> = None;
    for &value in &vary.values {
        let mut params = config.params.clone();
        params.insert(vary.param.clone(), value);
        let built = config.build_chart_with(&params)?;
        let chart = built.chart;
        if report.chart.is_none() {
            report.chart = Some(ChartInfo::of(&chart));
        }
        let options = config.options(&chart)?;
        let points = config.points(&chart)?;
        let analyses = evaluate(&chart, &points, &options, pool)?;
        let verdict = VerdictRecord::new(&analyses, ConnectionVerdict::aggregate(&analyses, &options.tol));
        let prefix = format!("{}={value}: ", vary.param);
        report
            .assertions
            .extend(expectation_assertions(&built.expected, &analyses, &verdict, &prefix));
        let curvatures: Vec<f64> = analyses.iter().filter_map(|p| p.base_curvature).collect();
        let mean = (!curvatures.is_empty()).then(|| curvatures.iter().sum::<f64>() / curvatures.len() as f64);
        if first_mean.is_none() {
            first_mean = mean;
        }
        let v = &verdict.verdict;
        report.sweep.push(SweepRow {
            param: vary.param.clone(),
            value,
            points: analyses.len(),
            fatness_margin: v.fatness_margin,
            parallel_residual: v.parallel_residual,
            radial_residual: v.radial_residual,
            inequality_min_margin: v.inequality_min_margin,
            max_theta: v.max_theta,
            max_shape_norm: verdict.max_shape_norm,
            base_curvature_mean: mean,
            base_curvature_ratio: mean.zip(first_mean).map(|(m, f)| m / f),
            corollary_satisfied_points: v.corollary_satisfied_points,
        });
    }
    report.timing.evaluation_seconds = start.elapsed().as_secs_f64();
    Ok(report)
}
