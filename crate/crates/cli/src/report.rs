use std::collections::BTreeMap;
use std::io::Write;

use anyhow::Result;
use serde::Serialize;
use serde_json::Value;

use pullback_core::connection::{ConnectionVerdict, PointAnalysis, StructureKind};
use pullback_core::immersion::ImmersionChart;
use pullback_core::Field;

use crate::config::RunConfig;

pub const SCHEMA_VERSION: u32 = 1;

/// `parallel_residual` below this counts as parallel.
pub const PARALLEL_TOL: f64 = 1e-5;

#[derive(Debug, Serialize)]
pub struct Tool {
    pub name: &'static str,
    pub version: &'static str,
}

#[derive(Debug, Serialize)]
pub struct ChartInfo {
    pub name: String,
    pub field: Field,
    pub ambient_dim: usize,
    pub k: usize,
    pub domain_dim: usize,
    pub domain: Vec<(f64, f64)>,
    pub params: BTreeMap<String, f64>,
    pub analytic_differential: bool,
}

impl ChartInfo {
    pub fn of(chart: &ImmersionChart) -> Self {
        ChartInfo {
            name: chart.name().to_string(),
            field: chart.field(),
            ambient_dim: chart.ambient_dim(),
            k: chart.k(),
            domain_dim: chart.domain_dim(),
            domain: chart.domain().to_vec(),
            params: chart.params().clone(),
            analytic_differential: chart.has_analytic_differential(),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct PointRecord {
    #[serde(flatten)]
    pub analysis: PointAnalysis,
    /// Why each `null` field is null.
    pub null_reasons: BTreeMap<&'static str, String>,
}

fn structure_reason(kind: StructureKind) -> Option<&'static str> {
    match kind {
        StructureKind::Abelian => Some("structure algebra o(1) is trivial for real line bundles"),
        StructureKind::Unsupported => Some("k >= 2 over C or H is outside the supported structures"),
        _ => None,
    }
}

impl PointRecord {
    pub fn new(analysis: PointAnalysis) -> Self {
        let mut reasons = BTreeMap::new();
        let kind = analysis.structure;
        let wirtinger = "Wirtinger angle is defined only for k = 1 over C or H";
        let low_dim = "base is 1-dimensional";
        let structural = structure_reason(kind).unwrap_or(low_dim);
        let mut note = |field: &'static str, missing: bool, why: &str| {
            if missing {
                reasons.insert(field, why.to_string());
            }
        };
        note("theta", analysis.theta.is_none(), wirtinger);
        note("theta_gap", analysis.theta_gap.is_none(), wirtinger);
        note("corollary", analysis.corollary.is_none(), wirtinger);
        note("fatness_margin", analysis.fatness_margin.is_none(), structural);
        note("fatness_gap", analysis.fatness_gap.is_none(), structural);
        note("parallel_residual", analysis.parallel_residual.is_none(), structural);
        note("radial_residual", analysis.radial_residual.is_none(), structural);
        note("base_curvature", analysis.base_curvature.is_none(), low_dim);
        note(
            "inequality_min_margin",
            analysis.inequality_min_margin.is_none(),
            structural,
        );
        note("strict", analysis.strict.is_none(), structural);
        PointRecord {
            analysis,
            null_reasons: reasons,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct VerdictRecord {
    #[serde(flatten)]
    pub verdict: ConnectionVerdict,
    /// `parallel_residual < PARALLEL_TOL` at every point.
    pub parallel: Option<bool>,
    pub radially_symmetric: Option<bool>,
    pub parallel_tolerance: f64,
    pub max_shape_norm: Option<f64>,
    pub null_reasons: BTreeMap<&'static str, String>,
}

impl VerdictRecord {
    pub fn new(points: &[PointAnalysis], verdict: ConnectionVerdict) -> Self {
        let mut reasons = BTreeMap::new();
        let reason = verdict
            .structure
            .and_then(structure_reason)
            .unwrap_or("no sampled point carries this quantity");
        for (name, missing) in [
            ("fatness_margin", verdict.fatness_margin.is_none()),
            ("fat", verdict.fat.is_none()),
            ("parallel_residual", verdict.parallel_residual.is_none()),
            ("radial_residual", verdict.radial_residual.is_none()),
            ("inequality_min_margin", verdict.inequality_min_margin.is_none()),
            ("strict", verdict.strict.is_none()),
            ("max_theta", verdict.max_theta.is_none()),
            ("corollary", verdict.corollary.is_none()),
        ] {
            if missing {
                reasons.insert(name, reason.to_string());
            }
        }
        VerdictRecord {
            parallel: verdict.parallel_residual.map(|r| r < PARALLEL_TOL),
            radially_symmetric: verdict.radial_residual.map(|r| r < PARALLEL_TOL),
            parallel_tolerance: PARALLEL_TOL,
            max_shape_norm: points.iter().map(|p| p.shape_norm).reduce(f64::max),
            verdict,
            null_reasons: reasons,
        }
    }
}

/// One formula-versus-oracle evaluation.
#[derive(Clone, Debug, Serialize)]
pub struct Comparison {
    pub suite: &'static str,
    pub u: Vec<f64>,
    pub detail: String,
    pub formula: f64,
    pub oracle: f64,
    pub abs_err: f64,
    pub rel_err: f64,
    pub tolerance: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct Assertion {
    pub name: String,
    pub expected: Value,
    pub observed: Value,
    pub tolerance: Option<f64>,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct Skipped {
    pub suite: &'static str,
    pub reason: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct SweepRow {
    pub param: String,
    pub value: f64,
    pub points: usize,
    pub fatness_margin: Option<f64>,
    pub parallel_residual: Option<f64>,
    pub radial_residual: Option<f64>,
    pub inequality_min_margin: Option<f64>,
    pub max_theta: Option<f64>,
    pub max_shape_norm: Option<f64>,
    pub base_curvature_mean: Option<f64>,
    /// `base_curvature_mean` over that of the first row.
    pub base_curvature_ratio: Option<f64>,
    pub corollary_satisfied_points: usize,
}

#[derive(Debug, Default, Serialize)]
pub struct Timing {
    pub total_seconds: f64,
    pub evaluation_seconds: f64,
}

#[derive(Debug, Serialize)]
pub struct Report {
    pub schema_version: u32,
    pub tool: Tool,
    pub config: RunConfig,
    pub chart: Option<ChartInfo>,
    pub points: Vec<PointRecord>,
    pub verdict: Option<VerdictRecord>,
    pub comparisons: Vec<Comparison>,
    pub skipped: Vec<Skipped>,
    pub sweep: Vec<SweepRow>,
    pub assertions: Vec<Assertion>,
    pub passed: bool,
    pub timing: Timing,
}

impl Report {
    pub fn new(config: RunConfig) -> Self {
        Report {
            schema_version: SCHEMA_VERSION,
            tool: Tool {
                name: env!("CARGO_PKG_NAME"),
                version: env!("CARGO_PKG_VERSION"),
            },
            config,
            chart: None,
            points: Vec::new(),
            verdict: None,
            comparisons: Vec::new(),
            skipped: Vec::new(),
            sweep: Vec::new(),
            assertions: Vec::new(),
            passed: true,
            timing: Timing::default(),
        }
    }

    pub fn finish(&mut self) {
        self.passed = self.assertions.iter().all(|a| a.pass);
    }

    pub fn write_json(&self, out: &mut dyn Write) -> Result<()> {
        serde_json::to_writer_pretty(&mut *out, self)?;
        writeln!(out)?;
        Ok(())
    }

    /// The command's main table: sweep rows, comparisons, or points.
    pub fn write_csv(&self, out: &mut dyn Write) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        if !self.sweep.is_empty() {
            for row in &self.sweep {
                w.serialize(row)?;
            }
        } else if !self.comparisons.is_empty() {
            w.write_record([
                "suite",
                "u",
                "detail",
                "formula",
                "oracle",
                "abs_err",
                "rel_err",
                "tolerance",
                "pass",
            ])?;
            for c in &self.comparisons {
                w.write_record([
                    c.suite.to_string(),
                    join(&c.u),
                    c.detail.clone(),
                    c.formula.to_string(),
                    c.oracle.to_string(),
                    c.abs_err.to_string(),
                    c.rel_err.to_string(),
                    c.tolerance.to_string(),
                    c.pass.to_string(),
                ])?;
            }
        } else {
            write_points_csv(&mut w, &self.points)?;
        }
        w.flush()?;
        Ok(())
    }
}

fn join(u: &[f64]) -> String {
    u.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(";")
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn write_points_csv<W: Write>(w: &mut csv::Writer<W>, points: &[PointRecord]) -> Result<()> {
    let dim = points.first().map_or(0, |p| p.analysis.u.len());
    let mut header: Vec<String> = (0..dim).map(|i| format!("u{i}")).collect();
    header.extend(
        [
            "structure",
            "metric_scale",
            "min_gram_eigenvalue",
            "ii_symmetry_residual",
            "ii_normality_residual",
            "shape_norm",
            "theta",
            "fatness_margin",
            "parallel_residual",
            "radial_residual",
            "base_curvature",
            "inequality_min_margin",
            "strict",
            "corollary_lhs",
            "corollary_rhs",
            "corollary_satisfied",
        ]
        .map(String::from),
    );
    w.write_record(&header)?;
    for p in points {
        let a = &p.analysis;
        let mut row: Vec<String> = a.u.iter().map(|x| x.to_string()).collect();
        row.extend([
            serde_json::to_value(a.structure)?
                .as_str()
                .unwrap_or_default()
                .to_string(),
            a.metric_scale.to_string(),
            a.min_gram_eigenvalue.to_string(),
            a.ii_symmetry_residual.to_string(),
            a.ii_normality_residual.to_string(),
            a.shape_norm.to_string(),
            opt(a.theta),
            opt(a.fatness_margin),
            opt(a.parallel_residual),
            opt(a.radial_residual),
            opt(a.base_curvature),
            opt(a.inequality_min_margin),
            opt(a.strict),
            opt(a.corollary.map(|c| c.lhs)),
            opt(a.corollary.map(|c| c.rhs)),
            opt(a.corollary.map(|c| c.satisfied)),
        ]);
        w.write_record(&row)?;
    }
    Ok(())
}
