use std::collections::BTreeMap;
use std::path::PathBuf;

use anyhow::{anyhow, bail, Context, Result};
use serde::Serialize;

use pullback_core::catalog::{self, CatalogChart};
use pullback_core::connection::AnalysisOptions;
use pullback_core::homogeneous::curvature_normalization;
use pullback_core::immersion::ImmersionChart;
use pullback_core::tolerances::Tolerances;
use pullback_core::Field;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Analyze,
    Verify,
    Sweep,
}

/// How sample points are placed in the (inset) chart box.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Sampling {
    /// Tensor grid, endpoints included.
    Grid { dims: Vec<usize> },
    /// Uniform with a seeded generator.
    Random { count: usize, seed: u64 },
    /// Halton sequence in the primes 2, 3, 5, ...
    Halton { count: usize },
}

/// A parameter varied by `sweep`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Vary {
    pub param: String,
    pub values: Vec<f64>,
}

/// Everything a run depends on; echoed verbatim into the report.
#[derive(Clone, Debug, Serialize)]
pub struct RunConfig {
    pub command: Command,
    pub example: String,
    pub field: Field,
    pub params: BTreeMap<String, f64>,
    pub sampling: Sampling,
    /// Fraction of each box side kept clear of the boundary.
    pub margin: f64,
    pub tolerances: Tolerances,
    pub normalize: bool,
    pub workers: usize,
    pub format: Format,
    pub out: Option<PathBuf>,
    pub vary: Option<Vary>,
}

pub fn parse_field(s: &str) -> Result<Field, String> {
    match s.to_ascii_lowercase().as_str() {
        "r" | "real" => Ok(Field::Real),
        "c" | "complex" => Ok(Field::Complex),
        "h" | "quaternion" => Ok(Field::Quaternion),
        _ => Err(format!("unknown field `{s}` (expected r, c or h)")),
    }
}

pub fn parse_param(s: &str) -> Result<(String, f64), String> {
    let (k, v) = s
        .split_once('=')
        .ok_or_else(|| format!("expected key=value, got `{s}`"))?;
    let v: f64 = v
        .trim()
        .parse()
        .map_err(|_| format!("parameter `{k}` has non-numeric value `{v}`"))?;
    Ok((k.trim().to_string(), v))
}

/// Grid extents along each axis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GridDims(pub Vec<usize>);

/// `10x10`, `10×10` or a single `n` (meaning `n` along every axis).
pub fn parse_grid(s: &str) -> Result<GridDims, String> {
    let dims: Result<Vec<usize>, _> = s.split(['x', 'X', '×']).map(|p| p.trim().parse::<usize>()).collect();
    match dims {
        Ok(d) if !d.is_empty() && d.iter().all(|&n| n > 0) => Ok(GridDims(d)),
        _ => Err(format!("invalid grid `{s}` (expected e.g. 10x10)")),
    }
}

/// `name=v1,v2,...` or `name=start:stop:count`.
pub fn parse_vary(s: &str) -> Result<Vary, String> {
    let (name, rest) = s
        .split_once('=')
        .ok_or_else(|| format!("expected name=values, got `{s}`"))?;
    let rest = rest.trim();
    let values = if rest.is_empty() {
        Vec::new()
    } else if rest.contains(':') {
        let parts: Vec<&str> = rest.split(':').collect();
        if parts.len() != 3 {
            return Err(format!("range must be start:stop:count, got `{rest}`"));
        }
        let start: f64 = parts[0]
            .parse()
            .map_err(|_| format!("bad range start `{}`", parts[0]))?;
        let stop: f64 = parts[1].parse().map_err(|_| format!("bad range stop `{}`", parts[1]))?;
        let count: usize = parts[2]
            .parse()
            .map_err(|_| format!("bad range count `{}`", parts[2]))?;
        match count {
            0 => Vec::new(),
            1 => vec![start],
            _ => (0..count)
                .map(|i| start + (stop - start) * i as f64 / (count - 1) as f64)
                .collect(),
        }
    } else {
        rest.split(',')
            .map(|v| v.trim().parse::<f64>().map_err(|_| format!("bad value `{v}`")))
            .collect::<Result<_, _>>()?
    };
    Ok(Vary {
        param: name.trim().to_string(),
        values,
    })
}

impl RunConfig {
    pub fn build_chart(&self) -> Result<CatalogChart> {
        self.build_chart_with(&self.params)
    }

    pub fn build_chart_with(&self, params: &BTreeMap<String, f64>) -> Result<CatalogChart> {
        let entry = catalog::lookup(&self.example)?;
        Ok(entry.build(Some(self.field), params)?)
    }

    pub fn options(&self, chart: &ImmersionChart) -> Result<AnalysisOptions> {
        let normalization = if self.normalize {
            Some(
                curvature_normalization(chart.field(), chart.ambient_dim(), chart.k())
                    .context("curvature normalization")?,
            )
        } else {
            None
        };
        Ok(AnalysisOptions {
            tol: self.tolerances,
            normalization,
            ..Default::default()
        })
    }

    pub fn points(&self, chart: &ImmersionChart) -> Result<Vec<Vec<f64>>> {
        sample_points(&self.sampling, chart.domain(), self.margin)
    }
}

/// Default sampling: a grid for 2-dimensional charts, Halton otherwise.
pub fn default_sampling(dim: usize, per_axis: usize, count: usize) -> Sampling {
    if dim == 2 {
        Sampling::Grid {
            dims: vec![per_axis, per_axis],
        }
    } else {
        Sampling::Halton { count }
    }
}

const PRIMES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

fn radical_inverse(mut i: u64, base: u64) -> f64 {
    let (mut f, mut r) = (1.0, 0.0);
    while i > 0 {
        f /= base as f64;
        r += f * (i % base) as f64;
        i /= base;
    }
    r
}

pub fn sample_points(sampling: &Sampling, domain: &[(f64, f64)], margin: f64) -> Result<Vec<Vec<f64>>> {
    if !(0.0..0.5).contains(&margin) {
        bail!("margin must lie in [0, 0.5), got {margin}");
    }
    let inset: Vec<(f64, f64)> = domain
        .iter()
        .map(|(lo, hi)| (lo + margin * (hi - lo), hi - margin * (hi - lo)))
        .collect();
    let dim = domain.len();
    let at = |unit: &[f64]| -> Vec<f64> { inset.iter().zip(unit).map(|((lo, hi), t)| lo + t * (hi - lo)).collect() };
    match sampling {
        Sampling::Grid { dims } => {
            let dims = if dims.len() == 1 {
                vec![dims[0]; dim]
            } else {
                dims.clone()
            };
            if dims.len() != dim {
                bail!("grid has {} axes but the chart is {dim}-dimensional", dims.len());
            }
            let total: usize = dims.iter().product();
            let mut out = Vec::with_capacity(total);
            for mut idx in 0..total {
                let mut unit = vec![0.0; dim];
                for (a, &n) in dims.iter().enumerate() {
                    let i = idx % n;
                    idx /= n;
                    unit[a] = if n == 1 { 0.5 } else { i as f64 / (n - 1) as f64 };
                }
                out.push(at(&unit));
            }
            Ok(out)
        }
        Sampling::Random { count, seed } => {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(*seed);
            Ok((0..*count)
                .map(|_| at(&(0..dim).map(|_| rng.gen::<f64>()).collect::<Vec<_>>()))
                .collect())
        }
        Sampling::Halton { count } => {
            if dim > PRIMES.len() {
                return Err(anyhow!("Halton sampling supports at most {} dimensions", PRIMES.len()));
            }
            Ok((1..=*count as u64)
                .map(|i| at(&PRIMES[..dim].iter().map(|&p| radical_inverse(i, p)).collect::<Vec<_>>()))
                .collect())
        }
    }
}
