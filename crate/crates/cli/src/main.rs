//! Command-line front-end: sample a catalog chart, run the analysis or the
//! oracle cross-checks, and write a JSON or CSV report.
//!
//! Exit codes: 0 on success, 1 when a declared expectation or comparison
//! fails, 2 on configuration or evaluation errors.

mod analyze;
mod config;
mod report;
mod sweep;
mod verify;

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use pullback_core::catalog::{self, REGISTRY};
use pullback_core::tolerances::Tolerances;
use pullback_core::Field;

use config::{
    default_sampling, parse_field, parse_grid, parse_param, parse_vary, Command, Format, GridDims, RunConfig, Sampling,
    Vary,
};

#[derive(Parser)]
#[command(
    name = "pullback",
    version,
    about = "Fatness, parallelism and curvature inequalities of pulled-back Grassmannian connections"
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// List catalog charts with their fields and parameters.
    List(OutputArgs),
    /// Analyze sampled points of a chart.
    Analyze(RunArgs),
    /// Cross-check closed-form evaluators against the brute-force oracle.
    Verify(RunArgs),
    /// Analyze a chart for each value of one parameter.
    Sweep(SweepArgs),
}

#[derive(Args, Clone)]
struct OutputArgs {
    /// Write the report here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

#[derive(Args, Clone)]
struct RunArgs {
    /// Catalog chart name (see `list`).
    #[arg(long)]
    example: String,
    /// Scalar field: r, c or h (defaults to the chart's first field).
    #[arg(long, value_parser = parse_field)]
    field: Option<Field>,
    /// Chart parameter, repeatable.
    #[arg(long = "param", value_parser = parse_param)]
    params: Vec<(String, f64)>,
    /// Tensor grid such as 10x10.
    #[arg(long, value_parser = parse_grid, conflicts_with = "random")]
    grid: Option<GridDims>,
    /// Number of uniformly random points.
    #[arg(long)]
    random: Option<usize>,
    /// Seed for --random.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Fraction of each side of the chart box kept clear of the boundary.
    #[arg(long, default_value_t = 0.1)]
    margin: f64,
    /// First-derivative finite-difference step.
    #[arg(long)]
    fd_step: Option<f64>,
    /// Rescale the metric so the ambient maximal sectional curvature is one.
    #[arg(long)]
    normalize: bool,
    /// Worker threads (default: available parallelism).
    #[arg(long)]
    workers: Option<usize>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Clone)]
struct SweepArgs {
    #[command(flatten)]
    run: RunArgs,
    /// Parameter values: NAME=v1,v2,... or NAME=start:stop:count.
    #[arg(long, value_parser = parse_vary)]
    vary: Vary,
}

/// Default sample counts per command: (grid points per axis, Halton count).
fn default_counts(command: Command) -> (usize, usize) {
    match command {
        Command::Verify => (3, 8),
        _ => (10, 64),
    }
}

fn run_config(command: Command, args: &RunArgs, vary: Option<Vary>) -> Result<RunConfig> {
    let entry = catalog::lookup(&args.example)?;
    let field = args.field.unwrap_or(entry.fields[0]);
    let params: BTreeMap<String, f64> = args.params.iter().cloned().collect();
    let dim = entry.build(Some(field), &params)?.chart.domain_dim();
    let sampling = match (&args.grid, args.random) {
        (Some(dims), _) => Sampling::Grid { dims: dims.0.clone() },
        (None, Some(count)) => Sampling::Random { count, seed: args.seed },
        (None, None) => {
            let (per_axis, count) = default_counts(command);
            default_sampling(dim, per_axis, count)
        }
    };
    anyhow::ensure!(
        (0.0..0.5).contains(&args.margin),
        "--margin must lie in [0, 0.5), got {}",
        args.margin
    );
    let mut tolerances = Tolerances::default();
    if let Some(h) = args.fd_step {
        anyhow::ensure!(h > 0.0 && h.is_finite(), "--fd-step must be positive, got {h}");
        tolerances.fd_step = h;
    }
    let workers = match args.workers {
        Some(0) => anyhow::bail!("--workers must be positive"),
        Some(n) => n,
        None => std::thread::available_parallelism().map_or(1, |n| n.get()),
    };
    Ok(RunConfig {
        command,
        example: args.example.clone(),
        field,
        params,
        sampling,
        margin: args.margin,
        tolerances,
        normalize: args.normalize,
        workers,
        format: args.output.format,
        out: args.output.out.clone(),
        vary,
    })
}

fn open_output(out: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match out {
        Some(path) => Box::new(BufWriter::new(
            File::create(path).with_context(|| format!("cannot create {}", path.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout())),
    })
}

#[derive(Serialize)]
struct ListEntry {
    name: &'static str,
    summary: &'static str,
    fields: Vec<Field>,
    params: BTreeMap<&'static str, f64>,
}

fn list(args: &OutputArgs) -> Result<()> {
    let entries: Vec<ListEntry> = REGISTRY
        .iter()
        .map(|e| ListEntry {
            name: e.name,
            summary: e.summary,
            fields: e.fields.to_vec(),
            params: e.params.iter().copied().collect(),
        })
        .collect();
    let mut out = open_output(&args.out)?;
    match args.format {
        Format::Json => {
            serde_json::to_writer_pretty(&mut out, &entries)?;
            writeln!(out)?;
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(&mut out);
            w.write_record(["name", "fields", "params", "summary"])?;
            for e in &entries {
                let fields: Vec<String> = e.fields.iter().map(|f| f.to_string()).collect();
                let params: Vec<String> = e.params.iter().map(|(k, v)| format!("{k}={v}")).collect();
                w.write_record([e.name, &fields.join(" "), &params.join(" "), e.summary])?;
            }
            w.flush()?;
        }
    }
    out.flush()?;
    Ok(())
}

fn execute(cli: Cli) -> Result<bool> {
    let (config, runner): (RunConfig, fn(RunConfig, &rayon::ThreadPool) -> Result<report::Report>) = match cli.command {
        Cmd::List(args) => {
            list(&args)?;
            return Ok(true);
        }
        Cmd::Analyze(args) => (run_config(Command::Analyze, &args, None)?, analyze::run),
        Cmd::Verify(args) => (run_config(Command::Verify, &args, None)?, verify::run),
        Cmd::Sweep(args) => (
            run_config(Command::Sweep, &args.run, Some(args.vary.clone()))?,
            sweep::run,
        ),
    };
    let pool = rayon::ThreadPoolBuilder::new().num_threads(config.workers).build()?;
    let start = Instant::now();
    let (format, out) = (config.format, config.out.clone());
    let mut report = runner(config, &pool)?;
    report.finish();
    report.timing.total_seconds = start.elapsed().as_secs_f64();
    let mut sink = open_output(&out)?;
    match format {
        Format::Json => report.write_json(&mut sink)?,
        Format::Csv => report.write_csv(&mut sink)?,
    }
    sink.flush()?;
    for a in report.assertions.iter().filter(|a| !a.pass) {
        eprintln!("FAILED {}: expected {}, observed {}", a.name, a.expected, a.observed);
    }
    Ok(report.passed)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match execute(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
