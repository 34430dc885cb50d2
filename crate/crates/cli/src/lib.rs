//! Front end for `extropy-core`.
//!
//! [`run`] takes an argument list and two sinks and returns the process exit
//! status, so the binary and the tests drive exactly the same code:
//!
//! | status | meaning |
//! |---|---|
//! | 0 | success |
//! | 1 | a theorem conclusion failed under passing hypotheses |
//! | 2 | malformed flags or invalid input |
//! | 3 | a measure diverged |

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use extropy_core::measures::{closed_form, gw_design_measure, gwj};
use extropy_core::orders::{default_suite, run_theorem_suite, ReportStatus, SuiteConfig, SuiteRow};
use extropy_core::sampling::draw_design;
use extropy_core::{
    Bandwidth, Design, Distribution, EstimatorConfig, EstimatorStyle, Kernel, KernelAnchor, MeasureSpec,
    MeasureVariant, Variant, WeightFunction,
};

pub mod converge;
pub mod io_formats;

pub use converge::{convergence_study, ConvergenceRow, ConvergenceStudy};
pub use io_formats::{read_sample_csv, round_json_numbers, write_sample_csv};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VIOLATION: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_DIVERGENCE: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "extropy", version, about = "Weighted cumulative residual and past extropy")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate a measure for a distribution and design.
    Measure(MeasureArgs),
    /// Draw one sample under a design and write it as CSV.
    Simulate(SimulateArgs),
    /// Estimate a measure from a sample CSV.
    Estimate(EstimateArgs),
    /// Run the theorem suite and print the reports as JSON.
    Verify(VerifyArgs),
    /// Estimator error across a ladder of sample sizes and seeds.
    Converge(ConvergeArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MeasureKind {
    Past,
    Residual,
    /// Weighted extropy `-1/2 ∫ w f²`; single variable only.
    Gwj,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AnchorArg {
    Midpoint,
    Datum,
}

impl From<AnchorArg> for KernelAnchor {
    fn from(a: AnchorArg) -> Self {
        match a {
            AnchorArg::Midpoint => KernelAnchor::Midpoint,
            AnchorArg::Datum => KernelAnchor::Datum,
        }
    }
}

#[derive(Debug, Args)]
pub struct MeasureArgs {
    #[arg(long)]
    pub dist: String,
    #[arg(long, default_value = "power:1")]
    pub weight: String,
    #[arg(long, value_enum, default_value = "past")]
    pub variant: MeasureKind,
    #[arg(long, default_value = "single")]
    pub design: Design,
    #[arg(long, default_value_t = 1)]
    pub n: u32,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long)]
    pub dist: String,
    #[arg(long, default_value = "srs")]
    pub design: Design,
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Estimator flags shared by `estimate` and `converge`.
#[derive(Debug, Args)]
pub struct EstimatorArgs {
    #[arg(long, default_value = "past")]
    pub variant: Variant,
    /// Exponent of the weight `x^m`.
    #[arg(long, default_value_t = 1.0)]
    pub m: f64,
    #[arg(long, default_value = "step")]
    pub style: EstimatorStyle,
    #[arg(long, default_value = "gaussian")]
    pub kernel: Kernel,
    /// A positive real or `silverman`.
    #[arg(long, default_value = "silverman")]
    pub bandwidth: Bandwidth,
    #[arg(long, value_enum, default_value = "midpoint")]
    pub anchor: AnchorArg,
    /// Add the `[0, x_1]` segment to the residual estimate.
    #[arg(long)]
    pub include_head: bool,
}

impl EstimatorArgs {
    pub fn config(&self) -> anyhow::Result<EstimatorConfig> {
        let cfg = match self.style {
            EstimatorStyle::Step => EstimatorConfig::step(self.variant, self.m),
            EstimatorStyle::Kernel => EstimatorConfig::kernel(self.variant, self.m, self.kernel, self.bandwidth),
        }
        .with_anchor(self.anchor.into())
        .with_head(self.include_head);
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Debug, Args)]
pub struct EstimateArgs {
    #[command(flatten)]
    pub estimator: EstimatorArgs,
    /// Sample CSV; standard input when absent.
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Only run these theorem ids (e.g. `T2.1`); repeatable.
    #[arg(long = "theorem")]
    pub theorems: Vec<String>,
    /// Grid size for the order checks.
    #[arg(long, default_value_t = 199)]
    pub grid: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ConvergeArgs {
    #[arg(long)]
    pub dist: String,
    #[arg(long, default_value = "srs")]
    pub design: Design,
    #[command(flatten)]
    pub estimator: EstimatorArgs,
    #[arg(long, value_delimiter = ',', default_value = "100,1000,10000")]
    pub sizes: Vec<usize>,
    /// Number of seeds per sample size.
    #[arg(long, default_value_t = 50)]
    pub seeds: u64,
    /// Base seed the per-cell seeds are derived from.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

enum Outcome {
    Done,
    Violated,
}

/// Parses `args` (program name first) and runs the subcommand.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let status = if e.use_stderr() {
                let _ = write!(stderr, "{}", e.render());
                EXIT_USAGE
            } else {
                let _ = write!(stdout, "{}", e.render());
                EXIT_OK
            };
            return status;
        }
    };
    match execute(cli.command, stdout) {
        Ok(Outcome::Done) => EXIT_OK,
        Ok(Outcome::Violated) => {
            let _ = writeln!(stderr, "error: at least one theorem conclusion failed");
            EXIT_VIOLATION
        }
        Err(e) => {
            let _ = writeln!(stderr, "error: {e:#}");
            exit_status(&e)
        }
    }
}

/// Exit status for a failed command.
pub fn exit_status(e: &anyhow::Error) -> i32 {
    let diverged = e
        .chain()
        .filter_map(|c| c.downcast_ref::<extropy_core::Error>())
        .any(|c| c.is_divergence());
    if diverged {
        EXIT_DIVERGENCE
    } else {
        EXIT_USAGE
    }
}

fn execute(command: Command, stdout: &mut dyn Write) -> anyhow::Result<Outcome> {
    match command {
        Command::Measure(a) => measure(&a, stdout).map(|_| Outcome::Done),
        Command::Simulate(a) => simulate(&a, stdout).map(|_| Outcome::Done),
        Command::Estimate(a) => estimate(&a, stdout).map(|_| Outcome::Done),
        Command::Verify(a) => verify(&a, stdout),
        Command::Converge(a) => converge(&a, stdout).map(|_| Outcome::Done),
    }
}

fn parse_dist(s: &str) -> anyhow::Result<Distribution> {
    s.parse::<Distribution>().with_context(|| format!("--dist {s:?}"))
}

fn parse_weight(s: &str) -> anyhow::Result<WeightFunction> {
    s.parse::<WeightFunction>().with_context(|| format!("--weight {s:?}"))
}

/// Runs `body` against `--out` when given, otherwise against stdout.
fn with_sink(
    out: Option<&Path>,
    stdout: &mut dyn Write,
    body: impl FnOnce(&mut dyn Write) -> anyhow::Result<()>,
) -> anyhow::Result<()> {
    match out {
        Some(path) => {
            let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
            let mut w = BufWriter::new(file);
            body(&mut w)?;
            w.flush()?;
        }
        None => {
            body(stdout)?;
            stdout.flush()?;
        }
    }
    Ok(())
}

fn emit_json<T: Serialize>(value: &T, out: Option<&Path>, stdout: &mut dyn Write) -> anyhow::Result<()> {
    let mut v = serde_json::to_value(value)?;
    round_json_numbers(&mut v);
    with_sink(out, stdout, |w| {
        serde_json::to_writer_pretty(&mut *w, &v)?;
        writeln!(w)?;
        Ok(())
    })
}

#[derive(Serialize)]
struct MeasureOutput {
    value: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    closed_form: Option<f64>,
    quadrature_error: f64,
}

fn measure(a: &MeasureArgs, stdout: &mut dyn Write) -> anyhow::Result<()> {
    let d = parse_dist(&a.dist)?;
    let w = parse_weight(&a.weight)?;
    let out = match a.variant {
        MeasureKind::Gwj => {
            if a.design != Design::Single || a.n != 1 {
                bail!("--variant gwj is defined for --design single --n 1 only");
            }
            let v = gwj(&d, &w)?;
            MeasureOutput {
                value: v.value,
                closed_form: None,
                quadrature_error: v.abs_error_estimate,
            }
        }
        kind => {
            let variant = if kind == MeasureKind::Past {
                MeasureVariant::Past
            } else {
                MeasureVariant::Residual
            };
            let spec = MeasureSpec::new(variant, a.design, a.n)?;
            let v = gw_design_measure(&d, &w, &spec)?;
            MeasureOutput {
                value: v.value,
                closed_form: closed_form(&d, &w, &spec),
                quadrature_error: v.abs_error_estimate,
            }
        }
    };
    emit_json(&out, a.out.as_deref(), stdout)
}

fn simulate(a: &SimulateArgs, stdout: &mut dyn Write) -> anyhow::Result<()> {
    let d = parse_dist(&a.dist)?;
    let sample = draw_design(&d, a.design, a.n, a.seed)?;
    with_sink(a.out.as_deref(), stdout, |w| write_sample_csv(sample.raw_order(), w))
}

#[derive(Serialize)]
struct EstimateOutput<'a> {
    value: f64,
    config: &'a EstimatorConfig,
}

fn estimate(a: &EstimateArgs, stdout: &mut dyn Write) -> anyhow::Result<()> {
    let cfg = a.estimator.config()?;
    let sample = match &a.input {
        Some(path) => {
            let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
            read_sample_csv(file).with_context(|| format!("reading {}", path.display()))?
        }
        None => read_sample_csv(io::stdin().lock()).context("reading standard input")?,
    };
    let value = extropy_core::estimators::estimate(&sample, &cfg)?;
    emit_json(&EstimateOutput { value, config: &cfg }, a.out.as_deref(), stdout)
}

fn verify(a: &VerifyArgs, stdout: &mut dyn Write) -> anyhow::Result<Outcome> {
    let mut rows = default_suite()?;
    if !a.theorems.is_empty() {
        rows.retain(|row| a.theorems.iter().any(|t| t == row_theorem(row).as_str()));
        if rows.is_empty() {
            bail!("no suite rows match --theorem {:?}", a.theorems);
        }
    }
    let cfg = SuiteConfig {
        grid_points: a.grid,
        ..SuiteConfig::default()
    };
    let reports = run_theorem_suite(&rows, &cfg)?;
    emit_json(&reports, a.out.as_deref(), stdout)?;
    if reports.iter().any(|r| r.status == ReportStatus::Violated) {
        Ok(Outcome::Violated)
    } else {
        Ok(Outcome::Done)
    }
}

fn row_theorem(row: &SuiteRow) -> extropy_core::orders::TheoremId {
    match row {
        SuiteRow::Comparison(id, _)
        | SuiteRow::Transform(id, _)
        | SuiteRow::Dominance(id, ..)
        | SuiteRow::Monotone(id, ..) => *id,
    }
}

fn converge(a: &ConvergeArgs, stdout: &mut dyn Write) -> anyhow::Result<()> {
    let study = ConvergenceStudy {
        dist: parse_dist(&a.dist)?,
        design: a.design,
        config: a.estimator.config()?,
        sizes: a.sizes.clone(),
        seeds: a.seeds,
        base_seed: a.seed,
    };
    let rows = convergence_study(&study)?;
    with_sink(a.out.as_deref(), stdout, |w| converge::write_rows(&rows, w))
}
