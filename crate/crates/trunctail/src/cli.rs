//! Command-line surface: estimate from observed pairs, generate synthetic
//! samples, select thresholds and run Monte Carlo tables.
//!
//! Exit codes: 0 on success, 2 on input or validation errors (malformed
//! CSV, bad flags), 3 on numeric or degenerate failures (empty generated
//! sample, vanishing denominators). Output is deterministic given the flags
//! and seed; the worker count never changes the bytes printed.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::empirical::SortedSample;
use crate::error::Error;
use crate::estimators::{
    asymptotic_sigma2, confidence_interval_with_count, hill_estimator, hill_path, lb_tail_index,
    ratio_tail_index, woodroofe_tail_index, worms_fixed_threshold, EstimatorKind, TailEstimate,
};
use crate::models::{BurrModel, TruncatedSample, TruncationScheme};
use crate::select::{path_for, reiss_thomas_select, select_k_for};
use crate::simulate::{run_experiment_with_workers, ExperimentConfig, TableFormat};

pub const EXIT_OK: i32 = 0;
/// Input or validation problem (malformed file, bad flag combination).
pub const EXIT_INPUT: i32 = 2;
/// Numeric or degenerate failure during estimation or generation.
pub const EXIT_NUMERIC: i32 = 3;

/// Fallback seed environment variable used by `sample` and `simulate` when
/// `--seed` is absent.
pub const SEED_ENV: &str = "TRUNCTAIL_SEED";
const DEFAULT_SEED: u64 = 42;

#[derive(Debug, Parser)]
#[command(
    name = "trunctail",
    version,
    about = "Tail-index estimation for randomly right-truncated heavy-tailed data"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Estimate the tail index from a CSV file of observed (x, y) pairs
    Estimate(EstimateArgs),
    /// Run a Monte Carlo experiment and print the summary table
    Simulate(SimulateArgs),
    /// Generate a synthetic right-truncated sample as CSV on stdout
    Sample(SampleArgs),
    /// Pick the number of upper order statistics for a data file
    SelectK(SelectKArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EstimatorArg {
    Lb,
    W,
    Hill,
    Ratio,
    WormsFixed,
}

impl From<EstimatorArg> for EstimatorKind {
    fn from(a: EstimatorArg) -> Self {
        match a {
            EstimatorArg::Lb => EstimatorKind::LyndenBell,
            EstimatorArg::W => EstimatorKind::Woodroofe,
            EstimatorArg::Hill => EstimatorKind::Hill,
            EstimatorArg::Ratio => EstimatorKind::Ratio,
            EstimatorArg::WormsFixed => EstimatorKind::WormsFixed,
        }
    }
}

impl std::fmt::Display for EstimatorArg {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(EstimatorKind::from(*self).as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PathEstimatorArg {
    Lb,
    W,
    Hill,
}

impl From<PathEstimatorArg> for EstimatorKind {
    fn from(a: PathEstimatorArg) -> Self {
        match a {
            PathEstimatorArg::Lb => EstimatorKind::LyndenBell,
            PathEstimatorArg::W => EstimatorKind::Woodroofe,
            PathEstimatorArg::Hill => EstimatorKind::Hill,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ReportFormat {
    Text,
    Csv,
    JsonLines,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TableFormatArg {
    Csv,
    Md,
}

#[derive(Debug, Args)]
pub struct EstimateArgs {
    /// CSV file with header `x,y`, one observed pair per line
    pub file: PathBuf,
    #[arg(long, value_enum, default_value_t = EstimatorArg::Lb)]
    pub estimator: EstimatorArg,
    /// `auto` (threshold selection) or an explicit integer
    #[arg(long, default_value = "auto")]
    pub k: String,
    /// Fixed threshold, for `--estimator worms-fixed` only
    #[arg(long)]
    pub threshold: Option<f64>,
    /// Weight exponent of the selection criterion, in [0, 1/2]
    #[arg(long, default_value_t = 0.3)]
    pub theta: f64,
    /// Confidence level for the interval, in (0.5, 1)
    #[arg(long, default_value_t = 0.95)]
    pub level: f64,
    #[arg(long, value_enum, default_value_t = ReportFormat::Text)]
    pub format: ReportFormat,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long, required_unless_present = "config")]
    pub gamma1: Option<f64>,
    #[arg(long, required_unless_present = "config")]
    pub p: Option<f64>,
    #[arg(long, default_value_t = 0.25)]
    pub delta: f64,
    /// Comma-separated latent sample sizes
    #[arg(long, value_delimiter = ',', required_unless_present = "config")]
    pub sizes: Vec<usize>,
    #[arg(long, default_value_t = 1000)]
    pub reps: usize,
    /// Master seed; falls back to TRUNCTAIL_SEED, then 42
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, value_delimiter = ',', default_values_t = [EstimatorArg::Lb, EstimatorArg::W])]
    pub estimators: Vec<EstimatorArg>,
    #[arg(long, default_value_t = 0.3)]
    pub theta: f64,
    #[arg(long, value_enum, default_value_t = TableFormatArg::Csv)]
    pub format: TableFormatArg,
    /// Worker threads (0 = all cores); the output does not depend on it
    #[arg(long, default_value_t = 0)]
    pub workers: usize,
    /// Load the experiment from a key=value file instead of flags
    #[arg(long, conflicts_with_all = ["gamma1", "p", "delta", "sizes", "reps", "seed", "estimators", "theta"])]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SampleArgs {
    #[arg(long)]
    pub gamma1: f64,
    /// Observed fraction in (0, 1); solves the truncation index from it
    #[arg(long, conflicts_with = "gamma2", required_unless_present = "gamma2")]
    pub p: Option<f64>,
    /// Tail index of the truncation variable, as an alternative to --p
    #[arg(long)]
    pub gamma2: Option<f64>,
    #[arg(long, default_value_t = 0.25)]
    pub delta: f64,
    /// Latent sample size
    #[arg(long = "N")]
    pub n_latent: usize,
    /// Seed; falls back to TRUNCTAIL_SEED, then 42
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Args)]
pub struct SelectKArgs {
    /// CSV file with header `x,y`, one observed pair per line
    pub file: PathBuf,
    #[arg(long, value_enum, default_value_t = PathEstimatorArg::Lb)]
    pub estimator: PathEstimatorArg,
    #[arg(long, default_value_t = 0.3)]
    pub theta: f64,
    /// Also print the full (k, estimate, criterion) path as CSV
    #[arg(long)]
    pub path: bool,
}

/// Command failures, classified by exit code.
#[derive(Debug)]
pub enum CliError {
    /// Exit 2: bad input data or flag combination.
    Input(String),
    /// Exit 3: numeric or degenerate failure.
    Numeric(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => EXIT_INPUT,
            CliError::Numeric(_) => EXIT_NUMERIC,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::Input(m) | CliError::Numeric(m) => m,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidParameter { .. }
            | Error::KOutOfRange { .. }
            | Error::NonPositive { .. }
            | Error::EmptyPath
            | Error::MissingK => CliError::Input(e.to_string()),
            Error::EmptySample
            | Error::TooFewExceedances { .. }
            | Error::DegenerateDenominator
            | Error::RatioInconsistent { .. }
            | Error::VarianceUndefined { .. }
            | Error::AllDegenerate
            | Error::AllReplicationsFailed { .. } => CliError::Numeric(e.to_string()),
        }
    }
}

type CmdResult<T> = std::result::Result<T, CliError>;

/// Execute a parsed command, writing the report to `out`. Returns the
/// process exit code; error messages go to `err`.
pub fn run<W: Write, E: Write>(cli: Cli, out: &mut W, err: &mut E) -> i32 {
    let outcome = match cli.command {
        Command::Estimate(args) => cmd_estimate(&args, out),
        Command::Simulate(args) => cmd_simulate(&args, out),
        Command::Sample(args) => cmd_sample(&args, out),
        Command::SelectK(args) => cmd_select_k(&args, out),
    };
    match outcome {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(err, "error: {}", e.message());
            e.exit_code()
        }
    }
}

// ---------------------------------------------------------------------------
// pair data files
// ---------------------------------------------------------------------------

/// Parse the `x,y` pair format with line-numbered diagnostics: a header
/// line, then two positive finite decimals per line with `x <= y`.
pub fn parse_pairs(text: &str) -> CmdResult<TruncatedSample> {
    let mut lines = text.lines().enumerate();
    let header = loop {
        match lines.next() {
            Some((no, line)) => {
                if line.trim().is_empty() {
                    continue;
                }
                break (no, line);
            }
            None => return Err(CliError::Input("empty file: expected `x,y` header".into())),
        }
    };
    if header.1.trim() != "x,y" {
        return Err(CliError::Input(format!(
            "line {}: expected header `x,y`, got `{}`",
            header.0 + 1,
            header.1.trim()
        )));
    }
    let mut pairs = Vec::new();
    for (no, line) in lines {
        let line_no = no + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        let mut fields = trimmed.split(',');
        let (a, b) = match (fields.next(), fields.next(), fields.next()) {
            (Some(a), Some(b), None) => (a.trim(), b.trim()),
            _ => {
                return Err(CliError::Input(format!(
                    "line {line_no}: expected two comma-separated values"
                )))
            }
        };
        let parse = |tok: &str, name: &str| -> CmdResult<f64> {
            let v: f64 = tok.parse().map_err(|_| {
                CliError::Input(format!("line {line_no}: cannot parse {name} `{tok}`"))
            })?;
            if !v.is_finite() {
                return Err(CliError::Input(format!(
                    "line {line_no}: {name} must be finite, got `{tok}`"
                )));
            }
            if v <= 0.0 {
                return Err(CliError::Input(format!(
                    "line {line_no}: {name} must be positive, got `{tok}`"
                )));
            }
            Ok(v)
        };
        let x = parse(a, "x")?;
        let y = parse(b, "y")?;
        if x > y {
            return Err(CliError::Input(format!(
                "line {line_no}: x = {x} exceeds y = {y}"
            )));
        }
        pairs.push((x, y));
    }
    if pairs.is_empty() {
        return Err(CliError::Input("no data rows after the header".into()));
    }
    Ok(TruncatedSample::new(pairs).expect("rows were validated"))
}

pub fn read_pairs(path: &Path) -> CmdResult<TruncatedSample> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
    parse_pairs(&text)
}

/// Render a sample in the pair format, full precision (values re-ingest
/// bit-exactly).
pub fn format_pairs(sample: &TruncatedSample) -> String {
    let mut out = String::from("x,y\n");
    for &(x, y) in sample.pairs() {
        out.push_str(&format!("{x},{y}\n"));
    }
    out
}

fn resolve_seed(flag: Option<u64>) -> CmdResult<u64> {
    if let Some(s) = flag {
        return Ok(s);
    }
    match std::env::var(SEED_ENV) {
        Ok(text) => text
            .parse()
            .map_err(|_| CliError::Input(format!("cannot parse {SEED_ENV}=`{text}` as a seed"))),
        Err(_) => Ok(DEFAULT_SEED),
    }
}

// ---------------------------------------------------------------------------
// estimate
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy)]
enum KChoice {
    Auto,
    Fixed(usize),
}

fn parse_k(text: &str) -> CmdResult<KChoice> {
    if text == "auto" {
        return Ok(KChoice::Auto);
    }
    text.parse()
        .map(KChoice::Fixed)
        .map_err(|_| CliError::Input(format!("--k expects `auto` or an integer, got `{text}`")))
}

#[derive(Debug, Serialize)]
struct EstimateReport {
    estimator: String,
    n: usize,
    k: Option<usize>,
    k_selection: Option<String>,
    exceedances: Option<usize>,
    threshold: f64,
    gamma1_hat: f64,
    zero_lb_factors: usize,
    gamma2_hat: Option<f64>,
    gamma2_k: Option<usize>,
    sigma2: Option<f64>,
    ci_lower: Option<f64>,
    ci_upper: Option<f64>,
    level: Option<f64>,
    warnings: Vec<String>,
}

fn cmd_estimate<W: Write>(args: &EstimateArgs, out: &mut W) -> CmdResult<()> {
    let sample = read_pairs(&args.file)?;
    if sample.n() < 3 {
        return Err(CliError::Input(format!(
            "estimation needs at least 3 pairs, got {}",
            sample.n()
        )));
    }
    // automatic selection needs a usable estimate path; explicit --k (or a
    // fixed threshold) works on smaller files
    if matches!(parse_k(&args.k)?, KChoice::Auto)
        && args.estimator != EstimatorArg::WormsFixed
        && sample.n() < 5
    {
        return Err(CliError::Input(format!(
            "automatic k selection needs at least 5 pairs, got {}; pass an explicit --k",
            sample.n()
        )));
    }
    if !(0.0..=0.5).contains(&args.theta) {
        return Err(CliError::Input(format!(
            "--theta must lie in [0, 1/2], got {}",
            args.theta
        )));
    }
    let kind: EstimatorKind = args.estimator.into();
    let k_choice = parse_k(&args.k)?;
    if args.threshold.is_some() && kind != EstimatorKind::WormsFixed {
        return Err(CliError::Input(
            "--threshold applies only to --estimator worms-fixed".into(),
        ));
    }

    let sorted = SortedSample::new(&sample);
    let n = sorted.n();
    let mut warnings = Vec::new();
    let mut k_selection = None;
    let mut exceedances = None;

    let est: TailEstimate = match kind {
        EstimatorKind::LyndenBell | EstimatorKind::Woodroofe => {
            let k = match k_choice {
                KChoice::Auto => {
                    let sel = select_k_for(&sorted, kind, args.theta)?;
                    k_selection = Some(format!("reiss-thomas(theta={})", args.theta));
                    sel.k_star
                }
                KChoice::Fixed(k) => k,
            };
            match kind {
                EstimatorKind::LyndenBell => lb_tail_index(&sorted, k)?,
                _ => woodroofe_tail_index(&sorted, k)?,
            }
        }
        EstimatorKind::Hill => {
            let k = match k_choice {
                KChoice::Auto => {
                    let sel = select_k_for(&sorted, kind, args.theta)?;
                    k_selection = Some(format!("reiss-thomas(theta={})", args.theta));
                    sel.k_star
                }
                KChoice::Fixed(k) => k,
            };
            let gamma1 = hill_estimator(sorted.x_order(), k)?;
            TailEstimate {
                gamma1,
                estimator: EstimatorKind::Hill,
                k: Some(k),
                threshold: sorted.x_order()[n - k - 1],
                zero_lb_factors: 0,
                ci: None,
            }
        }
        EstimatorKind::Ratio => {
            let run_ratio = |k_x, k_y| ratio_tail_index(&sample, k_x, k_y);
            let (k_x, k_y) = match k_choice {
                KChoice::Auto => {
                    let x_path = hill_path(&sample.xs())?;
                    let y_path = hill_path(&sample.ys())?;
                    let kx =
                        reiss_thomas_select(x_path.estimates(), x_path.k_min(), args.theta)?.k_star;
                    let ky =
                        reiss_thomas_select(y_path.estimates(), y_path.k_min(), args.theta)?.k_star;
                    k_selection = Some(format!("reiss-thomas(theta={})", args.theta));
                    (kx, ky)
                }
                KChoice::Fixed(k) => (k, k),
            };
            run_ratio(k_x, k_y)?
        }
        EstimatorKind::WormsFixed => {
            if let KChoice::Fixed(_) = k_choice {
                return Err(CliError::Input(
                    "--k does not apply to worms-fixed; use --threshold".into(),
                ));
            }
            let t = args.threshold.ok_or_else(|| {
                CliError::Input("--estimator worms-fixed requires --threshold".into())
            })?;
            let est = worms_fixed_threshold(&sorted, t)?;
            exceedances = Some(n - sorted.x_order().partition_point(|&v| v <= t));
            est
        }
    };

    if est.zero_lb_factors > 0 {
        warnings.push(format!(
            "{} Lynden-Bell factor(s) above the threshold are exactly zero; the corresponding weights vanish",
            est.zero_lb_factors
        ));
    }

    // plug-in variance: Hill estimate of the truncation index from the
    // y-sample, with its own selected k
    let gamma2 = hill_path(&sample.ys())
        .and_then(|y_path| {
            let sel = reiss_thomas_select(y_path.estimates(), y_path.k_min(), args.theta)?;
            Ok((y_path.at(sel.k_star).expect("k_star is in range"), sel.k_star))
        });

    let ci_count = est.k.or(exceedances).unwrap_or(0);
    let mut gamma2_hat = None;
    let mut gamma2_k = None;
    let (sigma2, ci) = match gamma2 {
        Ok((g2, k2)) => {
            gamma2_hat = Some(g2);
            gamma2_k = Some(k2);
            if est.gamma1 > 0.0 && est.gamma1 < g2 {
                let sigma2 = asymptotic_sigma2(est.gamma1, g2).expect("domain checked");
                match confidence_interval_with_count(est.gamma1, sigma2, args.level, ci_count) {
                    Ok(ci) => (Some(sigma2), Some(ci)),
                    Err(e) => {
                        warnings.push(format!("confidence interval unavailable: {e}"));
                        (Some(sigma2), None)
                    }
                }
            } else {
                warnings.push(format!(
                    "plug-in variance unavailable: gamma1_hat = {:.4} does not lie below gamma2_hat = {:.4}",
                    est.gamma1, g2
                ));
                (None, None)
            }
        }
        Err(e) => {
            warnings.push(format!("plug-in variance unavailable: {e}"));
            (None, None)
        }
    };

    let report = EstimateReport {
        estimator: kind.to_string(),
        n,
        k: est.k,
        k_selection,
        exceedances,
        threshold: est.threshold,
        gamma1_hat: est.gamma1,
        zero_lb_factors: est.zero_lb_factors,
        gamma2_hat,
        gamma2_k,
        sigma2,
        ci_lower: ci.map(|c| c.lower),
        ci_upper: ci.map(|c| c.upper),
        level: ci.map(|c| c.level),
        warnings,
    };
    write_estimate_report(&report, args.format, out)
        .map_err(|e| CliError::Input(format!("cannot write output: {e}")))
}

fn write_estimate_report<W: Write>(
    r: &EstimateReport,
    format: ReportFormat,
    out: &mut W,
) -> std::io::Result<()> {
    match format {
        ReportFormat::Text => {
            writeln!(out, "estimator: {}", r.estimator)?;
            writeln!(out, "n: {}", r.n)?;
            match (r.k, &r.k_selection) {
                (Some(k), Some(sel)) => writeln!(out, "k: {k} ({sel})")?,
                (Some(k), None) => writeln!(out, "k: {k} (fixed)")?,
                _ => {}
            }
            if let Some(e) = r.exceedances {
                writeln!(out, "exceedances: {e}")?;
            }
            writeln!(out, "threshold: {:.4}", r.threshold)?;
            writeln!(out, "gamma1_hat: {:.4}", r.gamma1_hat)?;
            if r.zero_lb_factors > 0 {
                writeln!(out, "zero_lb_factors: {}", r.zero_lb_factors)?;
            }
            if let (Some(g2), Some(k2)) = (r.gamma2_hat, r.gamma2_k) {
                writeln!(out, "gamma2_hat: {g2:.4} (hill on y, k = {k2})")?;
            }
            if let Some(s2) = r.sigma2 {
                writeln!(out, "sigma2: {s2:.4}")?;
            }
            if let (Some(lo), Some(hi), Some(level)) = (r.ci_lower, r.ci_upper, r.level) {
                writeln!(out, "ci_{level}: [{lo:.4}, {hi:.4}]")?;
            }
            for w in &r.warnings {
                writeln!(out, "warning: {w}")?;
            }
        }
        ReportFormat::Csv => {
            let opt_f = |v: Option<f64>| v.map(|x| format!("{x:.4}")).unwrap_or_default();
            let opt_u = |v: Option<usize>| v.map(|x| x.to_string()).unwrap_or_default();
            writeln!(
                out,
                "estimator,n,k,threshold,gamma1_hat,gamma2_hat,sigma2,ci_lower,ci_upper,level,zero_lb_factors"
            )?;
            writeln!(
                out,
                "{},{},{},{:.4},{:.4},{},{},{},{},{},{}",
                r.estimator,
                r.n,
                opt_u(r.k),
                r.threshold,
                r.gamma1_hat,
                opt_f(r.gamma2_hat),
                opt_f(r.sigma2),
                opt_f(r.ci_lower),
                opt_f(r.ci_upper),
                r.level.map(|l| l.to_string()).unwrap_or_default(),
                r.zero_lb_factors
            )?;
        }
        ReportFormat::JsonLines => {
            let line = serde_json::to_string(r).expect("report serializes");
            writeln!(out, "{line}")?;
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------

fn cmd_simulate<W: Write>(args: &SimulateArgs, out: &mut W) -> CmdResult<()> {
    let config = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
            ExperimentConfig::from_kv(&text).map_err(CliError::from)?
        }
        None => ExperimentConfig {
            gamma1: args.gamma1.expect("required by clap"),
            p: args.p.expect("required by clap"),
            delta: args.delta,
            sizes: args.sizes.clone(),
            replications: args.reps,
            seed: resolve_seed(args.seed)?,
            estimators: args.estimators.iter().map(|&e| e.into()).collect(),
            theta: args.theta,
        },
    };
    config.validate().map_err(CliError::from)?;
    let workers = if args.workers == 0 {
        None
    } else {
        Some(args.workers)
    };
    let table = run_experiment_with_workers(&config, workers)?;
    let format = match args.format {
        TableFormatArg::Csv => TableFormat::Csv,
        TableFormatArg::Md => TableFormat::Markdown,
    };
    write!(out, "{}", table.emit(format))
        .map_err(|e| CliError::Input(format!("cannot write output: {e}")))
}

// ---------------------------------------------------------------------------
// sample
// ---------------------------------------------------------------------------

fn cmd_sample<W: Write>(args: &SampleArgs, out: &mut W) -> CmdResult<()> {
    let scheme = match (args.p, args.gamma2) {
        (Some(p), None) => TruncationScheme::from_observed_fraction(args.gamma1, p, args.delta)?,
        (None, Some(gamma2)) => TruncationScheme::new(
            BurrModel::new(args.delta, args.gamma1)?,
            BurrModel::new(args.delta, gamma2)?,
        ),
        _ => return Err(CliError::Input("give exactly one of --p or --gamma2".into())),
    };
    let seed = resolve_seed(args.seed)?;
    let sample = scheme.generate(args.n_latent, seed)?;
    write!(out, "{}", format_pairs(&sample))
        .map_err(|e| CliError::Input(format!("cannot write output: {e}")))
}

// ---------------------------------------------------------------------------
// select-k
// ---------------------------------------------------------------------------

fn cmd_select_k<W: Write>(args: &SelectKArgs, out: &mut W) -> CmdResult<()> {
    let sample = read_pairs(&args.file)?;
    if sample.n() < 5 {
        return Err(CliError::Input(format!(
            "selection needs at least 5 pairs, got {}",
            sample.n()
        )));
    }
    if !(0.0..=0.5).contains(&args.theta) {
        return Err(CliError::Input(format!(
            "--theta must lie in [0, 1/2], got {}",
            args.theta
        )));
    }
    let kind: EstimatorKind = args.estimator.into();
    let sorted = SortedSample::new(&sample);
    let path = path_for(&sorted, kind)?;
    let sel = reiss_thomas_select(path.estimates(), path.k_min(), args.theta)?;
    let at_star = path.at(sel.k_star).expect("k_star is in range");

    writeln!(out, "n: {}", sorted.n()).map_err(io_err)?;
    writeln!(out, "estimator: {kind}").map_err(io_err)?;
    writeln!(out, "theta: {}", sel.theta).map_err(io_err)?;
    writeln!(out, "k_star: {}", sel.k_star).map_err(io_err)?;
    writeln!(out, "gamma1_at_k_star: {at_star:.4}").map_err(io_err)?;
    if args.path {
        writeln!(out, "k,gamma1_hat,criterion").map_err(io_err)?;
        for (i, &(k, c)) in sel.criterion.iter().enumerate() {
            let est = path.estimates()[i];
            writeln!(out, "{k},{est},{c}").map_err(io_err)?;
        }
    }
    Ok(())
}

fn io_err(e: std::io::Error) -> CliError {
    CliError::Input(format!("cannot write output: {e}"))
}

// ---------------------------------------------------------------------------
