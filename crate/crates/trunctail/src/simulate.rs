//! Monte Carlo experiment runner: replication loop, deterministic parallel
//! seeding, bias/rmse aggregation and table emission.
//!
//! Replications are independent work units keyed by `(N, rep)`. Each one
//! derives its own generator seed from the experiment seed through a
//! documented 64-bit mix, so results do not depend on which thread runs
//! which replication, and a run with one worker produces byte-identical
//! tables to a run with many.

use rayon::prelude::*;

use crate::empirical::SortedSample;
use crate::error::{Error, Result};
use crate::estimators::{hill_path, ratio_gamma1, EstimatorKind};
use crate::models::TruncationScheme;
use crate::select::{path_for, reiss_thomas_select};

/// Full specification of a simulation experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    /// True tail index of the variable of interest.
    pub gamma1: f64,
    /// Target observed fraction; the truncation tail index is solved from it.
    pub p: f64,
    /// Burr shape parameter shared by both marginals.
    pub delta: f64,
    /// Latent sample sizes N to sweep.
    pub sizes: Vec<usize>,
    /// Replications per size.
    pub replications: usize,
    /// Experiment master seed.
    pub seed: u64,
    /// Estimators to run on every replication.
    pub estimators: Vec<EstimatorKind>,
    /// Weight exponent for the threshold-selection criterion.
    pub theta: f64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            gamma1: 0.6,
            p: 0.9,
            delta: 0.25,
            sizes: vec![100],
            replications: 1000,
            seed: 42,
            estimators: vec![EstimatorKind::LyndenBell, EstimatorKind::Woodroofe],
            theta: 0.3,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if !self.gamma1.is_finite() || self.gamma1 <= 0.0 {
            return Err(Error::InvalidParameter {
                name: "gamma1",
                reason: format!("must be a positive finite real, got {}", self.gamma1),
            });
        }
        if !(self.p > 0.0 && self.p < 1.0) {
            return Err(Error::InvalidParameter {
                name: "p",
                reason: format!("observed fraction must lie in (0, 1), got {}", self.p),
            });
        }
        if !self.delta.is_finite() || self.delta <= 0.0 {
            return Err(Error::InvalidParameter {
                name: "delta",
                reason: format!("must be a positive finite real, got {}", self.delta),
            });
        }
        if self.sizes.is_empty() || self.sizes.iter().any(|&n| n == 0) {
            return Err(Error::InvalidParameter {
                name: "sizes",
                reason: "need at least one positive latent size".to_string(),
            });
        }
        if self.replications == 0 {
            return Err(Error::InvalidParameter {
                name: "reps",
                reason: "need at least one replication".to_string(),
            });
        }
        if !(0.0..=0.5).contains(&self.theta) {
            return Err(Error::InvalidParameter {
                name: "theta",
                reason: format!("must lie in [0, 1/2], got {}", self.theta),
            });
        }
        if self.estimators.is_empty() {
            return Err(Error::InvalidParameter {
                name: "estimators",
                reason: "need at least one estimator".to_string(),
            });
        }
        if self.estimators.contains(&EstimatorKind::WormsFixed) {
            return Err(Error::InvalidParameter {
                name: "estimators",
                reason: "worms-fixed needs an explicit threshold and cannot be swept".to_string(),
            });
        }
        Ok(())
    }

    /// Serialize to the flat `key=value` format.
    pub fn to_kv(&self) -> String {
        let sizes = self
            .sizes
            .iter()
            .map(|n| n.to_string())
            .collect::<Vec<_>>()
            .join(",");
        let estimators = self
            .estimators
            .iter()
            .map(|e| e.as_str())
            .collect::<Vec<_>>()
            .join(",");
        format!(
            "gamma1={}\np={}\ndelta={}\nsizes={}\nreps={}\nseed={}\nestimators={}\ntheta={}\n",
            self.gamma1,
            self.p,
            self.delta,
            sizes,
            self.replications,
            self.seed,
            estimators,
            self.theta
        )
    }

    /// Parse the flat `key=value` format. `gamma1`, `p` and `sizes` are
    /// required; the remaining keys fall back to the defaults. Blank lines
    /// and `#` comments are ignored.
    pub fn from_kv(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        let bad = |key: &'static str, value: &str| Error::InvalidParameter {
            name: key,
            reason: format!("cannot parse `{value}`"),
        };
        let (mut saw_gamma1, mut saw_p, mut saw_sizes) = (false, false, false);
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or(Error::InvalidParameter {
                name: "config",
                reason: format!("expected key=value, got `{line}`"),
            })?;
            let (key, value) = (key.trim(), value.trim());
            match key {
                "gamma1" => {
                    cfg.gamma1 = value.parse().map_err(|_| bad("gamma1", value))?;
                    saw_gamma1 = true;
                }
                "p" => {
                    cfg.p = value.parse().map_err(|_| bad("p", value))?;
                    saw_p = true;
                }
                "delta" => cfg.delta = value.parse().map_err(|_| bad("delta", value))?,
                "sizes" => {
                    cfg.sizes = value
                        .split(',')
                        .map(|t| t.trim().parse().map_err(|_| bad("sizes", value)))
                        .collect::<Result<_>>()?;
                    saw_sizes = true;
                }
                "reps" => cfg.replications = value.parse().map_err(|_| bad("reps", value))?,
                "seed" => cfg.seed = value.parse().map_err(|_| bad("seed", value))?,
                "estimators" => {
                    cfg.estimators = value
                        .split(',')
                        .map(|t| t.trim().parse())
                        .collect::<Result<_>>()?;
                }
                "theta" => cfg.theta = value.parse().map_err(|_| bad("theta", value))?,
                other => {
                    return Err(Error::InvalidParameter {
                        name: "config",
                        reason: format!("unknown key `{other}`"),
                    })
                }
            }
        }
        if !(saw_gamma1 && saw_p && saw_sizes) {
            return Err(Error::InvalidParameter {
                name: "config",
                reason: "gamma1, p and sizes are required".to_string(),
            });
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Splitmix64 finalizer: full-avalanche bijection on 64 bits.
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Per-replication generator seed, a pure function of
/// `(seed, N, rep)`:
///
/// ```text
/// G = 0x9e3779b97f4a7c15
/// a = mix64(seed ^ G)
/// b = mix64(a ^ N.wrapping_mul(G))
/// replication_seed = mix64(b ^ rep.wrapping_mul(G))
/// ```
///
/// where `mix64` is the splitmix64 finalizer. Each stage is a bijection, so
/// streams for different replications never coincide by construction of the
/// index, and the value is independent of thread schedule.
pub fn replication_seed(seed: u64, n_latent: usize, rep: usize) -> u64 {
    const G: u64 = 0x9e37_79b9_7f4a_7c15;
    let a = mix64(seed ^ G);
    let b = mix64(a ^ (n_latent as u64).wrapping_mul(G));
    mix64(b ^ (rep as u64).wrapping_mul(G))
}

/// Outcome of one estimator on one replication.
#[derive(Debug, Clone, PartialEq)]
pub struct RepEstimate {
    pub gamma1: f64,
    pub k_star: usize,
    pub zero_lb_factors: usize,
}

/// One replication: the generated sample summary and one outcome per
/// requested estimator (`None` marks a failed or degenerate run).
#[derive(Debug, Clone, PartialEq)]
pub struct ReplicationResult {
    pub n_latent: usize,
    pub rep: usize,
    pub n_observed: usize,
    pub outcomes: Vec<(EstimatorKind, Option<RepEstimate>)>,
}

/// Run a single replication: generate, sort once, then estimate with every
/// requested estimator on the shared sample. Replications with fewer than 5
/// observed pairs are recorded as failed rather than raised.
pub fn run_replication(config: &ExperimentConfig, n_latent: usize, rep: usize) -> ReplicationResult {
    let seed = replication_seed(config.seed, n_latent, rep);
    let scheme = TruncationScheme::from_observed_fraction(config.gamma1, config.p, config.delta)
        .expect("validated config");
    let failed = |n_observed| ReplicationResult {
        n_latent,
        rep,
        n_observed,
        outcomes: config.estimators.iter().map(|&e| (e, None)).collect(),
    };
    let sample = match scheme.generate(n_latent, seed) {
        Ok(sample) => sample,
        Err(_) => return failed(0),
    };
    if sample.n() < 5 {
        return failed(sample.n());
    }
    let sorted = SortedSample::new(&sample);
    let n = sorted.n();

    let outcomes = config
        .estimators
        .iter()
        .map(|&kind| {
            let outcome = match kind {
                EstimatorKind::LyndenBell | EstimatorKind::Woodroofe | EstimatorKind::Hill => {
                    path_for(&sorted, kind).ok().and_then(|path| {
                        let sel =
                            reiss_thomas_select(path.estimates(), path.k_min(), config.theta)
                                .ok()?;
                        let gamma1 = path.at(sel.k_star)?;
                        if !gamma1.is_finite() {
                            return None;
                        }
                        let zero_lb_factors = if kind == EstimatorKind::LyndenBell {
                            sorted.zero_factors_above(sorted.x_order()[n - sel.k_star - 1])
                        } else {
                            0
                        };
                        Some(RepEstimate {
                            gamma1,
                            k_star: sel.k_star,
                            zero_lb_factors,
                        })
                    })
                }
                EstimatorKind::Ratio => {
                    let run = || {
                        let x_path = hill_path(&sample.xs()).ok()?;
                        let y_path = hill_path(&sample.ys()).ok()?;
                        let kx = reiss_thomas_select(x_path.estimates(), x_path.k_min(), config.theta)
                            .ok()?
                            .k_star;
                        let ky = reiss_thomas_select(y_path.estimates(), y_path.k_min(), config.theta)
                            .ok()?
                            .k_star;
                        let gamma1 = ratio_gamma1(x_path.at(kx)?, y_path.at(ky)?).ok()?;
                        gamma1.is_finite().then_some(RepEstimate {
                            gamma1,
                            k_star: kx,
                            zero_lb_factors: 0,
                        })
                    };
                    run()
                }
                EstimatorKind::WormsFixed => None,
            };
            (kind, outcome)
        })
        .collect();

    ReplicationResult {
        n_latent,
        rep,
        n_observed: n,
        outcomes,
    }
}

/// One aggregated summary cell: a latent size and an estimator.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub n_latent: usize,
    /// Mean observed count, rounded half-up.
    pub mean_n: usize,
    pub estimator: EstimatorKind,
    /// `|mean(gamma1_hat) - gamma1|` over the successful replications.
    pub abs_bias: f64,
    /// Root of the mean squared error over the successful replications.
    pub rmse: f64,
    /// Mean selected k, rounded half-up.
    pub mean_k_star: usize,
    /// Replications excluded from this cell.
    pub failed: usize,
}

/// Aggregated experiment results, one row per `(estimator, N)` cell.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryTable {
    pub rows: Vec<SummaryRow>,
}

/// Output format for [`SummaryTable::emit`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TableFormat {
    Csv,
    Markdown,
}

fn round_half_up(x: f64) -> usize {
    (x + 0.5).floor() as usize
}

/// Run the whole experiment on the current rayon pool.
pub fn run_experiment(config: &ExperimentConfig) -> Result<SummaryTable> {
    config.validate()?;
    let work: Vec<(usize, usize)> = config
        .sizes
        .iter()
        .flat_map(|&n| (0..config.replications).map(move |rep| (n, rep)))
        .collect();
    let mut results: Vec<ReplicationResult> = work
        .par_iter()
        .map(|&(n, rep)| run_replication(config, n, rep))
        .collect();
    // order-normalized reduce: aggregation must not depend on the schedule
    results.sort_by_key(|r| (r.n_latent, r.rep));
    aggregate(config, &results)
}

/// Run the whole experiment on a dedicated pool with `workers` threads
/// (`None` uses the global pool). The summary is byte-identical either way.
pub fn run_experiment_with_workers(
    config: &ExperimentConfig,
    workers: Option<usize>,
) -> Result<SummaryTable> {
    match workers {
        None => run_experiment(config),
        Some(w) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(w)
                .build()
                .map_err(|e| Error::InvalidParameter {
                    name: "workers",
                    reason: e.to_string(),
                })?;
            pool.install(|| run_experiment(config))
        }
    }
}

fn aggregate(config: &ExperimentConfig, results: &[ReplicationResult]) -> Result<SummaryTable> {
    let mut rows = Vec::new();
    for &kind in &config.estimators {
        for &n_latent in &config.sizes {
            let mut n_sum = 0.0;
            let mut k_sum = 0.0;
            let mut est_sum = 0.0;
            let mut sq_sum = 0.0;
            let mut kept = 0usize;
            let mut failed = 0usize;
            for r in results.iter().filter(|r| r.n_latent == n_latent) {
                let outcome = r
                    .outcomes
                    .iter()
                    .find(|(e, _)| *e == kind)
                    .and_then(|(_, o)| o.as_ref());
                match outcome {
                    Some(est) => {
                        kept += 1;
                        n_sum += r.n_observed as f64;
                        k_sum += est.k_star as f64;
                        est_sum += est.gamma1;
                        sq_sum += (est.gamma1 - config.gamma1).powi(2);
                    }
                    None => failed += 1,
                }
            }
            if kept == 0 {
                return Err(Error::AllReplicationsFailed {
                    n_latent,
                    estimator: kind.as_str(),
                    reps: failed,
                });
            }
            let m = kept as f64;
            rows.push(SummaryRow {
                n_latent,
                mean_n: round_half_up(n_sum / m),
                estimator: kind,
                abs_bias: (est_sum / m - config.gamma1).abs(),
                rmse: (sq_sum / m).sqrt(),
                mean_k_star: round_half_up(k_sum / m),
                failed,
            });
        }
    }
    Ok(SummaryTable { rows })
}

impl SummaryTable {
    pub fn emit(&self, format: TableFormat) -> String {
        match format {
            TableFormat::Csv => self.to_csv(),
            TableFormat::Markdown => self.to_markdown(),
        }
    }

    /// Machine-readable CSV with full-precision floats, so that
    /// [`from_csv`](Self::from_csv) recovers the emitted values exactly.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("N,n,estimator,abs_bias,rmse,k_star\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                r.n_latent, r.mean_n, r.estimator, r.abs_bias, r.rmse, r.mean_k_star
            ));
        }
        out
    }

    /// Parse the CSV emitted by [`to_csv`](Self::to_csv). Exclusion counts
    /// are not part of the wire format and come back as zero.
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        let header = lines.next().unwrap_or("");
        if header != "N,n,estimator,abs_bias,rmse,k_star" {
            return Err(Error::InvalidParameter {
                name: "csv",
                reason: format!("unexpected header `{header}`"),
            });
        }
        let mut rows = Vec::new();
        for (i, line) in lines.enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != 6 {
                return Err(Error::InvalidParameter {
                    name: "csv",
                    reason: format!("row {} has {} fields, expected 6", i + 2, fields.len()),
                });
            }
            let parse_err = |what: &'static str| Error::InvalidParameter {
                name: "csv",
                reason: format!("row {}: cannot parse {what}", i + 2),
            };
            rows.push(SummaryRow {
                n_latent: fields[0].parse().map_err(|_| parse_err("N"))?,
                mean_n: fields[1].parse().map_err(|_| parse_err("n"))?,
                estimator: fields[2].parse()?,
                abs_bias: fields[3].parse().map_err(|_| parse_err("abs_bias"))?,
                rmse: fields[4].parse().map_err(|_| parse_err("rmse"))?,
                mean_k_star: fields[5].parse().map_err(|_| parse_err("k_star"))?,
                failed: 0,
            });
        }
        Ok(Self { rows })
    }

    /// Markdown rendering with one block per estimator and the usual table
    /// columns, floats at 4 decimals.
    pub fn to_markdown(&self) -> String {
        let mut out = String::new();
        let mut seen: Vec<EstimatorKind> = Vec::new();
        for r in &self.rows {
            if !seen.contains(&r.estimator) {
                seen.push(r.estimator);
            }
        }
        for kind in seen {
            out.push_str(&format!("### {kind}\n\n"));
            out.push_str("| N | n | abs bias | rmse | k* |\n");
            out.push_str("|---:|---:|---:|---:|---:|\n");
            for r in self.rows.iter().filter(|r| r.estimator == kind) {
                out.push_str(&format!(
                    "| {} | {} | {:.4} | {:.4} | {} |\n",
                    r.n_latent, r.mean_n, r.abs_bias, r.rmse, r.mean_k_star
                ));
            }
            out.push('\n');
        }
        let excluded: Vec<String> = self
            .rows
            .iter()
            .filter(|r| r.failed > 0)
            .map(|r| format!("{} at N={}: {}", r.estimator, r.n_latent, r.failed))
            .collect();
        if !excluded.is_empty() {
            out.push_str(&format!("excluded replications: {}\n", excluded.join(", ")));
        }
        out
    }
}
