//! Tail-index estimators for randomly right-truncated heavy-tailed data.
//!
//! The central estimator integrates the Lynden-Bell product limit above the
//! random threshold `X_{n-k:n}`:
//!
//! ```text
//! gamma1_hat = sum_{i=1..k} a_i * log(X_{n-i+1:n} / X_{n-k:n})
//! a_i  proportional to  F_lb(X_{n-i+1:n}) / C_n(X_{n-i+1:n})
//! ```
//!
//! with the normalizer computed by the same jump sum, so the weights form an
//! exact convex combination. The Woodroofe variant replaces `F_lb` by the
//! exponential product limit. Both reduce to the classical Hill estimator on
//! complete data, where every jump ratio collapses to `1/n`.
//!
//! Also here: the fixed-threshold variant, the ratio estimator built from
//! two Hill estimates, the asymptotic variance of the random-threshold
//! estimators, normal confidence intervals, the empirical tail process
//! diagnostic, and the `O(n)` all-`k` estimate paths that threshold
//! selection consumes.

use statrs::distribution::{ContinuousCDF, Normal};

use crate::empirical::{ProductLimit, SortedSample};
use crate::error::{Error, Result};
use crate::models::TruncatedSample;

/// Which tail-index estimator produced an estimate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EstimatorKind {
    /// Lynden-Bell integral estimator with random threshold `X_{n-k:n}`.
    LyndenBell,
    /// Woodroofe integral estimator with random threshold.
    Woodroofe,
    /// Lynden-Bell integral estimator with a fixed (deterministic) threshold.
    WormsFixed,
    /// Classical Hill estimator, ignoring truncation.
    Hill,
    /// Ratio-of-indices estimator combining Hill estimates for both samples.
    Ratio,
}

impl EstimatorKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            EstimatorKind::LyndenBell => "lb",
            EstimatorKind::Woodroofe => "w",
            EstimatorKind::WormsFixed => "worms-fixed",
            EstimatorKind::Hill => "hill",
            EstimatorKind::Ratio => "ratio",
        }
    }
}

impl std::fmt::Display for EstimatorKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for EstimatorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lb" => Ok(EstimatorKind::LyndenBell),
            "w" => Ok(EstimatorKind::Woodroofe),
            "worms-fixed" => Ok(EstimatorKind::WormsFixed),
            "hill" => Ok(EstimatorKind::Hill),
            "ratio" => Ok(EstimatorKind::Ratio),
            other => Err(Error::InvalidParameter {
                name: "estimator",
                reason: format!("unknown estimator `{other}` (expected lb|w|worms-fixed|hill|ratio)"),
            }),
        }
    }
}

/// Two-sided confidence interval for a tail index.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConfidenceInterval {
    pub lower: f64,
    pub upper: f64,
    pub level: f64,
}

/// A point estimate of the tail index together with how it was obtained.
#[derive(Debug, Clone, PartialEq)]
pub struct TailEstimate {
    pub gamma1: f64,
    pub estimator: EstimatorKind,
    /// Number of upper order statistics; absent for fixed-threshold
    /// estimates.
    pub k: Option<usize>,
    /// The threshold actually used (`X_{n-k:n}` or the fixed `t`).
    pub threshold: f64,
    /// Number of vanishing Lynden-Bell factors above the threshold; a
    /// nonzero count means some weights collapsed to zero.
    pub zero_lb_factors: usize,
    pub ci: Option<ConfidenceInterval>,
}

impl TailEstimate {
    pub fn with_ci(mut self, ci: ConfidenceInterval) -> Self {
        self.ci = Some(ci);
        self
    }
}

/// Normalized nonnegative weights over the top `k` order statistics.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightVector {
    a: Vec<f64>,
}

impl WeightVector {
    /// Weight on the i-th upper order statistic, `i = 1` being the maximum.
    pub fn as_slice(&self) -> &[f64] {
        &self.a
    }

    pub fn len(&self) -> usize {
        self.a.len()
    }

    pub fn is_empty(&self) -> bool {
        self.a.is_empty()
    }
}

/// Classical Hill estimator
/// `(1/k) sum_{i=1..k} log(X_{n-i+1:n} / X_{n-k:n})`.
///
/// Requires `1 <= k <= n-1` and strictly positive data.
pub fn hill_estimator(xs: &[f64], k: usize) -> Result<f64> {
    let n = xs.len();
    if k < 1 || k + 1 > n {
        return Err(Error::KOutOfRange { k, n });
    }
    let sorted = sorted_positive(xs)?;
    let threshold = sorted[n - k - 1];
    let sum: f64 = sorted[n - k..].iter().map(|&x| (x / threshold).ln()).sum();
    Ok(sum / k as f64)
}

fn sorted_positive(xs: &[f64]) -> Result<Vec<f64>> {
    for (i, &x) in xs.iter().enumerate() {
        if !x.is_finite() || x <= 0.0 {
            return Err(Error::NonPositive { index: i, value: x });
        }
    }
    let mut sorted = xs.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("values are finite"));
    Ok(sorted)
}

/// The normalized weights `a_i` of the random-threshold Lynden-Bell
/// estimator: jump ratios `F_lb/C_n` at the top `k` order statistics,
/// scaled to sum to one. On complete data every ratio is `1/n`, so the
/// weights are uniform `1/k`.
pub fn lb_weights(s: &SortedSample, k: usize) -> Result<WeightVector> {
    let n = s.n();
    if k < 1 || k >= n {
        return Err(Error::KOutOfRange { k, n });
    }
    let mut raw = Vec::with_capacity(k);
    let mut total = 0.0;
    for i in 1..=k {
        let r = s.jump_ratio(n - i, ProductLimit::LyndenBell);
        raw.push(r);
        total += r;
    }
    if total == 0.0 {
        return Err(Error::DegenerateDenominator);
    }
    for w in &mut raw {
        *w /= total;
    }
    Ok(WeightVector { a: raw })
}

/// Shared core of the random-threshold estimators: accumulate the jump sums
/// top-down and divide. Using `T - S*log(t)` instead of per-term
/// `log(x/t)` keeps single-`k` calls bit-identical to the incremental
/// all-`k` path.
fn random_threshold_estimate(
    s: &SortedSample,
    k: usize,
    which: ProductLimit,
) -> Result<TailEstimate> {
    let n = s.n();
    if k < 2 || k >= n {
        return Err(Error::KOutOfRange { k, n });
    }
    let mut sum_ratio = 0.0;
    let mut sum_ratio_log = 0.0;
    for i in 1..=k {
        let j = n - i;
        let r = s.jump_ratio(j, which);
        sum_ratio += r;
        sum_ratio_log += r * s.x_order()[j].ln();
    }
    if sum_ratio == 0.0 {
        return Err(Error::DegenerateDenominator);
    }
    let threshold = s.x_order()[n - k - 1];
    let (estimator, zero_lb_factors) = match which {
        ProductLimit::LyndenBell => (EstimatorKind::LyndenBell, s.zero_factors_above(threshold)),
        ProductLimit::Woodroofe => (EstimatorKind::Woodroofe, 0),
    };
    Ok(TailEstimate {
        gamma1: (sum_ratio_log - sum_ratio * threshold.ln()) / sum_ratio,
        estimator,
        k: Some(k),
        threshold,
        zero_lb_factors,
        ci: None,
    })
}

/// Lynden-Bell integral estimator of the tail index with random threshold
/// `X_{n-k:n}`.
pub fn lb_tail_index(s: &SortedSample, k: usize) -> Result<TailEstimate> {
    random_threshold_estimate(s, k, ProductLimit::LyndenBell)
}

/// Woodroofe integral estimator of the tail index with random threshold
/// `X_{n-k:n}`.
pub fn woodroofe_tail_index(s: &SortedSample, k: usize) -> Result<TailEstimate> {
    random_threshold_estimate(s, k, ProductLimit::Woodroofe)
}

/// Lynden-Bell integral estimator with a deterministic threshold `t`:
/// the sum runs over the observations exceeding `t` and the logs are taken
/// against `t` itself. At `t = X_{n-k:n}` this coincides with
/// [`lb_tail_index`] at `k`.
pub fn worms_fixed_threshold(s: &SortedSample, t: f64) -> Result<TailEstimate> {
    if !t.is_finite() || t <= 0.0 {
        return Err(Error::InvalidParameter {
            name: "threshold",
            reason: format!("must be a positive finite real, got {t}"),
        });
    }
    let n = s.n();
    let start = s.x_order().partition_point(|&v| v <= t);
    let found = n - start;
    if found < 2 {
        return Err(Error::TooFewExceedances {
            threshold: t,
            found,
        });
    }
    let mut sum_ratio = 0.0;
    let mut sum_ratio_log = 0.0;
    for j in (start..n).rev() {
        let r = s.jump_ratio(j, ProductLimit::LyndenBell);
        sum_ratio += r;
        sum_ratio_log += r * s.x_order()[j].ln();
    }
    if sum_ratio == 0.0 {
        return Err(Error::DegenerateDenominator);
    }
    Ok(TailEstimate {
        gamma1: (sum_ratio_log - sum_ratio * t.ln()) / sum_ratio,
        estimator: EstimatorKind::WormsFixed,
        k: None,
        threshold: t,
        zero_lb_factors: s.zero_factors_above(t),
        ci: None,
    })
}

/// Combine an index estimate for the observed variable (`gamma_hat`, from
/// the x-sample) with one for the truncation variable (`gamma2_hat`, from
/// the y-sample) via `1/gamma1 = 1/gamma - 1/gamma2`.
pub fn ratio_gamma1(gamma_hat: f64, gamma2_hat: f64) -> Result<f64> {
    if gamma2_hat <= gamma_hat {
        return Err(Error::RatioInconsistent {
            gamma_hat,
            gamma2_hat,
        });
    }
    Ok(gamma_hat * gamma2_hat / (gamma2_hat - gamma_hat))
}

/// Ratio estimator of the tail index: Hill on the observed x-sample (tail
/// index `gamma` of the truncated law) and Hill on the observed y-sample
/// (tail index `gamma2`), combined through `1/gamma1 = 1/gamma - 1/gamma2`.
pub fn ratio_tail_index(sample: &TruncatedSample, k_x: usize, k_y: usize) -> Result<TailEstimate> {
    let xs = sample.xs();
    let gamma_hat = hill_estimator(&xs, k_x)?;
    let gamma2_hat = hill_estimator(&sample.ys(), k_y)?;
    let gamma1 = ratio_gamma1(gamma_hat, gamma2_hat)?;
    let sorted = sorted_positive(&xs)?;
    Ok(TailEstimate {
        gamma1,
        estimator: EstimatorKind::Ratio,
        k: Some(k_x),
        threshold: sorted[sample.n() - k_x - 1],
        zero_lb_factors: 0,
        ci: None,
    })
}

/// Asymptotic variance of `sqrt(k) * (gamma1_hat - gamma1)` for the
/// random-threshold integral estimators:
/// `sigma^2 = gamma^2 (1 + r)(1 + r^2) / (1 - r)^3` with
/// `gamma = gamma1*gamma2/(gamma1+gamma2)` and `r = gamma1/gamma2`.
/// Defined only for `gamma1 < gamma2`; as `r -> 0` it recovers the Hill
/// variance `gamma1^2` of the complete-data case.
pub fn asymptotic_sigma2(gamma1: f64, gamma2: f64) -> Result<f64> {
    if !gamma1.is_finite() || gamma1 <= 0.0 {
        return Err(Error::InvalidParameter {
            name: "gamma1",
            reason: format!("must be a positive finite real, got {gamma1}"),
        });
    }
    if !gamma2.is_finite() || gamma2 <= 0.0 {
        return Err(Error::InvalidParameter {
            name: "gamma2",
            reason: format!("must be a positive finite real, got {gamma2}"),
        });
    }
    if gamma1 >= gamma2 {
        return Err(Error::VarianceUndefined { gamma1, gamma2 });
    }
    let gamma = gamma1 * gamma2 / (gamma1 + gamma2);
    let r = gamma1 / gamma2;
    Ok(gamma * gamma * (1.0 + r) * (1.0 + r * r) / (1.0 - r).powi(3))
}

pub(crate) fn standard_normal_quantile(p: f64) -> f64 {
    Normal::new(0.0, 1.0)
        .expect("standard normal parameters are valid")
        .inverse_cdf(p)
}

/// Normal confidence interval `gamma1_hat +/- z_{(1+level)/2} sqrt(sigma2/k)`
/// from an explicit count of upper order statistics (or exceedances).
///
/// The interval is centered at the point estimate; the finite-sample bias of
/// the estimator is not corrected, so at moderate `n` the true value may sit
/// off-center.
pub fn confidence_interval_with_count(
    gamma1_hat: f64,
    sigma2: f64,
    level: f64,
    count: usize,
) -> Result<ConfidenceInterval> {
    if !(level > 0.5 && level < 1.0) {
        return Err(Error::InvalidParameter {
            name: "level",
            reason: format!("confidence level must lie in (0.5, 1), got {level}"),
        });
    }
    if !sigma2.is_finite() || sigma2 <= 0.0 {
        return Err(Error::InvalidParameter {
            name: "sigma2",
            reason: format!("must be a positive finite real, got {sigma2}"),
        });
    }
    if count < 2 {
        return Err(Error::MissingK);
    }
    let z = standard_normal_quantile((1.0 + level) / 2.0);
    let half = z * (sigma2 / count as f64).sqrt();
    Ok(ConfidenceInterval {
        lower: gamma1_hat - half,
        upper: gamma1_hat + half,
        level,
    })
}

/// Normal confidence interval for an estimate carrying its own `k`.
/// Fixed-threshold estimates have no `k`; supply the exceedance count via
/// [`confidence_interval_with_count`] instead.
pub fn confidence_interval(
    est: &TailEstimate,
    sigma2: f64,
    level: f64,
) -> Result<ConfidenceInterval> {
    let k = est.k.ok_or(Error::MissingK)?;
    confidence_interval_with_count(est.gamma1, sigma2, level, k)
}

/// Empirical tail Lynden-Bell process
/// `sqrt(k) * (S_lb(X_{n-k:n} x) / S_lb(X_{n-k:n}) - x^(-1/gamma1))`,
/// where both tail masses are jump sums over the exceeding observations.
/// A diagnostic: near zero over `x` when the tail is well approximated by a
/// power law with index `gamma1` above the threshold. Exactly zero at
/// `x = 1`. On complete data it reduces to the classical tail empirical
/// process.
pub fn tail_process_lb(s: &SortedSample, k: usize, x: f64, gamma1: f64) -> Result<f64> {
    let n = s.n();
    if k < 2 || k >= n {
        return Err(Error::KOutOfRange { k, n });
    }
    if !x.is_finite() || x <= 0.0 {
        return Err(Error::InvalidParameter {
            name: "x",
            reason: format!("scale must be a positive finite real, got {x}"),
        });
    }
    if !gamma1.is_finite() || gamma1 <= 0.0 {
        return Err(Error::InvalidParameter {
            name: "gamma1",
            reason: format!("must be a positive finite real, got {gamma1}"),
        });
    }
    let denominator = s.lb_survival_at_kth(k)?;
    let scaled = s.x_order()[n - k - 1] * x;
    let start = s.x_order().partition_point(|&v| v <= scaled);
    let mut numerator = 0.0;
    for j in (start..n).rev() {
        numerator += s.jump_ratio(j, ProductLimit::LyndenBell);
    }
    Ok((k as f64).sqrt() * (numerator / denominator - x.powf(-1.0 / gamma1)))
}

/// Estimates for every `k` in `[k_min, k_max]`, as produced by the one-pass
/// path builders. Index `i` holds the estimate at `k = k_min + i`.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimatePath {
    k_min: usize,
    estimates: Vec<f64>,
}

impl EstimatePath {
    pub fn k_min(&self) -> usize {
        self.k_min
    }

    pub fn k_max(&self) -> usize {
        self.k_min + self.estimates.len() - 1
    }

    pub fn len(&self) -> usize {
        self.estimates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.estimates.is_empty()
    }

    /// Estimate at a specific `k`.
    pub fn at(&self, k: usize) -> Option<f64> {
        k.checked_sub(self.k_min).and_then(|i| self.estimates.get(i).copied())
    }

    pub fn estimates(&self) -> &[f64] {
        &self.estimates
    }

    /// Iterate `(k, estimate)` pairs in increasing `k`.
    pub fn iter(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.estimates
            .iter()
            .enumerate()
            .map(move |(i, &v)| (self.k_min + i, v))
    }
}

/// All random-threshold estimates `gamma1_hat(k)`, `k = 2..=n-1`, in one
/// `O(n)` sweep: the jump sums grow by one term per `k`, and each estimate
/// only needs the running sums and the current threshold.
pub fn estimate_path(s: &SortedSample, which: ProductLimit) -> Result<EstimatePath> {
    let n = s.n();
    if n < 3 {
        return Err(Error::EmptyPath);
    }
    let mut sum_ratio = s.jump_ratio(n - 1, which);
    let mut sum_ratio_log = sum_ratio * s.x_order()[n - 1].ln();
    let mut estimates = Vec::with_capacity(n - 2);
    for k in 2..n {
        let j = n - k;
        let r = s.jump_ratio(j, which);
        sum_ratio += r;
        sum_ratio_log += r * s.x_order()[j].ln();
        let threshold = s.x_order()[n - k - 1];
        estimates.push(if sum_ratio == 0.0 {
            f64::NAN
        } else {
            (sum_ratio_log - sum_ratio * threshold.ln()) / sum_ratio
        });
    }
    Ok(EstimatePath {
        k_min: 2,
        estimates,
    })
}

/// All Hill estimates `k = 2..=n-1` in one sweep over the sorted data.
pub fn hill_path(xs: &[f64]) -> Result<EstimatePath> {
    let n = xs.len();
    if n < 3 {
        return Err(Error::EmptyPath);
    }
    let sorted = sorted_positive(xs)?;
    let mut sum_log = sorted[n - 1].ln() + sorted[n - 2].ln();
    let mut estimates = Vec::with_capacity(n - 2);
    for k in 2..n {
        let threshold = sorted[n - k - 1];
        estimates.push(sum_log / k as f64 - threshold.ln());
        sum_log += threshold.ln();
    }
    Ok(EstimatePath {
        k_min: 2,
        estimates,
    })
}
