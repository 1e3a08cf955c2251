//! Error type shared by all modules.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A constructor or operation received a parameter outside its domain.
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    /// Truncated generation kept no pairs (every latent x exceeded its y).
    #[error("empty sample: no pair satisfied x <= y")]
    EmptySample,

    /// The number of upper order statistics is outside the valid range.
    #[error("k = {k} out of range for sample size n = {n}")]
    KOutOfRange { k: usize, n: usize },

    /// An input value that must be positive and finite is not.
    #[error("value at position {index} must be positive and finite, got {value}")]
    NonPositive { index: usize, value: f64 },

    /// Fewer than two observations exceed the fixed threshold.
    #[error("only {found} observation(s) exceed threshold {threshold}; need at least 2")]
    TooFewExceedances { threshold: f64, found: usize },

    /// A normalizing sum collapsed to zero, so no estimate exists.
    #[error("degenerate estimate: normalizing sum is zero")]
    DegenerateDenominator,

    /// The plug-in route needs the truncation index to dominate the observed one.
    #[error("ratio estimator undefined: gamma2_hat = {gamma2_hat} <= gamma_hat = {gamma_hat}")]
    RatioInconsistent { gamma_hat: f64, gamma2_hat: f64 },

    /// The asymptotic variance formula is only valid for gamma1 < gamma2.
    #[error("asymptotic variance requires gamma1 < gamma2, got gamma1 = {gamma1}, gamma2 = {gamma2}")]
    VarianceUndefined { gamma1: f64, gamma2: f64 },

    /// A confidence interval was requested for an estimate with no recorded k.
    #[error("confidence interval needs a number of upper order statistics (or an exceedance count)")]
    MissingK,

    /// Threshold selection received an empty estimate path.
    #[error("estimate path is empty")]
    EmptyPath,

    /// Threshold selection found no finite estimate in the path.
    #[error("every estimate in the path is non-finite")]
    AllDegenerate,

    /// Every Monte Carlo replication failed for one summary cell.
    #[error("all {reps} replications failed for N = {n_latent}, estimator {estimator}")]
    AllReplicationsFailed {
        n_latent: usize,
        estimator: &'static str,
        reps: usize,
    },
}
