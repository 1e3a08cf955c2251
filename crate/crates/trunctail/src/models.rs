//! Burr-type heavy-tailed models and the random right-truncation
//! data-generating process.
//!
//! A Burr model has survival function `(1 + x^(1/delta))^(-delta/gamma)`,
//! which is regularly varying at infinity with index `-1/gamma`; `gamma` is
//! the tail index and `delta` controls how fast the pure power-law regime is
//! reached. Truncation pairs two such models: a value drawn from `f` is kept
//! only when it does not exceed an independent draw from `g`.

use rand::distr::Open01;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Heavy-tailed Burr distribution with shape `delta` and tail index `gamma`.
///
/// Survival function: `S(x) = (1 + x^(1/delta))^(-delta/gamma)` for `x >= 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BurrModel {
    delta: f64,
    gamma: f64,
}

impl BurrModel {
    pub fn new(delta: f64, gamma: f64) -> Result<Self> {
        if !delta.is_finite() || delta <= 0.0 {
            return Err(Error::InvalidParameter {
                name: "delta",
                reason: format!("must be a positive finite real, got {delta}"),
            });
        }
        if !gamma.is_finite() || gamma <= 0.0 {
            return Err(Error::InvalidParameter {
                name: "gamma",
                reason: format!("must be a positive finite real, got {gamma}"),
            });
        }
        Ok(Self { delta, gamma })
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// Tail index of the model.
    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// Survival function `(1 + x^(1/delta))^(-delta/gamma)`.
    ///
    /// Equals 1 at the origin, is strictly decreasing and tends to 0.
    pub fn survival(&self, x: f64) -> Result<f64> {
        if !x.is_finite() || x < 0.0 {
            return Err(Error::InvalidParameter {
                name: "x",
                reason: format!("survival is defined on [0, inf), got {x}"),
            });
        }
        Ok((1.0 + x.powf(1.0 / self.delta)).powf(-self.delta / self.gamma))
    }

    /// Inverse of [`survival`](Self::survival): the value `x` with survival
    /// level `u`, i.e. `x = (u^(-gamma/delta) - 1)^delta` for `u` in `(0, 1]`.
    ///
    /// `u = 0` would map to infinity and is rejected.
    pub fn quantile(&self, u: f64) -> Result<f64> {
        if !(u > 0.0 && u <= 1.0) {
            return Err(Error::InvalidParameter {
                name: "u",
                reason: format!("survival level must lie in (0, 1], got {u}"),
            });
        }
        Ok(self.quantile_unchecked(u))
    }

    #[inline]
    fn quantile_unchecked(&self, u: f64) -> f64 {
        (u.powf(-self.gamma / self.delta) - 1.0).powf(self.delta)
    }

    /// Second-order parameter `tau = -gamma/delta` of the tail quantile
    /// function. Always negative; values close to zero mean slow convergence
    /// to the power law (more estimator bias).
    pub fn second_order_tau(&self) -> f64 {
        -self.gamma / self.delta
    }
}

/// Solve `p = gamma2 / (gamma1 + gamma2)` for `gamma2`.
pub fn solve_gamma2(gamma1: f64, p: f64) -> Result<f64> {
    if !gamma1.is_finite() || gamma1 <= 0.0 {
        return Err(Error::InvalidParameter {
            name: "gamma1",
            reason: format!("must be a positive finite real, got {gamma1}"),
        });
    }
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::InvalidParameter {
            name: "p",
            reason: format!("observed fraction must lie in (0, 1), got {p}"),
        });
    }
    Ok(p * gamma1 / (1.0 - p))
}

/// A right-truncation scheme: the law `f` of the variable of interest and
/// the law `g` of the independent truncation variable.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncationScheme {
    f: BurrModel,
    g: BurrModel,
}

impl TruncationScheme {
    pub fn new(f: BurrModel, g: BurrModel) -> Self {
        Self { f, g }
    }

    /// Scheme with target observed fraction `p`: keeps `gamma1` for the
    /// variable of interest and solves `p = gamma2 / (gamma1 + gamma2)`
    /// for the truncation tail index, with the same `delta` on both sides.
    pub fn from_observed_fraction(gamma1: f64, p: f64, delta: f64) -> Result<Self> {
        let gamma2 = solve_gamma2(gamma1, p)?;
        Ok(Self {
            f: BurrModel::new(delta, gamma1)?,
            g: BurrModel::new(delta, gamma2)?,
        })
    }

    pub fn f(&self) -> &BurrModel {
        &self.f
    }

    pub fn g(&self) -> &BurrModel {
        &self.g
    }

    /// Nominal probability `p = gamma2 / (gamma1 + gamma2)` of observing a
    /// pair. Exact for a matched-`delta` Burr pair; for anything else treat
    /// it as an approximation and measure the fraction empirically from a
    /// generated sample.
    pub fn truncation_probability(&self) -> f64 {
        self.g.gamma() / (self.f.gamma() + self.g.gamma())
    }

    /// Whether the asymptotic-normality condition `gamma1 < gamma2` holds.
    pub fn normality_valid(&self) -> bool {
        self.f.gamma() < self.g.gamma()
    }

    /// Draw `n_latent` independent pairs and keep those with `x <= y`,
    /// in draw order.
    ///
    /// Sampling is inverse-transform: for each pair, one uniform variate on
    /// the open interval (0, 1) is drawn for `x`, then one for `y`, from a
    /// ChaCha8 stream seeded with `seed`. The result is a pure function of
    /// `(scheme, n_latent, seed)`.
    pub fn generate(&self, n_latent: usize, seed: u64) -> Result<TruncatedSample> {
        if n_latent == 0 {
            return Err(Error::InvalidParameter {
                name: "n_latent",
                reason: "need at least one latent pair".to_string(),
            });
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut pairs = Vec::new();
        for _ in 0..n_latent {
            let ux: f64 = rng.sample(Open01);
            let uy: f64 = rng.sample(Open01);
            let x = self.f.quantile_unchecked(ux);
            let y = self.g.quantile_unchecked(uy);
            if x <= y {
                pairs.push((x, y));
            }
        }
        if pairs.is_empty() {
            return Err(Error::EmptySample);
        }
        Ok(TruncatedSample {
            pairs,
            source_n: Some(n_latent),
        })
    }
}

/// Observed pairs `(x, y)` with `x <= y`, as produced by right truncation.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedSample {
    pairs: Vec<(f64, f64)>,
    source_n: Option<usize>,
}

impl TruncatedSample {
    /// Validate and wrap observed pairs: every value must be positive and
    /// finite and every pair must satisfy `x <= y`.
    pub fn new(pairs: Vec<(f64, f64)>) -> Result<Self> {
        if pairs.is_empty() {
            return Err(Error::EmptySample);
        }
        for (i, &(x, y)) in pairs.iter().enumerate() {
            if !x.is_finite() || x <= 0.0 {
                return Err(Error::NonPositive { index: i, value: x });
            }
            if !y.is_finite() || y <= 0.0 {
                return Err(Error::NonPositive { index: i, value: y });
            }
            if x > y {
                return Err(Error::InvalidParameter {
                    name: "pairs",
                    reason: format!("pair {i} has x = {x} > y = {y}"),
                });
            }
        }
        Ok(Self {
            pairs,
            source_n: None,
        })
    }

    /// Number of observed pairs.
    pub fn n(&self) -> usize {
        self.pairs.len()
    }

    pub fn pairs(&self) -> &[(f64, f64)] {
        &self.pairs
    }

    pub fn xs(&self) -> Vec<f64> {
        self.pairs.iter().map(|&(x, _)| x).collect()
    }

    pub fn ys(&self) -> Vec<f64> {
        self.pairs.iter().map(|&(_, y)| y).collect()
    }

    /// Latent sample size, present only for generated samples.
    pub fn source_size(&self) -> Option<usize> {
        self.source_n
    }

    /// Empirical observed fraction `n / N`, present only for generated
    /// samples.
    pub fn observed_fraction(&self) -> Option<f64> {
        self.source_n.map(|n_latent| self.n() as f64 / n_latent as f64)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn burr(delta: f64, gamma: f64) -> BurrModel {
        BurrModel::new(delta, gamma).unwrap()
    }

    #[test]
    fn survival_at_origin_is_one() {
        assert_eq!(burr(0.25, 0.6).survival(0.0).unwrap(), 1.0);
    }

    #[test]
    fn survival_closed_form_values() {
        // (1 + 1)^(-(1/4)/0.6) = 2^(-5/12)
        let s = burr(0.25, 0.6).survival(1.0).unwrap();
        let expected = 2f64.powf(-5.0 / 12.0);
        assert!((s - expected).abs() < 1e-15, "got {s}, want {expected}");
        assert!((s - 0.749154).abs() < 1e-6);

        // (1 + 9)^(-1) = 0.1
        let s = burr(1.0, 1.0).survival(9.0).unwrap();
        assert!((s - 0.1).abs() < 1e-15);
    }

    #[test]
    fn survival_rejects_negative_x() {
        assert!(burr(1.0, 1.0).survival(-0.5).is_err());
    }

    #[test]
    fn survival_strictly_decreasing_to_zero() {
        let m = burr(0.25, 0.6);
        let mut prev = m.survival(0.0).unwrap();
        for i in 1..200 {
            let x = i as f64 * 0.5;
            let s = m.survival(x).unwrap();
            assert!(s < prev, "survival not decreasing at x = {x}");
            prev = s;
        }
        assert!(m.survival(1e12).unwrap() < 1e-6);
    }

    #[test]
    fn quantile_closed_form_values() {
        assert_eq!(burr(0.25, 0.6).quantile(1.0).unwrap(), 0.0);
        let x = burr(1.0, 1.0).quantile(0.1).unwrap();
        assert!((x - 9.0).abs() < 1e-12);
    }

    #[test]
    fn quantile_rejects_out_of_range_levels() {
        let m = burr(1.0, 1.0);
        assert!(m.quantile(0.0).is_err());
        assert!(m.quantile(-0.1).is_err());
        assert!(m.quantile(1.5).is_err());
        assert!(m.quantile(f64::NAN).is_err());
    }

    #[test]
    fn quantile_survival_round_trip() {
        for &(delta, gamma) in &[(0.25, 0.6), (0.25, 0.8), (1.0, 1.0), (0.5, 2.0)] {
            let m = burr(delta, gamma);
            for &u in &[0.5, 0.01, 1e-6] {
                let back = m.survival(m.quantile(u).unwrap()).unwrap();
                assert!(
                    ((back - u) / u).abs() < 1e-12,
                    "round trip failed for delta={delta} gamma={gamma} u={u}: {back}"
                );
            }
        }
    }

    #[test]
    fn second_order_tau_values() {
        assert!((burr(0.25, 0.6).second_order_tau() + 2.4).abs() < 1e-15);
        assert!((burr(1.0, 1.0).second_order_tau() + 1.0).abs() < 1e-15);
    }

    /// Numeric check of the second-order parameter: with the tail quantile
    /// function `U(t) = quantile(1/t)` and auxiliary function
    /// `A(t) = gamma * t^tau`, the quotient
    /// `(U(tx)/U(t) - x^gamma) / A(t)` must converge to
    /// `x^gamma * (x^tau - 1) / tau` as `t` grows.
    #[test]
    fn second_order_tau_matches_limit_quotient() {
        for &(delta, gamma) in &[(0.25, 0.6), (1.0, 1.0)] {
            let m = burr(delta, gamma);
            let tau = m.second_order_tau();
            let x: f64 = 2.0;
            let limit = x.powf(gamma) * (x.powf(tau) - 1.0) / tau;
            let quotient = |t: f64| {
                let u_t = m.quantile(1.0 / t).unwrap();
                let u_tx = m.quantile(1.0 / (t * x)).unwrap();
                (u_tx / u_t - x.powf(gamma)) / (gamma * t.powf(tau))
            };
            // larger t hits the f64 noise floor once gamma/delta is big, so
            // accept either a clear decrease or an already-converged value
            let err_lo = (quotient(1e2) - limit).abs();
            let err_hi = (quotient(1e4) - limit).abs();
            let converged = 1e-4 * limit.abs().max(1.0);
            assert!(
                err_hi < (0.5 * err_lo).max(converged),
                "no convergence for delta={delta} gamma={gamma}: {err_lo} -> {err_hi}"
            );
        }
    }

    #[test]
    fn solve_gamma2_values() {
        assert!((solve_gamma2(0.6, 0.55).unwrap() - 0.55 * 0.6 / 0.45).abs() < 1e-15);
        assert!((solve_gamma2(0.6, 0.9).unwrap() - 5.4).abs() < 1e-12);
        assert!((solve_gamma2(0.8, 0.5).unwrap() - 0.8).abs() < 1e-15);
        assert!(solve_gamma2(0.6, 0.0).is_err());
        assert!(solve_gamma2(0.6, 1.0).is_err());
        assert!(solve_gamma2(-0.6, 0.5).is_err());
    }

    #[test]
    fn scheme_probability_and_normality_flag() {
        let s = TruncationScheme::from_observed_fraction(0.6, 0.9, 0.25).unwrap();
        assert!((s.truncation_probability() - 0.9).abs() < 1e-12);
        assert!(s.normality_valid());

        // p = 0.3 puts gamma2 below gamma1
        let s = TruncationScheme::from_observed_fraction(0.6, 0.3, 0.25).unwrap();
        assert!(!s.normality_valid());
    }

    #[test]
    fn generation_is_deterministic() {
        let scheme = TruncationScheme::from_observed_fraction(0.6, 0.55, 0.25).unwrap();
        let a = scheme.generate(500, 42).unwrap();
        let b = scheme.generate(500, 42).unwrap();
        assert_eq!(a, b);
        let c = scheme.generate(500, 43).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn generation_respects_truncation() {
        let scheme = TruncationScheme::from_observed_fraction(0.6, 0.55, 0.25).unwrap();
        let sample = scheme.generate(2000, 7).unwrap();
        assert!(sample.pairs().iter().all(|&(x, y)| x <= y && x > 0.0));
        assert_eq!(sample.source_size(), Some(2000));
    }

    #[test]
    fn observed_fraction_concentrates_near_p() {
        let scheme = TruncationScheme::from_observed_fraction(0.6, 0.55, 0.25).unwrap();
        let sample = scheme.generate(100_000, 42).unwrap();
        let frac = sample.observed_fraction().unwrap();
        assert!(
            (frac - 0.55).abs() < 0.01,
            "observed fraction {frac} too far from 0.55"
        );
    }

    #[test]
    fn empirical_survival_matches_model() {
        // 3-sigma binomial band around survival level 0.1 at x = quantile(0.1).
        let m = burr(0.25, 0.6);
        let x = m.quantile(0.1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let n = 1_000_000;
        let exceed = (0..n)
            .filter(|_| m.quantile_unchecked(rng.sample(Open01)) > x)
            .count();
        let frac = exceed as f64 / n as f64;
        assert!((frac - 0.1).abs() < 0.003, "empirical survival {frac}");
    }

    #[test]
    fn generate_can_report_empty_sample() {
        // p = 0.01 keeps almost nothing; a single latent pair is very
        // unlikely to survive.
        let scheme = TruncationScheme::from_observed_fraction(1.0, 0.01, 0.25).unwrap();
        let failed = (0..20).any(|seed| matches!(scheme.generate(1, seed), Err(Error::EmptySample)));
        assert!(failed);
        assert!(matches!(
            scheme.generate(0, 1),
            Err(Error::InvalidParameter { .. })
        ));
    }

    #[test]
    fn sample_validation_rejects_bad_pairs() {
        assert!(matches!(
            TruncatedSample::new(vec![]),
            Err(Error::EmptySample)
        ));
        assert!(TruncatedSample::new(vec![(1.0, 2.0), (5.0, 4.0)]).is_err());
        assert!(TruncatedSample::new(vec![(0.0, 2.0)]).is_err());
        assert!(TruncatedSample::new(vec![(1.0, f64::INFINITY)]).is_err());
        let ok = TruncatedSample::new(vec![(1.0, 2.0), (3.0, 4.0), (2.0, 5.0)]).unwrap();
        assert_eq!(ok.n(), 3);
        assert_eq!(ok.source_size(), None);
        assert_eq!(ok.observed_fraction(), None);
    }

    proptest! {
        #[test]
        fn round_trip_property(
            delta in 0.1f64..4.0,
            gamma in 0.1f64..4.0,
            u in 1e-6f64..0.999_999,
        ) {
            let m = burr(delta, gamma);
            let back = m.survival(m.quantile(u).unwrap()).unwrap();
            prop_assert!(((back - u) / u).abs() < 1e-11);
        }

        #[test]
        fn quantile_is_decreasing_in_level(
            delta in 0.1f64..4.0,
            gamma in 0.1f64..4.0,
            u in 1e-6f64..0.9,
            bump in 1e-4f64..0.09,
        ) {
            let m = burr(delta, gamma);
            prop_assert!(m.quantile(u).unwrap() > m.quantile(u + bump).unwrap());
        }
    }
}
