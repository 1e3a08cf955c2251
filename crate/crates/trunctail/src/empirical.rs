//! Order-statistics machinery and the two product-limit estimators of the
//! distribution function under random right truncation.
//!
//! With observed pairs `(X_i, Y_i)` and
//! `C_n(x) = n^-1 * #{i : X_i <= x <= Y_i}`, the estimators are
//!
//! - Lynden-Bell: `F_lb(x) = prod over {i : X_i > x} of (1 - 1/(n C_n(X_i)))`
//! - Woodroofe:   `F_w(x)  = prod over {i : X_i > x} of exp(-1/(n C_n(X_i)))`
//!
//! [`SortedSample`] precomputes everything needed to evaluate both at all
//! order statistics in one `O(n log n)` build, which is what the all-`k`
//! tail-index paths and threshold selection rely on.

use crate::error::{Error, Result};
use crate::models::TruncatedSample;

/// A truncated sample sorted by `x`, with the bracketing counts `n C_n` and
/// both product-limit estimators precomputed at every order statistic.
///
/// Values are immutable after construction; all queries are read-only, so a
/// `SortedSample` can be shared freely across threads.
#[derive(Debug, Clone)]
pub struct SortedSample {
    /// X-values in ascending order.
    x_order: Vec<f64>,
    /// Y-values co-sorted with their X partners.
    y_co: Vec<f64>,
    /// Y-values in ascending order, for bracketing-count queries.
    y_sorted: Vec<f64>,
    /// `n * C_n(X_{i:n})` as an integer count (the pair itself always
    /// brackets its own x, so every entry is >= 1).
    cn_counts: Vec<usize>,
    /// `lb_suffix[i] = prod_{j >= i} (1 - 1/cn_counts[j])`, length n+1.
    lb_suffix: Vec<f64>,
    /// `w_exp_suffix[i] = sum_{j >= i} 1/cn_counts[j]`, length n+1.
    w_exp_suffix: Vec<f64>,
    /// `zero_suffix[i] = #{j >= i : cn_counts[j] == 1}`, length n+1.
    zero_suffix: Vec<usize>,
    /// Lynden-Bell estimator evaluated at each order statistic.
    flb_at_order: Vec<f64>,
    /// Woodroofe estimator evaluated at each order statistic.
    fw_at_order: Vec<f64>,
}

impl SortedSample {
    /// Sort the sample by `x` (stable) and run the counting and product
    /// passes.
    pub fn new(sample: &TruncatedSample) -> Self {
        let n = sample.n();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| {
            sample.pairs()[a]
                .0
                .partial_cmp(&sample.pairs()[b].0)
                .expect("sample values are finite")
        });
        let x_order: Vec<f64> = order.iter().map(|&i| sample.pairs()[i].0).collect();
        let y_co: Vec<f64> = order.iter().map(|&i| sample.pairs()[i].1).collect();
        let mut y_sorted = y_co.clone();
        y_sorted.sort_by(|a, b| a.partial_cmp(b).expect("sample values are finite"));

        // n C_n(x) = #{x_j <= x} - #{y_j < x}; every pair j with y_j < x
        // also has x_j < x, so the difference is >= 1 at x = x_i.
        let mut cn_counts = Vec::with_capacity(n);
        for &x in &x_order {
            let le_x = x_order.partition_point(|&v| v <= x);
            let y_below = y_sorted.partition_point(|&v| v < x);
            cn_counts.push(le_x - y_below);
        }

        let mut lb_suffix = vec![1.0; n + 1];
        let mut w_exp_suffix = vec![0.0; n + 1];
        let mut zero_suffix = vec![0usize; n + 1];
        for i in (0..n).rev() {
            let c = cn_counts[i] as f64;
            lb_suffix[i] = lb_suffix[i + 1] * (1.0 - 1.0 / c);
            w_exp_suffix[i] = w_exp_suffix[i + 1] + 1.0 / c;
            zero_suffix[i] = zero_suffix[i + 1] + usize::from(cn_counts[i] == 1);
        }

        // Per order statistic: product over strictly greater x, so all
        // members of a tie group share the value taken at the group end.
        let mut flb_at_order = vec![0.0; n];
        let mut fw_at_order = vec![0.0; n];
        let mut hi = n;
        while hi > 0 {
            let x = x_order[hi - 1];
            let lo = x_order[..hi].partition_point(|&v| v < x);
            for i in lo..hi {
                flb_at_order[i] = lb_suffix[hi];
                fw_at_order[i] = (-w_exp_suffix[hi]).exp();
            }
            hi = lo;
        }

        Self {
            x_order,
            y_co,
            y_sorted,
            cn_counts,
            lb_suffix,
            w_exp_suffix,
            zero_suffix,
            flb_at_order,
            fw_at_order,
        }
    }

    pub fn n(&self) -> usize {
        self.x_order.len()
    }

    /// X-values in ascending order (`X_{1:n} ... X_{n:n}`).
    pub fn x_order(&self) -> &[f64] {
        &self.x_order
    }

    /// Y-values co-sorted with their X partners.
    pub fn y_co(&self) -> &[f64] {
        &self.y_co
    }

    /// Integer bracketing count `n C_n(X_{i+1:n})` (0-indexed `i`).
    pub fn cn_count(&self, i: usize) -> usize {
        self.cn_counts[i]
    }

    /// `C_n` at the i-th order statistic (0-indexed), a rational with
    /// denominator n.
    pub fn cn_at_order(&self, i: usize) -> f64 {
        self.cn_counts[i] as f64 / self.n() as f64
    }

    /// Lynden-Bell estimate at the i-th order statistic (0-indexed).
    pub fn flb_at_order(&self, i: usize) -> f64 {
        self.flb_at_order[i]
    }

    /// Woodroofe estimate at the i-th order statistic (0-indexed).
    pub fn fw_at_order(&self, i: usize) -> f64 {
        self.fw_at_order[i]
    }

    /// First index whose x-value strictly exceeds `x` (also the number of
    /// observations `<= x`).
    fn first_above(&self, x: f64) -> usize {
        self.x_order.partition_point(|&v| v <= x)
    }

    /// Lynden-Bell product-limit estimate of the distribution function at
    /// an arbitrary point (empty product = 1 at and above the maximum).
    pub fn lynden_bell_cdf(&self, x: f64) -> f64 {
        self.lb_suffix[self.first_above(x)]
    }

    /// Woodroofe product-limit estimate of the distribution function.
    pub fn woodroofe_cdf(&self, x: f64) -> f64 {
        (-self.w_exp_suffix[self.first_above(x)]).exp()
    }

    /// Number of observations strictly above `x` whose Lynden-Bell factor is
    /// exactly zero (`n C_n = 1`). A nonzero count means the Lynden-Bell
    /// product vanishes somewhere above `x`.
    pub fn zero_factors_above(&self, x: f64) -> usize {
        self.zero_suffix[self.first_above(x)]
    }

    /// Tail mass above the k-th upper order statistic, computed by the jump
    /// sum `(1/n) sum_{i=1..k} F_lb(X_{n-i+1:n}) / C_n(X_{n-i+1:n})`.
    ///
    /// For distinct x-values this telescopes to
    /// `1 - F_lb(X_{n-k:n})`, but the sum form is what keeps the tail-index
    /// weights an exact convex combination, so it is the canonical route.
    /// The terms are accumulated from the top order statistic downward.
    pub fn lb_survival_at_kth(&self, k: usize) -> Result<f64> {
        self.tail_jump_sum(k, ProductLimit::LyndenBell)
    }

    /// Woodroofe analogue of [`lb_survival_at_kth`](Self::lb_survival_at_kth).
    pub fn w_survival_at_kth(&self, k: usize) -> Result<f64> {
        self.tail_jump_sum(k, ProductLimit::Woodroofe)
    }

    fn tail_jump_sum(&self, k: usize, which: ProductLimit) -> Result<f64> {
        let n = self.n();
        if k < 1 || k >= n {
            return Err(Error::KOutOfRange { k, n });
        }
        let mut sum = 0.0;
        for i in 1..=k {
            sum += self.jump_ratio(n - i, which);
        }
        if sum == 0.0 {
            return Err(Error::DegenerateDenominator);
        }
        Ok(sum)
    }

    /// `F(X_{j+1:n}) / (n C_n(X_{j+1:n}))` for the chosen product limit —
    /// the jump of the estimator at one order statistic, times 1/n folded
    /// into the count.
    pub(crate) fn jump_ratio(&self, j: usize, which: ProductLimit) -> f64 {
        let f = match which {
            ProductLimit::LyndenBell => self.flb_at_order[j],
            ProductLimit::Woodroofe => self.fw_at_order[j],
        };
        f / self.cn_counts[j] as f64
    }

    /// Raw empirical counts view (`F_n` and `C_n` at arbitrary points).
    pub fn counts(&self) -> EmpiricalCounts<'_> {
        EmpiricalCounts { s: self }
    }
}

/// Which product-limit estimator a computation runs on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProductLimit {
    LyndenBell,
    Woodroofe,
}

/// Empirical counterparts `F_n` (step function with jumps 1/n) and `C_n`
/// (fraction of pairs bracketing a point).
#[derive(Debug, Clone, Copy)]
pub struct EmpiricalCounts<'a> {
    s: &'a SortedSample,
}

impl EmpiricalCounts<'_> {
    pub fn n(&self) -> usize {
        self.s.n()
    }

    /// `F_n(x) = n^-1 #{i : X_i <= x}`, right-continuous.
    pub fn f_n(&self, x: f64) -> f64 {
        self.s.first_above(x) as f64 / self.s.n() as f64
    }

    /// `C_n(x) = n^-1 #{i : X_i <= x <= Y_i}`.
    pub fn c_n(&self, x: f64) -> f64 {
        let le_x = self.s.first_above(x);
        let y_below = self.s.y_sorted.partition_point(|&v| v < x);
        (le_x - y_below) as f64 / self.s.n() as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{TruncatedSample, TruncationScheme};
    use proptest::prelude::*;

    /// The worked 3-point sample: pairs (1,2), (3,4), (2,5).
    fn s3() -> SortedSample {
        let sample = TruncatedSample::new(vec![(1.0, 2.0), (3.0, 4.0), (2.0, 5.0)]).unwrap();
        SortedSample::new(&sample)
    }

    /// A fixture with no effective truncation: every y dominates every x,
    /// so C_n = F_n on the whole x-range.
    fn untruncated(xs: &[f64]) -> SortedSample {
        let top = 2.0 * xs.iter().cloned().fold(f64::MIN, f64::max);
        let sample =
            TruncatedSample::new(xs.iter().map(|&x| (x, top)).collect()).unwrap();
        SortedSample::new(&sample)
    }

    /// Brute-force n C_n(x) by the defining indicator sum.
    fn naive_cn(pairs: &[(f64, f64)], x: f64) -> usize {
        pairs.iter().filter(|&&(a, b)| a <= x && x <= b).count()
    }

    /// Brute-force product-limit estimators straight from their definitions.
    fn naive_products(pairs: &[(f64, f64)], x: f64) -> (f64, f64) {
        let n = pairs.len();
        let mut lb = 1.0;
        let mut w_exp = 0.0;
        for &(a, _) in pairs {
            if a > x {
                let c = naive_cn(pairs, a) as f64;
                lb *= 1.0 - 1.0 / c;
                w_exp += 1.0 / c;
            }
        }
        let _ = n;
        (lb, (-w_exp).exp())
    }

    #[test]
    fn bracketing_counts_on_worked_sample() {
        let s = s3();
        assert_eq!(s.cn_counts, vec![1, 2, 2]);
        assert!((s.cn_at_order(1) - 2.0 / 3.0).abs() < 1e-15);
        assert!((s.counts().c_n(3.0) - 2.0 / 3.0).abs() < 1e-15);
        assert!(s.cn_counts.iter().all(|&c| c >= 1));
    }

    #[test]
    fn lynden_bell_on_worked_sample() {
        let s = s3();
        assert!((s.lynden_bell_cdf(2.5) - 0.5).abs() < 1e-15);
        assert_eq!(s.lynden_bell_cdf(3.0), 1.0);
        assert_eq!(s.lynden_bell_cdf(10.0), 1.0);
        // factor at x = 1 is exactly zero (its count is 1)
        assert_eq!(s.lynden_bell_cdf(0.5), 0.0);
        assert_eq!(s.zero_factors_above(0.5), 1);
        assert_eq!(s.zero_factors_above(1.0), 0);
    }

    #[test]
    fn woodroofe_on_worked_sample() {
        let s = s3();
        assert!((s.woodroofe_cdf(2.5) - (-0.5f64).exp()).abs() < 1e-15);
        assert_eq!(s.woodroofe_cdf(3.0), 1.0);
    }

    #[test]
    fn tail_jump_sum_on_worked_sample() {
        let s = s3();
        let v = s.lb_survival_at_kth(2).unwrap();
        assert!((v - 0.75).abs() < 1e-15);
        // telescoping: equals 1 - F_lb at the threshold X_{1:3} = 1
        assert!((v - (1.0 - s.lynden_bell_cdf(1.0))).abs() < 1e-15);
        assert!(s.lb_survival_at_kth(0).is_err());
        assert!(s.lb_survival_at_kth(3).is_err());
    }

    #[test]
    fn complete_data_reduces_to_empirical_df() {
        let s = untruncated(&[3.0, 1.0, 4.0, 1.5, 9.0, 2.6, 5.3, 0.2]);
        let n = s.n();
        for j in 0..n {
            let expect = (j + 1) as f64 / n as f64;
            assert!(
                (s.flb_at_order(j) - expect).abs() < 1e-12,
                "order {j}: {} vs {expect}",
                s.flb_at_order(j)
            );
        }
        // tail mass above the k-th upper order statistic is exactly k/n
        for k in 1..n {
            let v = s.lb_survival_at_kth(k).unwrap();
            assert!((v - k as f64 / n as f64).abs() < 1e-12);
        }
    }

    #[test]
    fn complete_data_woodroofe_product() {
        // F_w(X_{j:n}) = prod_{i=j+1..n} exp(-1/i) when C_n = F_n
        let s = untruncated(&[0.5, 1.0, 2.0, 3.0, 4.0]);
        let n = s.n();
        for j in 1..=n {
            let expect: f64 = (-(j + 1..=n).map(|i| 1.0 / i as f64).sum::<f64>()).exp();
            assert!((s.fw_at_order(j - 1) - expect).abs() < 1e-14);
        }
    }

    #[test]
    fn matches_naive_evaluation_on_random_small_samples() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2024);
        for case in 0..1000 {
            let n = rng.random_range(1..=8);
            let pairs: Vec<(f64, f64)> = (0..n)
                .map(|_| {
                    let x: f64 = rng.random_range(0.1..10.0);
                    let y = x + rng.random_range(0.0..5.0);
                    (x, y)
                })
                .collect();
            let sample = TruncatedSample::new(pairs.clone()).unwrap();
            let s = SortedSample::new(&sample);
            // query at each order statistic, between atoms, and outside
            let mut queries: Vec<f64> = s.x_order().to_vec();
            queries.push(0.05);
            queries.push(20.0);
            for w in s.x_order().windows(2) {
                queries.push((w[0] + w[1]) / 2.0);
            }
            for &q in &queries {
                let (lb, w) = naive_products(&pairs, q);
                assert!(
                    (s.lynden_bell_cdf(q) - lb).abs() < 1e-14,
                    "case {case}: lb mismatch at {q}"
                );
                assert!(
                    (s.woodroofe_cdf(q) - w).abs() < 1e-14,
                    "case {case}: w mismatch at {q}"
                );
            }
            for (i, &x) in s.x_order().iter().enumerate() {
                assert_eq!(s.cn_count(i), naive_cn(&pairs, x));
            }
        }
    }

    #[test]
    fn estimators_are_nondecreasing_and_ordered() {
        let scheme = TruncationScheme::from_observed_fraction(0.6, 0.7, 0.25).unwrap();
        let sample = scheme.generate(400, 11).unwrap();
        let s = SortedSample::new(&sample);
        let mut prev_lb = 0.0;
        let mut prev_w = 0.0;
        for i in 0..s.n() {
            let lb = s.flb_at_order(i);
            let w = s.fw_at_order(i);
            assert!(lb >= prev_lb && w >= prev_w, "not monotone at {i}");
            assert!(lb <= w + 1e-15, "LB above Woodroofe at {i}: {lb} > {w}");
            assert!((0.0..=1.0).contains(&lb) && (0.0..=1.0).contains(&w));
            prev_lb = lb;
            prev_w = w;
        }
    }

    #[test]
    fn ties_share_the_strictly_greater_product() {
        let sample =
            TruncatedSample::new(vec![(2.0, 5.0), (2.0, 6.0), (1.0, 4.0), (3.0, 7.0)]).unwrap();
        let s = SortedSample::new(&sample);
        // both tied observations at x = 2 carry the same estimator value
        assert_eq!(s.flb_at_order(1), s.flb_at_order(2));
        assert_eq!(s.fw_at_order(1), s.fw_at_order(2));
        let (lb, w) = {
            let pairs = sample.pairs().to_vec();
            naive_products(&pairs, 2.0)
        };
        assert!((s.lynden_bell_cdf(2.0) - lb).abs() < 1e-15);
        assert!((s.woodroofe_cdf(2.0) - w).abs() < 1e-15);
    }

    #[test]
    fn empirical_counts_view() {
        let s = s3();
        let c = s.counts();
        assert_eq!(c.n(), 3);
        assert!((c.f_n(2.0) - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(c.f_n(0.5), 0.0);
        assert_eq!(c.f_n(99.0), 1.0);
        assert_eq!(c.c_n(99.0), 0.0);
        assert!(c.c_n(2.0) <= c.f_n(2.0));
    }

    proptest! {
        /// Telescoping identity on generated samples (x-values are distinct
        /// with probability one): the jump sum above X_{n-k:n} equals
        /// 1 - F_lb(X_{n-k:n}).
        #[test]
        fn telescoping_identity(seed in 0u64..500) {
            let scheme = TruncationScheme::from_observed_fraction(0.6, 0.7, 0.25).unwrap();
            let sample = scheme.generate(60, seed).unwrap();
            let s = SortedSample::new(&sample);
            let n = s.n();
            prop_assume!(n >= 2);
            for k in 1..n {
                let lhs = s.lb_survival_at_kth(k).unwrap();
                let rhs = 1.0 - s.lynden_bell_cdf(s.x_order()[n - k - 1]);
                prop_assert!((lhs - rhs).abs() < 1e-12, "k = {}: {} vs {}", k, lhs, rhs);
            }
        }
    }
}
