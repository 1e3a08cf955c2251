//! Automatic choice of the number `k*` of upper order statistics by
//! minimizing a weighted mean absolute deviation of the estimate path from
//! its running median:
//!
//! ```text
//! k* = argmin_k (1/k) * sum_{i=k_min..k} i^theta * |g(i) - median{g(k_min..k)}|
//! ```
//!
//! with `theta` in `[0, 1/2]` and ties broken to the smallest `k`. The
//! running median uses the lower-median convention for even window sizes,
//! and non-finite path entries are excluded from both medians and sums.
//! Because a short window trivially hugs its own median (a single entry
//! deviates by exactly zero), only windows covering at least a tenth of
//! the path may define the minimum; smaller `k` still win ties.
//!
//! The criterion for all `k` is evaluated in `O(K log K)` with Fenwick
//! trees over the value ranks: `sum w_i |v_i - m|` splits into prefix sums
//! of `w_i` and `w_i v_i` on either side of the median.

use crate::empirical::{ProductLimit, SortedSample};
use crate::error::{Error, Result};
use crate::estimators::{estimate_path, hill_path, EstimatePath, EstimatorKind};

/// Outcome of the minimization: the chosen `k*` and the full criterion path.
#[derive(Debug, Clone, PartialEq)]
pub struct KSelection {
    pub k_star: usize,
    /// `(k, criterion value)` for every `k` in `k_range`.
    pub criterion: Vec<(usize, f64)>,
    pub theta: f64,
    pub k_range: (usize, usize),
}

/// Fenwick trees over value ranks carrying counts, weights and weighted
/// values, for order-statistic queries on the growing prefix window.
struct RankSums {
    size: usize,
    count: Vec<usize>,
    w: Vec<f64>,
    wv: Vec<f64>,
}

impl RankSums {
    fn new(size: usize) -> Self {
        Self {
            size,
            count: vec![0; size + 1],
            w: vec![0.0; size + 1],
            wv: vec![0.0; size + 1],
        }
    }

    fn add(&mut self, slot: usize, w: f64, wv: f64) {
        let mut i = slot + 1;
        while i <= self.size {
            self.count[i] += 1;
            self.w[i] += w;
            self.wv[i] += wv;
            i += i & i.wrapping_neg();
        }
    }

    /// Sums over slots `0..end`.
    fn prefix(&self, end: usize) -> (f64, f64) {
        let mut i = end;
        let (mut w, mut wv) = (0.0, 0.0);
        while i > 0 {
            w += self.w[i];
            wv += self.wv[i];
            i -= i & i.wrapping_neg();
        }
        (w, wv)
    }

    /// Slot of the `target`-th smallest inserted element (1-based target).
    fn kth(&self, target: usize) -> usize {
        let mut pos = 0;
        let mut rem = target;
        let mut bit = self.size.next_power_of_two();
        while bit > 0 {
            let next = pos + bit;
            if next <= self.size && self.count[next] < rem {
                pos = next;
                rem -= self.count[next];
            }
            bit >>= 1;
        }
        pos
    }
}

/// Minimal number of finite estimates a window must hold before its
/// criterion value may define the minimum: a tenth of the path, and never
/// fewer than two. The running median of a shorter window says nothing
/// about where the path stabilizes.
fn window_floor(path_len: usize) -> usize {
    (path_len.div_ceil(10)).max(2)
}

/// Minimize the weighted deviation criterion over an estimate path
/// `estimates[i] = g(k_min + i)`.
pub fn reiss_thomas_select(estimates: &[f64], k_min: usize, theta: f64) -> Result<KSelection> {
    if estimates.is_empty() {
        return Err(Error::EmptyPath);
    }
    if estimates.len() < 3 {
        return Err(Error::InvalidParameter {
            name: "path",
            reason: format!("need at least 3 path entries, got {}", estimates.len()),
        });
    }
    if k_min < 1 {
        return Err(Error::InvalidParameter {
            name: "k_min",
            reason: "must be at least 1".to_string(),
        });
    }
    if !(0.0..=0.5).contains(&theta) {
        return Err(Error::InvalidParameter {
            name: "theta",
            reason: format!("must lie in [0, 1/2], got {theta}"),
        });
    }

    // rank the finite entries once; ties resolved by path position
    let mut order: Vec<usize> = (0..estimates.len())
        .filter(|&i| estimates[i].is_finite())
        .collect();
    if order.is_empty() {
        return Err(Error::AllDegenerate);
    }
    order.sort_by(|&a, &b| {
        estimates[a]
            .partial_cmp(&estimates[b])
            .expect("finite entries compare")
            .then(a.cmp(&b))
    });
    let slot_value: Vec<f64> = order.iter().map(|&i| estimates[i]).collect();
    let mut slot_of = vec![usize::MAX; estimates.len()];
    for (slot, &i) in order.iter().enumerate() {
        slot_of[i] = slot;
    }

    let mut sums = RankSums::new(order.len());
    let mut inserted = 0usize;
    let mut criterion = Vec::with_capacity(estimates.len());
    let mut window_sizes = Vec::with_capacity(estimates.len());
    for (idx, &v) in estimates.iter().enumerate() {
        let k = k_min + idx;
        if v.is_finite() {
            let w = (k as f64).powf(theta);
            sums.add(slot_of[idx], w, w * v);
            inserted += 1;
        }
        let value = if inserted == 0 {
            // nothing to deviate from yet; never selected
            f64::INFINITY
        } else {
            let med_slot = sums.kth(inserted.div_ceil(2));
            let median = slot_value[med_slot];
            // split strictly below / strictly above the median value, so
            // entries tied with the median contribute exactly zero
            let below = slot_value.partition_point(|&v| v < median);
            let above = slot_value.partition_point(|&v| v <= median);
            let (w_lt, wv_lt) = sums.prefix(below);
            let (w_le, wv_le) = sums.prefix(above);
            let (w_tot, wv_tot) = sums.prefix(order.len());
            let deviation =
                (median * w_lt - wv_lt) + ((wv_tot - wv_le) - median * (w_tot - w_le));
            deviation.max(0.0) / k as f64
        };
        criterion.push((k, value));
        window_sizes.push(inserted);
    }

    // A window with a single estimate deviates from its own median by
    // exactly zero, so letting it define the minimum would pin the
    // selection at the first k unconditionally; short windows in general
    // can look deceptively flat while sitting far from the stable part of
    // the path. Only windows holding at least `min_window` finite
    // estimates can set the minimal value; earlier k that attain the same
    // value still win the smallest-k tie-break (a constant path therefore
    // selects k_min).
    let min_window = window_floor(estimates.len());
    let selectable = |idx: usize| {
        estimates[idx].is_finite() && criterion[idx].1.is_finite() && window_sizes[idx] >= 1
    };
    let minimum = (0..estimates.len())
        .filter(|&idx| selectable(idx) && window_sizes[idx] >= min_window)
        .map(|idx| criterion[idx].1)
        .fold(f64::INFINITY, f64::min);
    let k_star = if minimum.is_finite() {
        (0..estimates.len())
            .find(|&idx| selectable(idx) && criterion[idx].1 == minimum)
            .map(|idx| k_min + idx)
            .expect("the minimizing window itself matches")
    } else {
        // fewer than two finite estimates in the whole path: fall back to
        // the first usable k
        (0..estimates.len())
            .find(|&idx| selectable(idx))
            .map(|idx| k_min + idx)
            .ok_or(Error::AllDegenerate)?
    };
    Ok(KSelection {
        k_star,
        criterion,
        theta,
        k_range: (k_min, k_min + estimates.len() - 1),
    })
}

/// Build the full `k`-path for one estimator and run the minimization on it.
///
/// Applies to the single-path estimators (`lb`, `w`, `hill`); the ratio and
/// fixed-threshold estimators have no single `k`-path to select over.
pub fn select_k_for(s: &SortedSample, kind: EstimatorKind, theta: f64) -> Result<KSelection> {
    if s.n() < 5 {
        return Err(Error::InvalidParameter {
            name: "sample",
            reason: format!("threshold selection needs n >= 5, got {}", s.n()),
        });
    }
    let path = path_for(s, kind)?;
    reiss_thomas_select(path.estimates(), path.k_min(), theta)
}

/// The all-`k` estimate path backing [`select_k_for`].
pub fn path_for(s: &SortedSample, kind: EstimatorKind) -> Result<EstimatePath> {
    match kind {
        EstimatorKind::LyndenBell => estimate_path(s, ProductLimit::LyndenBell),
        EstimatorKind::Woodroofe => estimate_path(s, ProductLimit::Woodroofe),
        EstimatorKind::Hill => hill_path(s.x_order()),
        EstimatorKind::WormsFixed | EstimatorKind::Ratio => Err(Error::InvalidParameter {
            name: "estimator",
            reason: format!("`{kind}` has no single k-path to select over"),
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{TruncatedSample, TruncationScheme};
    use proptest::prelude::*;

    /// Brute-force criterion, straight from the definition.
    fn naive_criterion(estimates: &[f64], k_min: usize, theta: f64) -> Vec<f64> {
        (0..estimates.len())
            .map(|idx| {
                let k = k_min + idx;
                let mut window: Vec<f64> = estimates[..=idx]
                    .iter()
                    .copied()
                    .filter(|v| v.is_finite())
                    .collect();
                if window.is_empty() {
                    return f64::INFINITY;
                }
                window.sort_by(|a, b| a.partial_cmp(b).unwrap());
                let median = window[(window.len() - 1) / 2];
                let sum: f64 = estimates[..=idx]
                    .iter()
                    .enumerate()
                    .filter(|(_, v)| v.is_finite())
                    .map(|(i, &v)| ((k_min + i) as f64).powf(theta) * (v - median).abs())
                    .sum();
                sum / k as f64
            })
            .collect()
    }

    fn naive_k_star(estimates: &[f64], k_min: usize, theta: f64) -> usize {
        let crit = naive_criterion(estimates, k_min, theta);
        let window: Vec<usize> = (0..estimates.len())
            .map(|idx| {
                estimates[..=idx]
                    .iter()
                    .filter(|v| v.is_finite())
                    .count()
            })
            .collect();
        let min_window = (estimates.len().div_ceil(10)).max(2);
        let selectable =
            |idx: usize| estimates[idx].is_finite() && crit[idx].is_finite() && window[idx] >= 1;
        let minimum = (0..estimates.len())
            .filter(|&idx| selectable(idx) && window[idx] >= min_window)
            .map(|idx| crit[idx])
            .fold(f64::INFINITY, f64::min);
        if minimum.is_finite() {
            (0..estimates.len())
                .find(|&idx| selectable(idx) && crit[idx] == minimum)
                .map(|idx| k_min + idx)
                .unwrap()
        } else {
            (0..estimates.len())
                .find(|&idx| selectable(idx))
                .map(|idx| k_min + idx)
                .unwrap()
        }
    }

    #[test]
    fn constant_path_selects_k_min() {
        let path = vec![0.7; 20];
        let sel = reiss_thomas_select(&path, 2, 0.3).unwrap();
        assert_eq!(sel.k_star, 2);
        assert!(sel.criterion.iter().all(|&(_, c)| c == 0.0));
        assert_eq!(sel.k_range, (2, 21));
    }

    #[test]
    fn worked_small_path_against_brute_force() {
        let path = [1.0, 1.0, 1.0, 5.0, 9.0];
        let sel = reiss_thomas_select(&path, 2, 0.3).unwrap();
        assert_eq!(sel.k_star, naive_k_star(&path, 2, 0.3));
        let naive = naive_criterion(&path, 2, 0.3);
        for (i, &(k, c)) in sel.criterion.iter().enumerate() {
            assert_eq!(k, 2 + i);
            assert!(
                (c - naive[i]).abs() <= 1e-12 * naive[i].max(1.0),
                "k = {k}: {c} vs naive {}",
                naive[i]
            );
        }
        // the flat prefix keeps the criterion at zero, so the selection
        // stays at the smallest k
        assert_eq!(sel.k_star, 2);
    }

    #[test]
    fn theta_zero_is_plain_mean_absolute_deviation() {
        let path = [0.5, 0.9, 0.4, 0.8, 1.4, 0.2, 0.6];
        let sel = reiss_thomas_select(&path, 2, 0.0).unwrap();
        // at the last k: median of all 7 values (lower = actual middle)
        let mut sorted = path;
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let median = sorted[3];
        let k_last = 8;
        let expect: f64 =
            path.iter().map(|&v| (v - median).abs()).sum::<f64>() / k_last as f64;
        let &(k, c) = sel.criterion.last().unwrap();
        assert_eq!(k, k_last);
        assert!((c - expect).abs() < 1e-14);
    }

    #[test]
    fn lower_median_convention_on_even_windows() {
        // after two entries the window is {1.0, 2.0}: lower median is 1.0,
        // so the deviation sum is 3^theta * |2.0 - 1.0| with theta = 0
        let path = [1.0, 2.0, 2.0, 2.0];
        let sel = reiss_thomas_select(&path, 2, 0.0).unwrap();
        let c_at_3 = sel.criterion[1].1;
        assert!((c_at_3 - 1.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn non_finite_entries_are_excluded() {
        let path = [f64::NAN, 1.0, 1.0, f64::INFINITY, 1.0, 1.0];
        let sel = reiss_thomas_select(&path, 2, 0.3).unwrap();
        // all finite entries are equal, so every criterion that has data is 0
        assert!(sel
            .criterion
            .iter()
            .skip(1)
            .all(|&(_, c)| c == 0.0));
        // k = 2 itself is degenerate so the first selectable k is 3
        assert_eq!(sel.k_star, 3);
    }

    #[test]
    fn all_degenerate_path_errors() {
        let path = [f64::NAN, f64::NAN, f64::NAN];
        assert!(matches!(
            reiss_thomas_select(&path, 2, 0.3),
            Err(Error::AllDegenerate)
        ));
    }

    #[test]
    fn path_validation() {
        assert!(matches!(
            reiss_thomas_select(&[], 2, 0.3),
            Err(Error::EmptyPath)
        ));
        assert!(reiss_thomas_select(&[1.0, 2.0], 2, 0.3).is_err());
        assert!(reiss_thomas_select(&[1.0, 2.0, 3.0], 2, 0.7).is_err());
        assert!(reiss_thomas_select(&[1.0, 2.0, 3.0], 2, -0.1).is_err());
        assert!(reiss_thomas_select(&[1.0, 2.0, 3.0], 0, 0.3).is_err());
    }

    #[test]
    fn determinism_and_tie_break() {
        let path = vec![0.42; 30];
        let a = reiss_thomas_select(&path, 2, 0.25).unwrap();
        let b = reiss_thomas_select(&path, 2, 0.25).unwrap();
        assert_eq!(a, b);

        // perturbing the last entry upward never moves the selection past
        // the unperturbed choice
        let mut bumped = path.clone();
        *bumped.last_mut().unwrap() += 0.5;
        let sel = reiss_thomas_select(&bumped, 2, 0.25).unwrap();
        assert!(sel.k_star <= a.k_star);
    }

    #[test]
    fn select_k_for_validates() {
        let sample = TruncatedSample::new(vec![(1.0, 2.0), (3.0, 4.0), (2.0, 5.0)]).unwrap();
        let s = SortedSample::new(&sample);
        assert!(select_k_for(&s, EstimatorKind::LyndenBell, 0.3).is_err());

        let scheme = TruncationScheme::from_observed_fraction(0.6, 0.9, 0.25).unwrap();
        let s = SortedSample::new(&scheme.generate(50, 4).unwrap());
        assert!(select_k_for(&s, EstimatorKind::Ratio, 0.3).is_err());
        assert!(select_k_for(&s, EstimatorKind::WormsFixed, 0.3).is_err());
        let sel = select_k_for(&s, EstimatorKind::LyndenBell, 0.3).unwrap();
        assert!(sel.k_star >= 2 && sel.k_star <= s.n() - 1);
        assert_eq!(sel.criterion.len(), s.n() - 2);
    }

    #[test]
    fn untruncated_lb_and_hill_select_the_same_k() {
        // with no truncation the LB path coincides with the Hill path, so
        // the minimization must land on the same k
        let mut xs = Vec::new();
        let mut state = 11u64;
        for _ in 0..200 {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            let u = ((state >> 11) as f64 + 1.0) / (1u64 << 53) as f64;
            xs.push(u.powf(-0.6));
        }
        let top = 2.0 * xs.iter().cloned().fold(f64::MIN, f64::max);
        let sample = TruncatedSample::new(xs.iter().map(|&x| (x, top)).collect()).unwrap();
        let s = SortedSample::new(&sample);
        let lb = select_k_for(&s, EstimatorKind::LyndenBell, 0.3).unwrap();
        let hill = select_k_for(&s, EstimatorKind::Hill, 0.3).unwrap();
        assert_eq!(lb.k_star, hill.k_star);
    }

    proptest! {
        /// The Fenwick evaluation agrees with the brute-force one on random
        /// paths: identical k*, criterion equal to floating-point noise.
        #[test]
        fn fast_matches_naive(
            path in prop::collection::vec(0.01f64..10.0, 3..50),
            theta in 0.0f64..0.5,
        ) {
            let sel = reiss_thomas_select(&path, 2, theta).unwrap();
            prop_assert_eq!(sel.k_star, naive_k_star(&path, 2, theta));
            let naive = naive_criterion(&path, 2, theta);
            for (i, &(_, c)) in sel.criterion.iter().enumerate() {
                prop_assert!(
                    (c - naive[i]).abs() <= 1e-12 * naive[i].max(1.0),
                    "idx {}: {} vs {}", i, c, naive[i]
                );
            }
        }

        /// Sparse degeneracies do not derail the selection.
        #[test]
        fn fast_matches_naive_with_gaps(
            mut path in prop::collection::vec(0.01f64..10.0, 5..40),
            gap_at in 0usize..5,
        ) {
            let gap = gap_at.min(path.len() - 1);
            path[gap] = f64::NAN;
            let sel = reiss_thomas_select(&path, 2, 0.3).unwrap();
            prop_assert_eq!(sel.k_star, naive_k_star(&path, 2, 0.3));
        }
    }
}
