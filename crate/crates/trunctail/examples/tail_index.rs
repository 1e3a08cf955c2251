//! Estimate the tail index of a truncated sample with every estimator in
//! the crate and attach a confidence interval to the main one.
//!
//! Run with `cargo run --example tail_index`.

use trunctail::empirical::SortedSample;
use trunctail::estimators::{
    asymptotic_sigma2, confidence_interval, hill_estimator, hill_path, lb_tail_index,
    ratio_tail_index, woodroofe_tail_index, worms_fixed_threshold, EstimatorKind,
};
use trunctail::select::{reiss_thomas_select, select_k_for};
use trunctail::models::TruncationScheme;

fn main() {
    let gamma1 = 0.6;
    let p = 0.9;
    let scheme = TruncationScheme::from_observed_fraction(gamma1, p, 0.25).unwrap();
    let sample = scheme.generate(5000, 42).unwrap();
    let sorted = SortedSample::new(&sample);
    let n = sorted.n();
    println!("true gamma1 = {gamma1}; n = {n} observed of N = 5000 latent\n");

    // random-threshold integral estimators with automatic k
    for kind in [EstimatorKind::LyndenBell, EstimatorKind::Woodroofe] {
        let sel = select_k_for(&sorted, kind, 0.3).unwrap();
        let est = match kind {
            EstimatorKind::LyndenBell => lb_tail_index(&sorted, sel.k_star).unwrap(),
            _ => woodroofe_tail_index(&sorted, sel.k_star).unwrap(),
        };
        println!(
            "{:<12} gamma1_hat = {:.4}   (k* = {}, threshold = {:.3})",
            kind.to_string(),
            est.gamma1,
            sel.k_star,
            est.threshold
        );
    }

    // plain Hill on the observed x-values estimates the index of the
    // *observed* tail, which truncation drags below gamma1
    let sel = select_k_for(&sorted, EstimatorKind::Hill, 0.3).unwrap();
    let hill = hill_estimator(sorted.x_order(), sel.k_star).unwrap();
    println!("{:<12} gamma_hat  = {hill:.4}   (k* = {}, biased low by design)", "hill", sel.k_star);

    // the ratio estimator undoes that bias through the y-sample
    let y_path = hill_path(&sample.ys()).unwrap();
    let k_y = reiss_thomas_select(y_path.estimates(), y_path.k_min(), 0.3).unwrap().k_star;
    let ratio = ratio_tail_index(&sample, sel.k_star, k_y).unwrap();
    println!("{:<12} gamma1_hat = {:.4}   (k_x = {}, k_y = {k_y})", "ratio", ratio.gamma1, sel.k_star);

    // fixed threshold at the 10% upper quantile of the observed x
    let t = sorted.x_order()[n - n / 10 - 1];
    let fixed = worms_fixed_threshold(&sorted, t).unwrap();
    println!("{:<12} gamma1_hat = {:.4}   (t = {t:.3}, {} exceedances)", "worms-fixed", fixed.gamma1, n / 10);

    // confidence interval for the Lynden-Bell estimate with the plug-in
    // variance: gamma2 from Hill on the y-sample
    let sel = select_k_for(&sorted, EstimatorKind::LyndenBell, 0.3).unwrap();
    let est = lb_tail_index(&sorted, sel.k_star).unwrap();
    let gamma2_hat = y_path.at(k_y).unwrap();
    let sigma2 = asymptotic_sigma2(est.gamma1, gamma2_hat).unwrap();
    let ci = confidence_interval(&est, sigma2, 0.95).unwrap();
    println!(
        "\nlb with plug-in variance: gamma2_hat = {gamma2_hat:.3}, sigma2 = {sigma2:.4}, \
         95% ci = [{:.4}, {:.4}]",
        ci.lower, ci.upper
    );
}
