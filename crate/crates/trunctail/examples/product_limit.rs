//! Compare the Lynden-Bell and Woodroofe product-limit estimators of the
//! distribution function on a truncated sample, and show the complete-data
//! reduction to the empirical distribution function.
//!
//! Run with `cargo run --example product_limit`.

use trunctail::empirical::SortedSample;
use trunctail::models::{TruncatedSample, TruncationScheme};

fn main() {
    let scheme = TruncationScheme::from_observed_fraction(0.6, 0.7, 0.25).unwrap();
    let sample = scheme.generate(40, 7).unwrap();
    let s = SortedSample::new(&sample);
    let n = s.n();

    // model distribution function of the *truncated* marginal is not F
    // itself, so the estimators recover the latent df, not the empirical one
    println!("n = {n} observed pairs; estimators at every 4th order statistic:");
    println!("{:>4} {:>10} {:>8} {:>10} {:>10} {:>10}", "i", "x", "nC_n", "F_lb", "F_w", "F_emp");
    for i in (0..n).step_by(4) {
        println!(
            "{:>4} {:>10.4} {:>8} {:>10.5} {:>10.5} {:>10.5}",
            i + 1,
            s.x_order()[i],
            s.cn_count(i),
            s.flb_at_order(i),
            s.fw_at_order(i),
            (i + 1) as f64 / n as f64,
        );
    }
    println!("\nnote: F_lb <= F_w everywhere (1 - t <= exp(-t) factor by factor)");

    let k = n / 3;
    println!(
        "\ntail mass above X_{{n-k:n}} by the jump sum (k = {k}): {:.5}",
        s.lb_survival_at_kth(k).unwrap()
    );
    println!(
        "telescoped 1 - F_lb(X_{{n-k:n}}):                    {:.5}",
        1.0 - s.lynden_bell_cdf(s.x_order()[n - k - 1])
    );

    // with no truncation both estimators collapse onto the empirical df
    let xs: Vec<f64> = sample.pairs().iter().map(|&(x, _)| x).collect();
    let top = 2.0 * xs.iter().cloned().fold(f64::MIN, f64::max);
    let complete = TruncatedSample::new(xs.iter().map(|&x| (x, top)).collect()).unwrap();
    let c = SortedSample::new(&complete);
    println!("\nsame x-values with truncation removed (all y above max x):");
    println!("{:>4} {:>10} {:>10} {:>10}", "i", "F_lb", "F_w", "i/n");
    for i in (0..n).step_by(8) {
        println!(
            "{:>4} {:>10.5} {:>10.5} {:>10.5}",
            i + 1,
            c.flb_at_order(i),
            c.fw_at_order(i),
            (i + 1) as f64 / n as f64,
        );
    }
    println!("F_lb now equals i/n exactly; F_w only up to O(1/j) in the rank");
}
