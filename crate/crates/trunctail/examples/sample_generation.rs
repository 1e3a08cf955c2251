//! Generate a right-truncated sample and inspect the data-generating
//! process: observed fraction vs the nominal one, survival/quantile
//! round trips, and the second-order parameter of the model.
//!
//! Run with `cargo run --example sample_generation`.

use trunctail::models::{solve_gamma2, TruncationScheme};

fn main() {
    let gamma1 = 0.6;
    let p = 0.7;
    let delta = 0.25;
    let scheme = TruncationScheme::from_observed_fraction(gamma1, p, delta).unwrap();

    println!("truncation scheme:");
    println!("  gamma1 = {gamma1}, p = {p}, delta = {delta}");
    println!("  solved gamma2 = {:.6}", solve_gamma2(gamma1, p).unwrap());
    println!("  normality condition gamma1 < gamma2: {}", scheme.normality_valid());
    println!(
        "  second-order tau of the observed marginal: {:.2}",
        scheme.f().second_order_tau()
    );

    let sample = scheme.generate(2000, 42).unwrap();
    println!("\ngenerated N = 2000 latent pairs, kept n = {}", sample.n());
    println!(
        "  observed fraction {:.4} vs nominal p = {p}",
        sample.observed_fraction().unwrap()
    );

    println!("\nfirst observed pairs (x <= y always):");
    for &(x, y) in sample.pairs().iter().take(5) {
        println!("  ({x:10.4}, {y:10.4})");
    }

    // quantile and survival are mutual inverses
    let m = scheme.f();
    println!("\nsurvival(quantile(u)) round trips:");
    for u in [0.5, 0.05, 1e-4] {
        let x = m.quantile(u).unwrap();
        println!("  u = {u:<8} -> x = {x:12.4} -> survival = {:.10}", m.survival(x).unwrap());
    }
}
