//! Tail-index estimation for randomly right-truncated heavy-tailed data.
//!
//! In the random right-truncation model a pair `(X, Y)` of independent
//! heavy-tailed variables is observed only when `X <= Y`, which biases the
//! observed x-values toward small magnitudes and makes the ordinary Hill
//! estimator inconsistent for the tail index of `X`. This crate implements
//! the product-limit route around that problem:
//!
//! - [`models`]: Burr-type models, exact inverse-transform sampling and the
//!   truncated data-generating process;
//! - [`empirical`]: order-statistics machinery, the Lynden-Bell and
//!   Woodroofe product-limit estimators of the distribution function,
//!   evaluated at all order statistics in one pass;
//! - [`estimators`]: the random-threshold Lynden-Bell integral estimator of
//!   the tail index and its Woodroofe, fixed-threshold, Hill and ratio
//!   competitors, with asymptotic variance and confidence intervals;
//! - [`select`]: automatic choice of the number of upper order statistics
//!   by weighted deviation from the running median of the estimate path;
//! - [`simulate`]: a deterministic, parallel Monte Carlo harness that
//!   aggregates absolute bias and rmse into summary tables;
//! - [`cli`]: the `trunctail` command-line tool built from the above.
//!
//! # Quick start
//!
//! ```
//! use trunctail::empirical::SortedSample;
//! use trunctail::estimators::{lb_tail_index, EstimatorKind};
//! use trunctail::models::TruncationScheme;
//! use trunctail::select::select_k_for;
//!
//! // 10% of latent pairs are truncated away (p = 0.9)
//! let scheme = TruncationScheme::from_observed_fraction(0.6, 0.9, 0.25).unwrap();
//! let sample = scheme.generate(1000, 42).unwrap();
//! let sorted = SortedSample::new(&sample);
//! let k = select_k_for(&sorted, EstimatorKind::LyndenBell, 0.3).unwrap().k_star;
//! let estimate = lb_tail_index(&sorted, k).unwrap();
//! assert!((estimate.gamma1 - 0.6).abs() < 0.25);
//! ```
//!
//! The runnable programs under `examples/` walk through each capability;
//! `cargo run --example tail_index` is the natural starting point.

pub mod cli;
pub mod empirical;
pub mod error;
pub mod estimators;
pub mod models;
pub mod select;
pub mod simulate;

pub use error::{Error, Result};
