use serde::Serialize;
use statrs::distribution::{Binomial, DiscreteCDF};

/// Confidence level of the one-sided tests.
pub const CONFIDENCE: f64 = 0.99;

/// One-sided test of `H0: p ≥ bound`; fails only when the observed count is
/// implausibly low.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BinomialTest {
    pub successes: u64,
    pub trials: u64,
    pub bound: f64,
    /// `Pr(X ≤ successes)` when `p = bound`.
    pub p_value: f64,
    pub pass: bool,
}

pub fn one_sided_binomial(successes: u64, trials: u64, bound: f64) -> BinomialTest {
    let p = bound.clamp(0.0, 1.0);
    let p_value = if trials == 0 {
        1.0
    } else {
        Binomial::new(p, trials).expect("valid binomial").cdf(successes)
    };
    BinomialTest { successes, trials, bound, p_value, pass: p_value >= 1.0 - CONFIDENCE }
}

/// Comparison of an empirical rate against an analytic lower bound.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundReport {
    pub formula: String,
    pub inputs: serde_json::Value,
    pub analytic: f64,
    pub empirical: f64,
    pub trials: u64,
    pub verdict: bool,
    pub test: Option<BinomialTest>,
}
