use num_integer::Integer;
use rand::Rng;
use serde_json::json;

use super::stats::{one_sided_binomial, BoundReport};
use crate::error::{Error, Result};
use crate::fixedpoint::ScaledReal;

/// `Σ_p 1/p²` over primes, to ten places.
pub const PRIME_RECIPROCAL_SQUARES: f64 = 0.4522474200;

/// Exact coprime probability for pairs from `{1, …, n}²`.
pub fn coprime_exact(n: u64) -> ScaledReal {
    let mut hits = 0u64;
    for a in 1..=n {
        for b in 1..=n {
            if a.gcd(&b) == 1 {
                hits += 1;
            }
        }
    }
    ScaledReal::ratio(hits, n * n)
}

/// Monte Carlo frequency of `gcd(a, b) = 1` for uniform `a, b ∈ {1, …, n}`.
/// Passes when the frequency is at least 1/2 and consistent with the floor
/// `1 − Σ 1/p²`.
pub fn coprime_experiment<R: Rng>(n: u64, trials: u64, rng: &mut R) -> Result<BoundReport> {
    if n == 0 || trials < 10_000 {
        return Err(Error::Precondition("need n ≥ 1 and at least 10^4 trials".into()));
    }
    let hits = (0..trials)
        .filter(|_| {
            let a = rng.random_range(1..=n);
            let b = rng.random_range(1..=n);
            a.gcd(&b) == 1
        })
        .count() as u64;
    let floor = 1.0 - PRIME_RECIPROCAL_SQUARES;
    let test = one_sided_binomial(hits, trials, floor);
    let empirical = hits as f64 / trials as f64;
    Ok(BoundReport {
        formula: "coprime".into(),
        inputs: json!({ "n": n }),
        analytic: floor,
        empirical,
        trials,
        verdict: empirical >= 0.5 && test.pass,
        test: Some(test),
    })
}
