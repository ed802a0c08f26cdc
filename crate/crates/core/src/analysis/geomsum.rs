use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use rand::seq::index::sample;
use rand::Rng;
use serde::Serialize;
use serde_json::json;

use super::bounds::sinc;
use super::stats::BoundReport;
use crate::error::{Error, Result};
use crate::rng::{derive_rng, stream};

/// Slack used when comparing the two sides of the inequality.
const SLACK: f64 = 1e-9;

/// `ω^{δj + θ_j}` summed over `j ∈ 𝒥`, with `ω = e^{2πi/n}`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GeomSumInstance {
    pub n: u64,
    pub delta: f64,
    /// Sorted distinct indices in `[0, n)`.
    pub j_set: Vec<u64>,
    /// `θ_j`, aligned with `j_set`.
    pub theta: Vec<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum SubsetKind {
    Prefix,
    Random,
}

fn min_subset(n: u64, delta: f64) -> f64 {
    n as f64 * (1.0 - sinc(delta)) / (1.0 - 2.0 * (PI / 32.0).sin())
}

impl GeomSumInstance {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Precondition(m.to_string()));
        if self.n < 2 {
            return bad("n must be at least 2");
        }
        if !(self.delta.abs() < 1.0) {
            return bad("|δ| must be below 1");
        }
        if self.j_set.len() != self.theta.len() || self.j_set.is_empty() {
            return bad("𝒥 and θ must be nonempty and aligned");
        }
        if self.j_set.windows(2).any(|w| w[0] >= w[1]) || *self.j_set.last().unwrap() >= self.n {
            return bad("𝒥 must be sorted, distinct and inside [0, n)");
        }
        if self.theta.iter().any(|t| !(t.abs() <= self.n as f64 / 32.0)) {
            return bad("|θ_j| exceeds n/32");
        }
        if (self.j_set.len() as f64) < min_subset(self.n, self.delta) {
            return bad("𝒥 is smaller than n(1 − c_δ)/(1 − 2 sin(π/32))");
        }
        Ok(())
    }
}

pub fn geomsum_lhs(inst: &GeomSumInstance) -> Result<f64> {
    inst.validate()?;
    let n = inst.n as f64;
    let s: Complex64 = inst
        .j_set
        .iter()
        .zip(&inst.theta)
        .map(|(&j, &t)| Complex64::from_polar(1.0, TAU * (inst.delta * j as f64 + t) / n))
        .sum();
    Ok(s.norm_sqr() / (inst.j_set.len() as f64).powi(2))
}

pub fn geomsum_rhs(inst: &GeomSumInstance) -> Result<f64> {
    inst.validate()?;
    let c = sinc(inst.delta);
    let v = 1.0 - 2.0 * (PI / 32.0).sin() - (1.0 - c) * inst.n as f64 / inst.j_set.len() as f64;
    Ok(v * v)
}

/// A random admissible instance with `n ∈ [2, n_max]`.
pub fn random_instance<R: Rng>(rng: &mut R, n_max: u64, kind: SubsetKind) -> GeomSumInstance {
    loop {
        let n = rng.random_range(2..=n_max.max(2));
        let delta = rng.random_range(-0.999..0.999);
        let need = min_subset(n, delta).ceil().max(1.0) as u64;
        if need > n {
            continue;
        }
        let size = rng.random_range(need..=n);
        let mut j_set: Vec<u64> = match kind {
            SubsetKind::Prefix => (0..size).collect(),
            SubsetKind::Random => sample(rng, n as usize, size as usize).into_iter().map(|i| i as u64).collect(),
        };
        j_set.sort_unstable();
        let bound = n as f64 / 32.0;
        let theta = j_set.iter().map(|_| rng.random_range(-bound..=bound)).collect();
        return GeomSumInstance { n, delta, j_set, theta };
    }
}

/// Deterministic grid `δ ∈ {0, 0.1, …, 0.9}` with prefix and random subsets
/// of the minimum admissible size, then `trials` random instances.
pub fn geomsum_sweep(trials: u64, seed: u64) -> Result<BoundReport> {
    let mut violations = 0u64;
    let mut worst = f64::INFINITY;
    let mut check = |inst: &GeomSumInstance| -> Result<()> {
        let gap = geomsum_lhs(inst)? - geomsum_rhs(inst)?;
        worst = worst.min(gap);
        if gap < -SLACK {
            violations += 1;
        }
        Ok(())
    };
    let mut rng = derive_rng(seed, stream::SWEEP, 0);
    let mut checked = 0u64;
    for n in [2u64, 16, 256, 1000] {
        for k in 0..10 {
            let delta = k as f64 / 10.0;
            let need = min_subset(n, delta).ceil().max(1.0) as u64;
            if need > n {
                continue;
            }
            for kind in [SubsetKind::Prefix, SubsetKind::Random] {
                for zero_theta in [true, false] {
                    let j_set: Vec<u64> = match kind {
                        SubsetKind::Prefix => (0..need).collect(),
                        SubsetKind::Random => {
                            let mut v: Vec<u64> =
                                sample(&mut rng, n as usize, need as usize).into_iter().map(|i| i as u64).collect();
                            v.sort_unstable();
                            v
                        }
                    };
                    let b = n as f64 / 32.0;
                    let theta = j_set.iter().map(|_| if zero_theta { 0.0 } else { rng.random_range(-b..=b) }).collect();
                    check(&GeomSumInstance { n, delta, j_set, theta })?;
                    checked += 1;
                }
            }
        }
    }
    for t in 0..trials {
        let mut rng = derive_rng(seed, stream::SWEEP, t + 1);
        let kind = if t % 2 == 0 { SubsetKind::Random } else { SubsetKind::Prefix };
        check(&random_instance(&mut rng, 512, kind))?;
        checked += 1;
    }
    Ok(BoundReport {
        formula: "geomsum".into(),
        inputs: json!({ "random_instances": trials, "seed": seed, "violations": violations, "min_gap": worst }),
        analytic: 0.0,
        empirical: violations as f64,
        trials: checked,
        verdict: violations == 0,
        test: None,
    })
}
