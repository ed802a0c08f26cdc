use std::cell::RefCell;
use std::f64::consts::TAU;
use std::sync::Arc;

use num_complex::Complex64;
use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;
use rustfft::{Fft, FftPlanner};
use serde::Serialize;

use super::fibers::PseudoPeriodicState;
use crate::error::{Error, Result};

/// Default limit on the number of cells of a two-dimensional transform.
pub const DEFAULT_CELL_CAP: u128 = 1 << 24;
/// Probabilities below this are treated as zero.
pub const PROBABILITY_FLOOR: f64 = 1e-15;

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

/// Transform with kernel `e^{+2πi jk/n}`, unnormalized.
fn plan(n: usize) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| p.borrow_mut().plan_fft_inverse(n))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct QuantumSample<O> {
    pub outcome: O,
    /// Probability of the outcome under the simulated distribution.
    pub probability: f64,
}

fn clamp_normalize(mut p: Vec<f64>) -> Vec<f64> {
    for v in p.iter_mut() {
        if *v < PROBABILITY_FLOOR {
            *v = 0.0;
        }
    }
    let total: f64 = p.iter().sum();
    for v in p.iter_mut() {
        *v /= total;
    }
    p
}

/// Outcome distribution of Fourier sampling a uniform superposition over
/// `support ⊂ [0, q)`.
pub fn fourier_distribution_1d(support: &[u64], q: u64) -> Vec<f64> {
    let mut buf = vec![Complex64::new(0.0, 0.0); q as usize];
    for &i in support {
        buf[i as usize] = Complex64::new(1.0, 0.0);
    }
    plan(q as usize).process(&mut buf);
    let scale = 1.0 / (q as f64 * support.len() as f64);
    clamp_normalize(buf.iter().map(|c| c.norm_sqr() * scale).collect())
}

/// Reusable sampler over a fixed outcome distribution.
#[derive(Clone, Debug)]
pub struct OutcomeSampler {
    probs: Vec<f64>,
    index: WeightedIndex<f64>,
}

impl OutcomeSampler {
    pub fn new(probs: Vec<f64>) -> Self {
        let index = WeightedIndex::new(&probs).expect("nonempty normalized distribution");
        Self { probs, index }
    }

    pub fn for_state(state: &PseudoPeriodicState) -> Self {
        Self::new(fourier_distribution_1d(&state.support, state.q))
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probs
    }

    pub fn sample<R: Rng>(&self, rng: &mut R) -> QuantumSample<u64> {
        let i = self.index.sample(rng);
        QuantumSample { outcome: i as u64, probability: self.probs[i] }
    }
}

/// Fourier transform over `ℤ_q` followed by measurement.
pub fn fourier_sample_1d<R: Rng>(state: &PseudoPeriodicState, rng: &mut R) -> QuantumSample<u64> {
    OutcomeSampler::for_state(state).sample(rng)
}

fn check_2d(fiber: &[(u64, u64)], a: u64, b: u64, m: u64, cap: u128) -> Result<()> {
    if fiber.is_empty() {
        return Err(Error::Precondition("empty fiber".into()));
    }
    if a != m * b {
        return Err(Error::Precondition(format!("A = {a} must equal M·B = {}", m * b)));
    }
    let cells = a as u128 * b as u128;
    if cells > cap {
        return Err(Error::MemoryCap { cells, cap });
    }
    if fiber.iter().any(|&(x, y)| x >= a || y >= b) {
        return Err(Error::Precondition("fiber outside ℤ_A × ℤ_B".into()));
    }
    Ok(())
}

/// Full outcome distribution over `ℤ_A × ℤ_B` with amplitudes
/// `Σ ω_A^{ah + Mbk}`, row-major in `h`.
pub fn fourier_distribution_2d(fiber: &[(u64, u64)], a: u64, b: u64, m: u64, cap: u128) -> Result<Vec<f64>> {
    check_2d(fiber, a, b, m, cap)?;
    let (au, bu) = (a as usize, b as usize);
    let mut grid = vec![Complex64::new(0.0, 0.0); au * bu];
    for &(x, y) in fiber {
        grid[x as usize * bu + y as usize] += Complex64::new(1.0, 0.0);
    }
    let row = plan(bu);
    for r in grid.chunks_mut(bu) {
        row.process(r);
    }
    let col = plan(au);
    let mut tmp = vec![Complex64::new(0.0, 0.0); au];
    for k in 0..bu {
        for h in 0..au {
            tmp[h] = grid[h * bu + k];
        }
        col.process(&mut tmp);
        for h in 0..au {
            grid[h * bu + k] = tmp[h];
        }
    }
    let scale = 1.0 / (a as f64 * b as f64 * fiber.len() as f64);
    Ok(clamp_normalize(grid.iter().map(|c| c.norm_sqr() * scale).collect()))
}

/// Marginal distribution of `k`, uniform when every `a` has one `b`.
fn k_marginal(by_a: &[(u64, Vec<u64>)], b: u64, total: usize) -> Vec<f64> {
    if by_a.iter().all(|(_, bs)| bs.len() == 1) {
        return vec![1.0 / b as f64; b as usize];
    }
    let mut p = vec![0.0; b as usize];
    for (k, pk) in p.iter_mut().enumerate() {
        let mut acc = 0.0;
        for (_, bs) in by_a {
            if bs.len() == 1 {
                acc += 1.0;
                continue;
            }
            let s: Complex64 = bs.iter().map(|&y| Complex64::from_polar(1.0, TAU * ((y * k as u64) % b) as f64 / b as f64)).sum();
            acc += s.norm_sqr();
        }
        *pk = acc / (b as f64 * total as f64);
    }
    clamp_normalize(p)
}

/// Fourier sampling over `ℤ_A × ℤ_B`. Draws `k` from its marginal, then `h`
/// from the conditional distribution, so only `O(A + B)` cells are live.
pub fn fourier_sample_2d<R: Rng>(
    fiber: &[(u64, u64)],
    a: u64,
    b: u64,
    m: u64,
    cap: u128,
    rng: &mut R,
) -> Result<QuantumSample<(u64, u64)>> {
    check_2d(fiber, a, b, m, cap)?;
    let mut sorted = fiber.to_vec();
    sorted.sort_unstable();
    let mut by_a: Vec<(u64, Vec<u64>)> = Vec::new();
    for (x, y) in sorted {
        match by_a.last_mut() {
            Some((last, ys)) if *last == x => ys.push(y),
            _ => by_a.push((x, vec![y])),
        }
    }
    let pk = k_marginal(&by_a, b, fiber.len());
    let k_sampler = OutcomeSampler::new(pk);
    let k = k_sampler.sample(rng);

    let mut buf = vec![Complex64::new(0.0, 0.0); a as usize];
    let mut weight = 0.0;
    for (x, ys) in &by_a {
        let v: Complex64 =
            ys.iter().map(|&y| Complex64::from_polar(1.0, TAU * ((y * k.outcome) % b) as f64 / b as f64)).sum();
        weight += v.norm_sqr();
        buf[*x as usize] = v;
    }
    plan(a as usize).process(&mut buf);
    let scale = 1.0 / (a as f64 * weight);
    let h = OutcomeSampler::new(clamp_normalize(buf.iter().map(|c| c.norm_sqr() * scale).collect())).sample(rng);
    Ok(QuantumSample { outcome: (h.outcome, k.outcome), probability: h.probability * k.probability })
}
