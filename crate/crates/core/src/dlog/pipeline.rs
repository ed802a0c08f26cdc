use std::collections::HashMap;

use num_traits::ToPrimitive;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::combine::{combine_samples, Combination};
use super::params::{multiplier_bound, required_epsilon, select_params, DlogParams, KFilter};
use crate::error::{Error, Result};
use crate::fixedpoint::ScaledReal;
use crate::group::{choose_precision, choose_precision_dlog, DlogEvaluator, HEvaluator, ShiftedGrid};
use crate::infra::Infrastructure;
use crate::period::{circumference_pipeline, CircumferenceConfig};
use crate::qsampler::{build_fibers_2d, fourier_distribution_2d, fourier_sample_2d, FiberTable, QuantumSample, DEFAULT_CELL_CAP};
use crate::rng::{derive_rng, derive_seed, stream, SimRng};

const DEFAULT_MAX_TRIALS: u64 = 10_000;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DlogConfig {
    /// Accuracy of the refined output.
    pub delta: ScaledReal,
    /// Target probability of a good shift.
    pub p_g: ScaledReal,
    /// A circumference estimate to use instead of running the pipeline.
    pub r_hat: Option<ScaledReal>,
    /// Accuracy of `r_hat`; defaults to the required bound.
    pub r_hat_epsilon: Option<ScaledReal>,
    /// Overrides the convergent denominator `q` in `N = q ⌈2/d_min⌉`.
    pub q_override: Option<u64>,
    pub k_filter: KFilter,
    pub max_trials: Option<u64>,
    pub shift_failures: u64,
    pub cell_cap: u128,
    pub seed: u64,
    pub keep_trace: bool,
    /// Skip neighbourhood refinement and report the raw estimate.
    pub skip_refinement: bool,
}

impl Default for DlogConfig {
    fn default() -> Self {
        Self {
            delta: ScaledReal::ratio(1, 1000),
            p_g: ScaledReal::ratio(1, 2),
            r_hat: None,
            r_hat_epsilon: None,
            q_override: None,
            k_filter: KFilter::Auto,
            max_trials: None,
            shift_failures: 64,
            cell_cap: DEFAULT_CELL_CAP,
            seed: 0,
            keep_trace: false,
            skip_refinement: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DlogTrial {
    pub index: u64,
    pub shift_index: u64,
    pub shift: u64,
    pub samples: [(u64, u64); 2],
    pub fiber_sizes: [usize; 2],
    /// Both `k` passed the filter.
    pub admitted: bool,
    pub combination: Option<Combination>,
    pub refined: Option<ScaledReal>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DlogResult {
    /// Output of the recombination, within 1 of the distance.
    pub d_hat: ScaledReal,
    /// Neighbourhood-refined distance, within `δ` when refinement ran.
    pub refined: Option<ScaledReal>,
    pub samples: [(u64, u64); 2],
    pub s: i128,
    pub t: i128,
    pub r: ScaledReal,
    pub trials: u64,
    pub shifts_used: u64,
    pub params: DlogParams,
    pub trace: Vec<DlogTrial>,
}

struct ShiftState {
    index: u64,
    grid: ShiftedGrid,
    table: FiberTable<(u64, i64)>,
}

pub struct DlogRun<'a, I: Infrastructure> {
    infra: &'a I,
    x: I::Element,
    cfg: DlogConfig,
    params: DlogParams,
    ev: DlogEvaluator<'a, I>,
    refiner: HEvaluator<'a, I>,
    k_max: u64,
    max_trials: u64,
}

fn has_three_elements<I: Infrastructure>(infra: &I) -> bool {
    let x0 = infra.origin();
    let x1 = infra.bs(&x0);
    x1 != x0 && infra.bs(&x1) != x0
}

impl<'a, I: Infrastructure> DlogRun<'a, I> {
    pub fn new(infra: &'a I, x: I::Element, cfg: DlogConfig) -> Result<Self> {
        let p = infra.params();
        p.validate()?;
        if !has_three_elements(infra) {
            return Err(Error::Precondition("the infrastructure needs at least 3 elements".into()));
        }
        // one spare unit of M absorbs the estimate's own error
        let m_upper = multiplier_bound(&p.r_upper, &ScaledReal::zero()) + 1;
        let (r_hat, epsilon) = match &cfg.r_hat {
            Some(r) => (r.clone(), cfg.r_hat_epsilon.clone().unwrap_or_else(|| required_epsilon(m_upper, p))),
            None => {
                let eps = required_epsilon(m_upper, p);
                let circ = CircumferenceConfig {
                    delta: eps.clone(),
                    seed: derive_seed(cfg.seed, stream::CIRCUMFERENCE, 0),
                    ..Default::default()
                };
                (circumference_pipeline(infra, &circ)?.r_hat, eps)
            }
        };
        let params = select_params(p, &r_hat, &epsilon, &cfg.p_g, cfg.q_override, cfg.cell_cap)?;
        let range = ScaledReal::ratio(params.b + 1, params.n);
        let budget = choose_precision_dlog(params.a, &range, params.l, p)?;
        let ev = DlogEvaluator::new(infra, x.clone(), budget)?;
        let fine = ScaledReal::from_int(8).div(&cfg.delta).ceil().to_u64().unwrap_or(u64::MAX / 4).max(2 * params.n);
        let refiner = HEvaluator::new(infra, choose_precision(&(&r_hat + &ScaledReal::from_int(2)), fine, p)?)?;
        let k_max = cfg.k_filter.k_max(params.b);
        let max_trials = cfg.max_trials.unwrap_or(match params.kappa {
            Some(k) if k.bound > 0.0 => ((50.0 / k.bound).ceil() as u64).min(DEFAULT_MAX_TRIALS),
            _ => DEFAULT_MAX_TRIALS,
        });
        Ok(Self { infra, x, cfg, params, ev, refiner, k_max, max_trials })
    }

    pub fn params(&self) -> &DlogParams {
        &self.params
    }

    pub fn infra(&self) -> &'a I {
        self.infra
    }

    fn prepare_shift(&self, index: u64) -> Result<ShiftState> {
        let mut rng = derive_rng(self.cfg.seed, stream::SHIFT, index);
        let (n, l) = (self.params.n, self.params.l);
        let grid = ShiftedGrid::new(n, l, rng.random_range(0..l / n))?;
        let raw = build_fibers_2d(&self.ev, &grid, self.params.a, self.params.b - 1)?;
        let mut ids = HashMap::new();
        let values = (0..raw.domain_size())
            .map(|i| {
                let (x, l) = raw.key(raw.owner_of(i)).clone();
                let next = ids.len() as u64;
                (*ids.entry(x).or_insert(next), l)
            })
            .collect();
        Ok(ShiftState { index, grid, table: FiberTable::from_values(values, raw.width()) })
    }

    fn sample(&self, shift: &ShiftState, rng: &mut SimRng) -> Result<(QuantumSample<(u64, u64)>, usize)> {
        dlog_fiber_sample(&self.params, &shift.table, self.cfg.cell_cap, rng)
    }

    /// Finds `x` within distance 1 of `d̂` and returns its refined distance.
    fn refine(&self, d_hat: &ScaledReal) -> Result<Option<ScaledReal>> {
        let infra = self.infra;
        let r_hat = &self.params.r_hat;
        let m = self.refiner.budget().m;
        let one = ScaledReal::one();
        let tol = &self.cfg.delta + &self.refiner.budget().error_bound;
        let start = d_hat - &one;
        let point = if start.is_negative() { &start + r_hat } else { start.clone() };
        let rep = self.refiner.h_tilde(&point)?;
        let mut acc = &start - &rep.f;
        let mut y = rep.x;
        let end = &(d_hat + &one) + &infra.params().d_max_upper;
        let mut best: Option<ScaledReal> = None;
        let limit = infra.params().step_budget() * 4 + 8;
        for _ in 0..limit {
            if acc > end {
                break;
            }
            if y == self.x {
                let cand = if y == infra.origin() && acc.abs() <= tol { ScaledReal::zero() } else { acc.clone() };
                let off = (&cand - d_hat).abs();
                if !cand.is_negative() && off <= &one - &tol && best.as_ref().is_none_or(|b| off < (b - d_hat).abs()) {
                    best = Some(cand);
                }
            }
            acc += &infra.delta_bs(&y, m);
            y = infra.bs(&y);
        }
        Ok(best)
    }

    fn trial(&self, shift: &ShiftState, index: u64) -> Result<DlogTrial> {
        let mut rng = derive_rng(self.cfg.seed, stream::TRIAL, index);
        let (s1, f1) = self.sample(shift, &mut rng)?;
        let (s2, f2) = self.sample(shift, &mut rng)?;
        let samples = [s1.outcome, s2.outcome];
        let admitted = samples.iter().all(|&(_, k)| k <= self.k_max) && samples.iter().any(|&(_, k)| k != 0);
        let mut rec = DlogTrial {
            index,
            shift_index: shift.index,
            shift: shift.grid.j,
            samples,
            fiber_sizes: [f1, f2],
            admitted,
            combination: None,
            refined: None,
        };
        if !admitted {
            return Ok(rec);
        }
        rec.combination = combine_samples(samples[0], samples[1], &self.params)?;
        if let Some(c) = &rec.combination {
            if !self.cfg.skip_refinement {
                rec.refined = self.refine(&c.d_hat)?;
            }
        }
        Ok(rec)
    }

    pub fn replay(&self, shift_index: u64, trial_index: u64) -> Result<DlogTrial> {
        self.trial(&self.prepare_shift(shift_index)?, trial_index)
    }

    /// Runs trials on one shift without stopping at the first success.
    pub fn batch(&self, shift_index: u64, trials: std::ops::Range<u64>) -> Result<Vec<DlogTrial>> {
        let shift = self.prepare_shift(shift_index)?;
        trials.map(|t| self.trial(&shift, t)).collect()
    }

    /// Outcome distribution over `(h, k)`, row major in `h`, of the state
    /// containing grid cell `cell` under shift `shift_index`.
    pub fn distribution(&self, shift_index: u64, cell: u64) -> Result<Vec<f64>> {
        let shift = self.prepare_shift(shift_index)?;
        if cell >= shift.table.domain_size() {
            return Err(Error::Precondition(format!("cell {cell} outside the grid")));
        }
        let pairs = shift.table.fiber_pairs(shift.table.owner_of(cell));
        fourier_distribution_2d(&pairs, self.params.a, self.params.b, self.params.m, self.cfg.cell_cap)
    }

    pub fn run(&self) -> Result<DlogResult> {
        let mut shift = self.prepare_shift(0)?;
        let mut failures = 0;
        let mut trace = Vec::new();
        for t in 0..self.max_trials {
            let rec = self.trial(&shift, t)?;
            let done = match (&rec.combination, self.cfg.skip_refinement) {
                (Some(_), true) => true,
                (Some(_), false) => rec.refined.is_some(),
                _ => false,
            };
            if self.cfg.keep_trace {
                trace.push(rec.clone());
            }
            if done {
                let c = rec.combination.clone().expect("combined");
                return Ok(DlogResult {
                    d_hat: c.d_hat,
                    refined: rec.refined,
                    samples: rec.samples,
                    s: c.s,
                    t: c.t,
                    r: c.r,
                    trials: t + 1,
                    shifts_used: shift.index + 1,
                    params: self.params.clone(),
                    trace,
                });
            }
            failures += 1;
            if failures >= self.cfg.shift_failures.max(1) {
                shift = self.prepare_shift(shift.index + 1)?;
                failures = 0;
            }
        }
        Err(Error::TrialsExhausted { trials: self.max_trials })
    }
}

/// Measures the function register of a `g_N` fiber table and Fourier samples
/// the collapsed state. Returns the sample and the fiber size.
pub fn dlog_fiber_sample<R: Rng>(
    params: &DlogParams,
    table: &FiberTable<(u64, i64)>,
    cell_cap: u128,
    rng: &mut R,
) -> Result<(QuantumSample<(u64, u64)>, usize)> {
    let f = table.sample_fiber(rng);
    let pairs = table.fiber_pairs(f);
    let s = fourier_sample_2d(&pairs, params.a, params.b, params.m, cell_cap, rng)?;
    Ok((s, pairs.len()))
}

/// Computes the distance of `x` (Las Vegas).
pub fn dlog_pipeline<I: Infrastructure>(infra: &I, x: &I::Element, cfg: &DlogConfig) -> Result<DlogResult> {
    DlogRun::new(infra, x.clone(), cfg.clone())?.run()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::infra::cyclic::Power;
    use crate::infra::{CyclicGroup, ExactOracle, OracleInfra, Point};

    #[test]
    fn cyclic_exact_case() {
        let g = CyclicGroup::new(12).unwrap();
        let cfg = DlogConfig {
            seed: 3,
            r_hat: Some(ScaledReal::from_int(12)),
            r_hat_epsilon: Some(ScaledReal::zero()),
            ..Default::default()
        };
        let res = dlog_pipeline(&g, &Power(7), &cfg).unwrap();
        assert_eq!(res.d_hat, ScaledReal::from_int(7));
        assert_eq!(res.refined, Some(ScaledReal::from_int(7)));
    }

    #[test]
    fn oracle_case() {
        let o = OracleInfra::from_strs(&["0.6", "1.1", "0.8"]).unwrap();
        let cfg = DlogConfig { seed: 5, ..Default::default() };
        let res = dlog_pipeline(&o, &Point(2), &cfg).unwrap();
        let d = o.oracle_distance(&Point(2));
        assert!((&res.d_hat - &d).abs() <= ScaledReal::one());
        assert!((res.refined.unwrap() - d).abs() <= cfg.delta);
    }

    #[test]
    fn needs_three_elements() {
        let o = OracleInfra::from_strs(&["1", "2"]).unwrap();
        assert!(DlogRun::new(&o, Point(1), DlogConfig::default()).is_err());
    }
}
