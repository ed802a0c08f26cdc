use std::collections::HashMap;

use num_traits::ToPrimitive;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::candidates::candidate_periods;
use super::verify::{CircumferenceResult, Verifier};
use crate::analysis::{bound_periodic, bound_psuccess_circ};
use crate::error::{Error, Result};
use crate::fixedpoint::ScaledReal;
use crate::group::{choose_precision, min_samples_per_unit, offset_denominator_circ, HEvaluator, ShiftedGrid};
use crate::infra::{InfraParams, Infrastructure};
use crate::qsampler::{build_fibers_1d, FiberTable, OutcomeSampler};
use crate::rng::{derive_rng, stream, SimRng};

/// Largest transform length the pipeline will build.
const MAX_TRANSFORM: u64 = 1 << 22;
/// Zero outcomes redrawn per state before the trial is counted as failed.
const MAX_REDRAWS: u32 = 64;
const DEFAULT_MAX_TRIALS: u64 = 10_000;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CircumferenceConfig {
    pub delta: ScaledReal,
    /// Target probability that a random shift keeps every grid point at
    /// least `1/L` away from the elements.
    pub p_h: ScaledReal,
    /// Samples per unit length; default `max(⌈2/d_min⌉, ⌈32/R_lower⌉)`.
    pub n: Option<u64>,
    /// Transform length; default from `M = ⌈N R_upper⌉`.
    pub q: Option<u64>,
    /// Use the power of two in `[M², 2M²)` instead of `M²`.
    pub prefer_pow2: bool,
    pub max_trials: Option<u64>,
    /// Consecutive failed trials before a fresh shift is drawn.
    pub shift_failures: u64,
    pub seed: u64,
    pub keep_trace: bool,
}

impl Default for CircumferenceConfig {
    fn default() -> Self {
        Self {
            delta: ScaledReal::ratio(1, 1000),
            p_h: ScaledReal::ratio(1, 2),
            n: None,
            q: None,
            prefer_pow2: true,
            max_trials: None,
            shift_failures: 64,
            seed: 0,
            keep_trace: false,
        }
    }
}

/// Everything needed to replay one trial.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CircTrial {
    pub index: u64,
    pub shift_index: u64,
    pub shift: u64,
    /// Offsets of the two measured states.
    pub offsets: [u64; 2],
    pub outcomes: [u64; 2],
    pub redraws: u32,
    pub candidates: Vec<u64>,
    /// The verified estimate, when this trial succeeded.
    pub accepted: Option<ScaledReal>,
}

pub fn default_samples_per_unit(params: &InfraParams) -> u64 {
    let spread = ScaledReal::from_int(32).div(&params.r_lower).ceil().to_u64().unwrap_or(u64::MAX);
    min_samples_per_unit(params).max(spread)
}

/// `q` for a period bound `M`: the power of two in `[M², 2M²)` or `M²`.
pub fn transform_length(m: u64, prefer_pow2: bool) -> u64 {
    let sq = m * m;
    if prefer_pow2 {
        sq.next_power_of_two()
    } else {
        sq
    }
}

struct ShiftState {
    index: u64,
    grid: ShiftedGrid,
    table: FiberTable<(u64, i64)>,
    samplers: HashMap<usize, OutcomeSampler>,
}

/// One circumference computation: fixed parameters, shifts drawn on demand.
pub struct CircumferenceRun<'a, I: Infrastructure> {
    infra: &'a I,
    cfg: CircumferenceConfig,
    n: u64,
    q: u64,
    l: u64,
    max_trials: u64,
    ev: HEvaluator<'a, I>,
    verifier: Verifier<'a, I>,
}

impl<'a, I: Infrastructure> CircumferenceRun<'a, I> {
    pub fn new(infra: &'a I, cfg: CircumferenceConfig) -> Result<Self> {
        let params = infra.params();
        params.validate()?;
        if !cfg.delta.is_positive() {
            return Err(Error::Config("δ must be positive".into()));
        }
        let n = cfg.n.unwrap_or_else(|| default_samples_per_unit(params));
        let m = params.r_upper.mul_int(n).ceil().to_u64().ok_or_else(|| Error::Config("N·R too large".into()))?;
        let m = m.max(3);
        let q = match cfg.q {
            Some(q) => q,
            None => transform_length(m, cfg.prefer_pow2),
        };
        if q > MAX_TRANSFORM {
            return Err(Error::MemoryCap { cells: q as u128, cap: MAX_TRANSFORM as u128 });
        }
        let l = offset_denominator_circ(n, q, params, &cfg.p_h)?;
        let range = ScaledReal::ratio(q + 1, n);
        let ev = HEvaluator::new(infra, choose_precision(&range, l, params)?)?;
        let verifier = Verifier::new(infra, n, &cfg.delta, &(&range + &ScaledReal::one()))?;
        let s = params.r_lower.mul_int(n).to_f64();
        let bound = match (bound_psuccess_circ(s, q as f64), bound_periodic(n as f64, s / n as f64, params.d_min_lower.to_f64(), q as f64)) {
            (Ok(a), Ok(b)) => a * b * b,
            _ => 0.0,
        };
        let max_trials = cfg.max_trials.unwrap_or(if bound > 0.0 {
            ((50.0 / bound).ceil() as u64).min(DEFAULT_MAX_TRIALS)
        } else {
            DEFAULT_MAX_TRIALS
        });
        Ok(Self { infra, cfg, n, q, l, max_trials, ev, verifier })
    }

    pub fn infra(&self) -> &'a I {
        self.infra
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn l(&self) -> u64 {
        self.l
    }

    pub fn evaluator(&self) -> &HEvaluator<'a, I> {
        &self.ev
    }

    fn prepare_shift(&self, index: u64) -> Result<ShiftState> {
        let mut rng = derive_rng(self.cfg.seed, stream::SHIFT, index);
        let grid = ShiftedGrid::new(self.n, self.l, rng.random_range(0..self.l / self.n))?;
        let raw = build_fibers_1d(&self.ev, &grid, self.q)?;
        // replace elements by fiber ids so the table is backend independent
        let mut ids = HashMap::new();
        let values = (0..self.q)
            .map(|i| {
                let (x, l) = raw.key(raw.owner_of(i)).clone();
                let next = ids.len() as u64;
                (*ids.entry(x).or_insert(next), l)
            })
            .collect();
        Ok(ShiftState { index, grid, table: FiberTable::from_values(values, self.q), samplers: HashMap::new() })
    }

    fn measure(&self, shift: &mut ShiftState, rng: &mut SimRng, redraws: &mut u32) -> (u64, u64) {
        let f = shift.table.sample_fiber(rng);
        let offset = shift.table.fiber(f)[0];
        let table = &shift.table;
        let sampler = shift.samplers.entry(f).or_insert_with(|| {
            OutcomeSampler::new(crate::qsampler::fourier_distribution_1d(table.fiber(f), table.domain_size()))
        });
        loop {
            let s = sampler.sample(rng);
            if s.outcome != 0 || *redraws >= MAX_REDRAWS {
                return (offset, s.outcome);
            }
            *redraws += 1;
        }
    }

    fn trial(&self, shift: &mut ShiftState, index: u64) -> Result<(CircTrial, Option<super::verify::Accepted>)> {
        let mut rng = derive_rng(self.cfg.seed, stream::TRIAL, index);
        let mut redraws = 0;
        let (o1, c) = self.measure(shift, &mut rng, &mut redraws);
        let (o2, d) = self.measure(shift, &mut rng, &mut redraws);
        let mut rec = CircTrial {
            index,
            shift_index: shift.index,
            shift: shift.grid.j,
            offsets: [o1, o2],
            outcomes: [c, d],
            redraws,
            candidates: Vec::new(),
            accepted: None,
        };
        if c == 0 || d == 0 {
            return Ok((rec, None));
        }
        let cands = candidate_periods(c, d, self.q)?;
        rec.candidates = cands.candidates.clone();
        let acc = self.verifier.check(&cands)?;
        rec.accepted = acc.as_ref().map(|a| a.r_hat.clone());
        Ok((rec, acc))
    }

    /// Recomputes one trial from `(config, seed)` alone.
    pub fn replay(&self, shift_index: u64, trial_index: u64) -> Result<CircTrial> {
        let mut shift = self.prepare_shift(shift_index)?;
        Ok(self.trial(&mut shift, trial_index)?.0)
    }

    /// Runs trials on one shift without stopping at the first success.
    pub fn batch(&self, shift_index: u64, trials: std::ops::Range<u64>) -> Result<Vec<CircTrial>> {
        let mut shift = self.prepare_shift(shift_index)?;
        trials.map(|t| self.trial(&mut shift, t).map(|(rec, _)| rec)).collect()
    }

    /// Outcome distribution of the state containing grid index `offset`
    /// under shift `shift_index`.
    pub fn distribution(&self, shift_index: u64, offset: u64) -> Result<Vec<f64>> {
        if offset >= self.q {
            return Err(Error::Precondition(format!("offset {offset} outside [0, {})", self.q)));
        }
        let shift = self.prepare_shift(shift_index)?;
        let f = shift.table.owner_of(offset);
        Ok(crate::qsampler::fourier_distribution_1d(shift.table.fiber(f), self.q))
    }

    pub fn run(&self) -> Result<CircumferenceResult> {
        let mut shift = self.prepare_shift(0)?;
        let mut failures = 0;
        let mut trace = Vec::new();
        for t in 0..self.max_trials {
            let (rec, acc) = self.trial(&mut shift, t)?;
            if self.cfg.keep_trace {
                trace.push(rec);
            }
            if let Some(a) = acc {
                return Ok(CircumferenceResult {
                    r_hat: a.r_hat,
                    delta: self.cfg.delta.clone(),
                    trials_used: t + 1,
                    accepted_candidate: a.candidate,
                    witness: a.witness,
                    divisor: a.divisor,
                    n: self.n,
                    q: self.q,
                    l: self.l,
                    m: self.verifier.m(),
                    shifts_used: shift.index + 1,
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

/// Estimates the circumference to within `δ` (Las Vegas).
pub fn circumference_pipeline<I: Infrastructure>(infra: &I, cfg: &CircumferenceConfig) -> Result<CircumferenceResult> {
    CircumferenceRun::new(infra, cfg.clone())?.run()
}
