use num_traits::ToPrimitive;
use serde::Serialize;

use super::candidates::CandidateList;
use super::pipeline::CircTrial;
use crate::error::Result;
use crate::fixedpoint::ScaledReal;
use crate::group::{choose_precision, HEvaluator};
use crate::infra::Infrastructure;

/// Which element near the evaluation point identified the origin.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Witness {
    /// `h̃(R′)` landed on `x0`.
    Origin,
    /// `h̃(R′)` landed on `bs⁻¹(x0)`.
    Predecessor,
    /// Reached `x0` after the given number of baby steps (negative: inverse
    /// baby steps).
    Probe(i32),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CircumferenceResult {
    pub r_hat: ScaledReal,
    pub delta: ScaledReal,
    pub trials_used: u64,
    pub accepted_candidate: u64,
    pub witness: Witness,
    /// `k` when the accepted candidate was `k` times the reported circumference.
    pub divisor: u64,
    pub n: u64,
    pub q: u64,
    pub l: u64,
    pub m: u32,
    pub shifts_used: u64,
    pub trace: Vec<CircTrial>,
}

/// Verification state for one `(N, δ)`: an evaluator of `h̃` fine enough that
/// accepted estimates are within `δ`.
pub struct Verifier<'a, I: Infrastructure> {
    ev: HEvaluator<'a, I>,
    n: u64,
    tolerance: ScaledReal,
}

pub(crate) struct Accepted {
    pub r_hat: ScaledReal,
    pub candidate: u64,
    pub witness: Witness,
    pub divisor: u64,
}

impl<'a, I: Infrastructure> Verifier<'a, I> {
    /// Accepts `R′ < range`.
    pub fn new(infra: &'a I, n: u64, delta: &ScaledReal, range: &ScaledReal) -> Result<Self> {
        let fine = ScaledReal::from_int(8).div(delta).ceil().to_u64().unwrap_or(u64::MAX / 4);
        let l = fine.max(2 * n);
        let budget = choose_precision(range, l, infra.params())?;
        let tolerance = &ScaledReal::ratio(1, n) + &budget.error_bound;
        Ok(Self { ev: HEvaluator::new(infra, budget)?, n, tolerance })
    }

    pub fn m(&self) -> u32 {
        self.ev.budget().m
    }

    /// Estimate of the nearest multiple of the circumference when `R′` is
    /// within `1/N` of one.
    fn probe(&self, r: &ScaledReal) -> Result<Option<(ScaledReal, Witness)>> {
        if r.is_negative() || *r >= self.ev.budget().range {
            return Ok(None);
        }
        let infra = self.ev.infra();
        let m = self.m();
        let rep = self.ev.h_tilde(r)?;
        let x0 = infra.origin();
        let k = infra.params().k_bar as i32;
        let base = r - &rep.f;
        let mut best: Option<(ScaledReal, Witness)> = None;
        let mut consider = |est: ScaledReal, w: Witness| {
            let off = (&est - r).abs();
            if off <= self.tolerance && best.as_ref().is_none_or(|(b, _)| off < (b - r).abs()) {
                best = Some((est, w));
            }
        };
        let (mut y, mut acc) = (rep.x.clone(), ScaledReal::zero());
        for s in 0..=k {
            if y == x0 {
                let w = match s {
                    0 => Witness::Origin,
                    1 => Witness::Predecessor,
                    _ => Witness::Probe(s),
                };
                consider(&base + &acc, w);
            }
            acc += &infra.delta_bs(&y, m);
            y = infra.bs(&y);
        }
        let (mut y, mut acc) = (rep.x, ScaledReal::zero());
        for s in 1..=k {
            y = infra.bs_inv(&y);
            acc += &infra.delta_bs(&y, m);
            if y == x0 {
                consider(&base - &acc, Witness::Probe(-s));
            }
        }
        Ok(best)
    }

    /// Tests candidates in increasing order; on acceptance, replaces the
    /// estimate by the smallest passing divisor.
    pub(crate) fn check(&self, candidates: &CandidateList) -> Result<Option<Accepted>> {
        let mut sorted = candidates.candidates.clone();
        sorted.sort_unstable();
        sorted.dedup();
        for cand in sorted {
            if cand == 0 {
                continue;
            }
            let r = ScaledReal::ratio(cand, self.n);
            let Some((est, witness)) = self.probe(&r)? else { continue };
            if !est.is_positive() {
                continue;
            }
            let r_lower = &self.ev.infra().params().r_lower;
            let kmax = (&est + &self.tolerance).div(r_lower).floor().to_u64().unwrap_or(1);
            let mut out = Accepted { r_hat: est.clone(), candidate: cand, witness, divisor: 1 };
            for k in (2..=kmax).rev() {
                if let Some((e, w)) = self.probe(&est.div_int(k))? {
                    if e.is_positive() {
                        out = Accepted { r_hat: e, candidate: cand, witness: w, divisor: k };
                        break;
                    }
                }
            }
            return Ok(Some(out));
        }
        Ok(None)
    }
}

/// Checks a candidate list `Ŝ` (periods of `h_N`, so `R′ = Ŝ/N`) and
/// returns an estimate within `δ` of the circumference, or `None` to signal
/// a resample.
pub fn verify_and_refine<I: Infrastructure>(
    infra: &I,
    candidates: &CandidateList,
    n: u64,
    delta: &ScaledReal,
) -> Result<Option<CircumferenceResult>> {
    let max = candidates.candidates.iter().copied().max().unwrap_or(0);
    let range = &ScaledReal::ratio(max, n) + &ScaledReal::one();
    let v = Verifier::new(infra, n, delta, &range)?;
    Ok(v.check(candidates)?.map(|a| CircumferenceResult {
        r_hat: a.r_hat,
        delta: delta.clone(),
        trials_used: 1,
        accepted_candidate: a.candidate,
        witness: a.witness,
        divisor: a.divisor,
        n,
        q: 0,
        l: 0,
        m: v.m(),
        shifts_used: 0,
        trace: Vec::new(),
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::infra::synthetic::SyntheticOptions;
    use crate::infra::{ExactOracle, OracleInfra};

    fn list(c: &[u64]) -> CandidateList {
        CandidateList { candidates: c.to_vec(), sources: Vec::new() }
    }

    fn r(s: &str) -> ScaledReal {
        ScaledReal::parse(s).unwrap()
    }

    #[test]
    fn accepts_true_period() {
        let o = OracleInfra::from_strs(&["0.6", "1.1", "0.8"]).unwrap();
        let delta = r("0.001");
        let res = verify_and_refine(&o, &list(&[10]), 4, &delta).unwrap().unwrap();
        assert!((&res.r_hat - &o.circumference()).abs() <= delta);
        assert_eq!(res.witness, Witness::Origin);
        // 11/4 lands just past x0; 9/4 just before it
        let res = verify_and_refine(&o, &list(&[11]), 4, &delta).unwrap().unwrap();
        assert!((&res.r_hat - &o.circumference()).abs() <= delta);
        let res = verify_and_refine(&o, &list(&[9]), 4, &delta).unwrap().unwrap();
        assert_eq!(res.witness, Witness::Predecessor);
        assert!((&res.r_hat - &o.circumference()).abs() <= delta);
    }

    #[test]
    fn spurious_multiples_reduce() {
        let o = OracleInfra::from_strs(&["0.6", "1.1", "0.8"]).unwrap();
        let delta = r("0.001");
        let res = verify_and_refine(&o, &list(&[20]), 4, &delta).unwrap().unwrap();
        assert_eq!(res.divisor, 2);
        assert!((&res.r_hat - &o.circumference()).abs() <= delta);
        let res = verify_and_refine(&o, &list(&[30, 20]), 4, &delta).unwrap().unwrap();
        assert_eq!(res.accepted_candidate, 20);
        assert!((&res.r_hat - &o.circumference()).abs() <= delta);
    }

    #[test]
    fn rejects_far_candidates() {
        let o = OracleInfra::from_strs(&["0.6", "1.1", "0.8"]).unwrap();
        assert!(verify_and_refine(&o, &list(&[5]), 4, &r("0.001")).unwrap().is_none());
        assert!(verify_and_refine(&o, &list(&[7, 14]), 4, &r("0.001")).unwrap().is_none());
    }

    #[test]
    fn perturbed_backend_stays_within_delta() {
        let gaps: Vec<ScaledReal> = ["3/7", "5/4", "2/3", "1", "7/5"].iter().map(|s| r(s)).collect();
        let o = OracleInfra::with_options(&gaps, SyntheticOptions { k_bar: None, perturb: Some(9) }).unwrap();
        let delta = r("1e-6");
        let n = 5u64;
        let exact = o.circumference();
        let near = exact.mul_int(n).round_nearest().to_u64().unwrap();
        for c in [near - 1, near, near + 1] {
            if let Some(res) = verify_and_refine(&o, &list(&[c]), n, &delta).unwrap() {
                assert!((&res.r_hat - &exact).abs() <= delta);
            }
        }
    }
}
