use num_bigint::BigInt;
use serde::Serialize;

use crate::analysis::{convergents_of, Convergent};
use crate::error::{Error, Result};
use crate::qsampler::QuantumSample;

/// Convergents of `c/d` with denominator at most `cap`.
pub fn convergents(c: u64, d: u64, cap: u64) -> Vec<Convergent> {
    assert!(d >= 1, "d must be positive");
    convergents_of(&BigInt::from(c), &BigInt::from(d), cap as u128)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CandidateList {
    /// Candidate periods, in convergent order.
    pub candidates: Vec<u64>,
    /// The convergent that produced each candidate.
    pub sources: Vec<Convergent>,
}

impl CandidateList {
    pub fn len(&self) -> usize {
        self.candidates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.candidates.is_empty()
    }
}

/// `{[c_i q / c] : d_i ≤ ⌊q/32⌋}` over the convergents `c_i/d_i` of `c/d`.
pub fn candidate_periods(c: u64, d: u64, q: u64) -> Result<CandidateList> {
    if c == 0 || d == 0 {
        return Err(Error::Precondition("zero Fourier outcome".into()));
    }
    let mut out = CandidateList { candidates: Vec::new(), sources: Vec::new() };
    for cv in convergents(c, d, (q / 32).max(1)) {
        if cv.num <= 0 {
            continue;
        }
        // round_nearest(num·q/c), ties up
        let num = cv.num as u128 * q as u128;
        let cand = ((2 * num + c as u128) / (2 * c as u128)) as u64;
        out.candidates.push(cand);
        out.sources.push(cv);
    }
    Ok(out)
}

/// Algorithm 1 on two measured outcomes.
pub fn estimate_period(s1: &QuantumSample<u64>, s2: &QuantumSample<u64>, q: u64) -> Result<CandidateList> {
    candidate_periods(s1.outcome, s2.outcome, q)
}
