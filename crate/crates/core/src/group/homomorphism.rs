//! The homomorphisms `h(r) = (x0, r)` and `g(a, r) = a·(x, 0) + h(r)`, their
//! finite-precision versions `h̃`, `g̃`, and exact versions for oracle
//! backends.

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};

use super::frep::{add, identity, reduce_counted, FRep};
use super::precision::PrecisionBudget;
use crate::error::{Error, Result};
use crate::fixedpoint::ScaledReal;
use crate::infra::{ExactOracle, Infrastructure};

/// One evaluation of `h̃` or `g̃`.
#[derive(Clone, Debug)]
pub struct Evaluation<E> {
    pub rep: FRep<E>,
    /// The multiplier `ã` of the double-and-multiply phase.
    pub multiple: u64,
    /// Baby steps taken after the double-and-multiply landing.
    pub landing_steps: usize,
}

/// Evaluates `h̃` on `[0, range)`. The doubling chain `2^i · (x_k̄, 0)` is
/// computed once and shared by all evaluations.
pub struct HEvaluator<'a, I: Infrastructure> {
    infra: &'a I,
    budget: PrecisionBudget,
    d_tilde: ScaledReal,
    divisor: ScaledReal,
    chain: Vec<FRep<I::Element>>,
}

fn doubling_chain<I: Infrastructure>(infra: &I, base: FRep<I::Element>, max: u64, m: u32) -> Result<Vec<FRep<I::Element>>> {
    let len = (64 - max.leading_zeros()).max(1) as usize;
    let mut chain = vec![base];
    while chain.len() < len {
        let last = chain.last().unwrap();
        chain.push(add(infra, last, last, m)?);
    }
    Ok(chain)
}

fn chain_multiple<I: Infrastructure>(infra: &I, chain: &[FRep<I::Element>], a: u64, m: u32) -> Result<FRep<I::Element>> {
    let mut acc: Option<FRep<I::Element>> = None;
    for (i, p) in chain.iter().enumerate() {
        if a >> i & 1 == 1 {
            acc = Some(match acc {
                None => p.clone(),
                Some(s) => add(infra, &s, p, m)?,
            });
        }
    }
    if a >> chain.len() != 0 {
        return Err(Error::Precondition(format!("multiplier {a} exceeds the prepared range")));
    }
    Ok(acc.unwrap_or_else(|| identity(infra)))
}

impl<'a, I: Infrastructure> HEvaluator<'a, I> {
    pub fn new(infra: &'a I, budget: PrecisionBudget) -> Result<Self> {
        let m = budget.m;
        let params = infra.params();
        let mut xk = infra.origin();
        let mut d_tilde = ScaledReal::zero();
        for _ in 0..params.k_bar {
            d_tilde += &infra.delta_bs(&xk, m);
            xk = infra.bs(&xk);
        }
        let divisor = d_tilde.clone().max(params.d_k_bar.clone());
        let a_max = budget.range.div(&divisor).round_nearest() + 1u8;
        let a_max = a_max.to_u64().ok_or_else(|| Error::Precision("evaluation range too large".into()))?;
        let chain = doubling_chain(infra, FRep::new(xk, ScaledReal::zero()), a_max, m)?;
        Ok(Self { infra, budget, d_tilde, divisor, chain })
    }

    pub fn budget(&self) -> &PrecisionBudget {
        &self.budget
    }

    pub fn infra(&self) -> &'a I {
        self.infra
    }

    /// `h̃(r)` for `0 ≤ r < range`.
    pub fn eval(&self, r: &ScaledReal) -> Result<Evaluation<I::Element>> {
        if r.is_negative() || *r >= self.budget.range {
            return Err(Error::Precondition(format!("evaluation point {r} outside [0, {})", self.budget.range)));
        }
        let m = self.budget.m;
        let a = r.div(&self.divisor).round_nearest().to_u64().expect("bounded multiplier");
        let base = chain_multiple(self.infra, &self.chain, a, m)?;
        let f = &(r - &self.d_tilde.mul_int(a)) + &base.f;
        let (rep, landing_steps) = reduce_counted(self.infra, base.x, f, m)?;
        Ok(Evaluation { rep, multiple: a, landing_steps })
    }

    pub fn h_tilde(&self, r: &ScaledReal) -> Result<FRep<I::Element>> {
        self.eval(r).map(|e| e.rep)
    }
}

/// Evaluates `g̃(a, r) = a · (x, 0) ⊕ h̃(r)` for `a < multiplier_range`.
pub struct DlogEvaluator<'a, I: Infrastructure> {
    h: HEvaluator<'a, I>,
    chain: Vec<FRep<I::Element>>,
}

impl<'a, I: Infrastructure> DlogEvaluator<'a, I> {
    pub fn new(infra: &'a I, x: I::Element, budget: PrecisionBudget) -> Result<Self> {
        let a_range = budget.multiplier_range.max(1);
        let m = budget.m;
        let chain = doubling_chain(infra, FRep::new(x, ScaledReal::zero()), a_range - 1, m)?;
        Ok(Self { h: HEvaluator::new(infra, budget)?, chain })
    }

    pub fn h(&self) -> &HEvaluator<'a, I> {
        &self.h
    }

    pub fn budget(&self) -> &PrecisionBudget {
        self.h.budget()
    }

    /// `a · (x, 0)`.
    pub fn multiple(&self, a: u64) -> Result<FRep<I::Element>> {
        if a >= self.budget().multiplier_range.max(1) {
            return Err(Error::Precondition(format!("multiplier {a} out of range")));
        }
        chain_multiple(self.h.infra, &self.chain, a, self.budget().m)
    }

    /// Combines a precomputed `a · (x, 0)` with an evaluation of `h̃`.
    /// Gives the same result as [`Self::eval`].
    pub fn combine(&self, a: u64, ax: &FRep<I::Element>, h: Evaluation<I::Element>) -> Result<Evaluation<I::Element>> {
        if a == 0 {
            return Ok(h);
        }
        let m = self.budget().m;
        let (z, dgs) = self.h.infra.giant_step(&ax.x, &h.rep.x, m);
        let (rep, steps) = reduce_counted(self.h.infra, z, &(&ax.f + &h.rep.f) - &dgs, m)?;
        Ok(Evaluation { rep, multiple: h.multiple, landing_steps: h.landing_steps + steps })
    }

    pub fn eval(&self, a: u64, r: &ScaledReal) -> Result<Evaluation<I::Element>> {
        let ax = self.multiple(a)?;
        let h = self.h.eval(r)?;
        self.combine(a, &ax, h)
    }

    pub fn g_tilde(&self, a: u64, r: &ScaledReal) -> Result<FRep<I::Element>> {
        self.eval(a, r).map(|e| e.rep)
    }
}

/// `h̃(r)` with a one-off evaluator.
pub fn h_tilde<I: Infrastructure>(infra: &I, r: &ScaledReal, budget: &PrecisionBudget) -> Result<FRep<I::Element>> {
    HEvaluator::new(infra, budget.clone())?.h_tilde(r)
}

/// `g̃(a, r)` with a one-off evaluator.
pub fn g_tilde<I: Infrastructure>(
    infra: &I,
    a: u64,
    r: &ScaledReal,
    x: &I::Element,
    budget: &PrecisionBudget,
) -> Result<FRep<I::Element>> {
    DlogEvaluator::new(infra, x.clone(), budget.clone())?.g_tilde(a, r)
}

/// The exact `h(r)` on an oracle backend; `r` may be negative.
pub fn h_exact_on_oracle<I: ExactOracle>(infra: &I, r: &ScaledReal) -> FRep<I::Element> {
    let t = r.mod_reduce(&infra.circumference());
    let (x, f) = infra.locate(&t);
    FRep::new(x, f)
}

/// The exact `g(a, r) = h(a·d(x) + r)` on an oracle backend.
pub fn g_exact_on_oracle<I: ExactOracle>(infra: &I, a: &BigInt, r: &ScaledReal, x: &I::Element) -> FRep<I::Element> {
    let t = infra.oracle_distance(x).mul_int(a.clone()) + r;
    if a.is_zero() {
        return h_exact_on_oracle(infra, r);
    }
    h_exact_on_oracle(infra, &t)
}
