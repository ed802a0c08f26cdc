//! Choice of the working precision `m` from the closed-form error bound of
//! the approximate homomorphisms.

use num_bigint::BigInt;
use num_traits::One;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fixedpoint::ScaledReal;
use crate::infra::InfraParams;

/// Extra bits added on top of the smallest sufficient precision.
pub const SLACK_BITS: u32 = 4;
const MAX_BITS: u32 = 4096;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PrecisionBudget {
    /// Bits of precision requested from `Δ̃bs`, `Δ̃gs`.
    pub m: u32,
    /// Denominator of the evaluation grid.
    pub l: u64,
    /// Evaluation points satisfy `0 ≤ r < range`.
    pub range: ScaledReal,
    /// Multipliers satisfy `a < multiplier_range` (0 when only `h̃` is used).
    pub multiplier_range: u64,
    /// Closed-form bound on the accumulated-distance error at `m` bits.
    pub error_bound: ScaledReal,
}

impl PrecisionBudget {
    /// `1/(2L)`, the error the bound must stay below.
    pub fn target(&self) -> ScaledReal {
        ScaledReal::ratio(1, 2 * self.l as u128)
    }
}

/// `⌈log2 v⌉` for a real `v ≥ 1`, as an integer.
fn ceil_log2(v: &ScaledReal) -> u64 {
    let c = v.ceil();
    if c <= BigInt::one() {
        0
    } else {
        (c - 1u8).bits()
    }
}

/// Error bound `ẽ` for `h̃` on `[0, b)` at precision `m`, plus the extra
/// terms for `a · (x, 0)` with `a < a_range` when `a_range > 0`.
pub fn closed_form_error(b: &ScaledReal, a_range: u64, params: &InfraParams, m: u32) -> ScaledReal {
    let k = params.k_bar as u64;
    let blocks = params.reduction_blocks();
    let c1 = k + 1 + k * blocks;
    let c2 = 1 + k * blocks;
    let unit = ScaledReal::pow2_neg(m);
    let ratio = b.div(&params.d_k_bar);
    let lin = (&ratio + &ScaledReal::one()).mul_int(c1);
    let log = ceil_log2(&(&ratio + &ScaledReal::one())) * c2;
    let e1 = (lin + ScaledReal::from_int(log)) * &unit;
    let walk = (&e1 + &params.d_max_upper.mul_int(k)).div(&params.d_k_bar).ceil();
    let mut e = &e1 + &unit.mul_int(walk * k);
    if a_range > 0 {
        let a_log = ceil_log2(&ScaledReal::from_int(a_range));
        e = e + unit.mul_int((a_range + a_log + 1) * c2);
    }
    e
}

fn choose(b: &ScaledReal, a_range: u64, l: u64, params: &InfraParams) -> Result<PrecisionBudget> {
    if l == 0 {
        return Err(Error::Precision("grid denominator must be positive".into()));
    }
    if params.d_min_lower <= ScaledReal::ratio(1, l) {
        return Err(Error::Precision(format!("d_min must exceed 1/L = 1/{l}")));
    }
    if b.is_negative() {
        return Err(Error::Precision("negative evaluation range".into()));
    }
    let target = ScaledReal::ratio(1, 2 * l as u128);
    // the bound is roughly proportional to 2^-m: start near the answer
    let rough = closed_form_error(b, a_range, params, 0).div(&target);
    let mut m = ceil_log2(&rough.max(ScaledReal::one())).saturating_sub(2) as u32;
    while closed_form_error(b, a_range, params, m) >= target {
        m += 1;
        if m > MAX_BITS {
            return Err(Error::Precision("no precision up to 4096 bits suffices".into()));
        }
    }
    // never need more than the cheaper of the two neighbours
    while m > 1 && closed_form_error(b, a_range, params, m - 1) < target {
        m -= 1;
    }
    let m = m + SLACK_BITS;
    Ok(PrecisionBudget {
        m,
        l,
        range: b.clone(),
        multiplier_range: a_range,
        error_bound: closed_form_error(b, a_range, params, m),
    })
}

/// Precision for evaluating `h̃` on `[0, b)` with grid denominator `l`.
pub fn choose_precision(b: &ScaledReal, l: u64, params: &InfraParams) -> Result<PrecisionBudget> {
    choose(b, 0, l, params)
}

/// Precision for evaluating `g̃(a, r)` with `a < a_range`, `r ∈ [0, b)`.
pub fn choose_precision_dlog(a_range: u64, b: &ScaledReal, l: u64, params: &InfraParams) -> Result<PrecisionBudget> {
    choose(b, a_range.max(1), l, params)
}
