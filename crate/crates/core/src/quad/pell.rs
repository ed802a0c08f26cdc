//! Fundamental solutions of `x² − D y² = ±1` from the principal cycle.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use super::forms::{bs_unchecked, discriminant_for, qf_delta_bs, step_factor, ReducedForm};
use super::number::QuadNum;
use crate::error::{Error, Result};
use super::backend::CYCLE_LIMIT;
use crate::fixedpoint::ScaledReal;

const WALK_BITS: u32 = 48;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PellSolution {
    #[serde(rename = "D")]
    pub d: u64,
    /// Logarithm of the fundamental unit, accurate to about `2^-40`.
    pub regulator: ScaledReal,
    /// Smallest positive solution of `x² − D y² = ±1`.
    #[serde(serialize_with = "crate::fixedpoint::serialize_bigint")]
    pub pell_x: BigInt,
    #[serde(serialize_with = "crate::fixedpoint::serialize_bigint")]
    pub pell_y: BigInt,
    pub norm: i32,
    /// Smallest positive solution of `x² − D y² = 1`.
    #[serde(serialize_with = "crate::fixedpoint::serialize_bigint")]
    pub plus_x: BigInt,
    #[serde(serialize_with = "crate::fixedpoint::serialize_bigint")]
    pub plus_y: BigInt,
    /// The solution is the `power`-th power of the fundamental unit.
    pub power: u32,
}

// (x + y√D)/den
#[derive(Clone, Debug)]
struct Unit {
    x: BigInt,
    y: BigInt,
    den: BigInt,
}

impl Unit {
    fn mul(&self, o: &Unit, d: &BigInt) -> Unit {
        let x = &self.x * &o.x + d * &self.y * &o.y;
        let y = &self.x * &o.y + &o.x * &self.y;
        let den = &self.den * &o.den;
        let g = x.gcd(&y).gcd(&den);
        Unit { x: x / &g, y: y / &g, den: den / g }
    }
}

/// Walks the principal cycle once, multiplying the exact step factors, and
/// checks the accumulated distance against `regulator_estimate`. The unit is
/// then raised to the least power lying in `ℤ[√D]`.
pub fn pell_solution(d: u64, regulator_estimate: &ScaledReal) -> Result<PellSolution> {
    let disc = discriminant_for(d).map_err(|_| Error::Precondition(format!("D = {d} is a square or too small")))?;
    let big_disc = BigInt::from(disc);
    let x0 = ReducedForm::principal(disc)?;
    let tol = ScaledReal::ratio(1, 1000) + ScaledReal::pow2_neg(30);
    let ceiling = regulator_estimate + &tol;
    let mut unit = QuadNum::one();
    let mut dist = ScaledReal::zero();
    let mut x = x0;
    for _ in 0..CYCLE_LIMIT {
        unit = unit.mul(&step_factor(&x), &big_disc);
        dist += &qf_delta_bs(&x, WALK_BITS)?;
        x = bs_unchecked(&x);
        if x == x0 {
            break;
        }
        if dist > ceiling {
            return Err(Error::EstimateTooCoarse(format!(
                "cycle continues past {} without closing",
                regulator_estimate.to_decimal(6)
            )));
        }
    }
    if x != x0 {
        return Err(Error::Certification("principal cycle too long".into()));
    }
    if (&dist - regulator_estimate).abs() > tol {
        return Err(Error::EstimateTooCoarse(format!(
            "cycle closes at {} but the estimate is {}",
            dist.to_decimal(6),
            regulator_estimate.to_decimal(6)
        )));
    }
    let big_d = BigInt::from(d);
    let y = if disc == d { unit.v.clone() } else { &unit.v * 2 };
    let g = unit.u.gcd(&y).gcd(&unit.w);
    let base = Unit { x: &unit.u / &g, y: y / &g, den: &unit.w / &g };
    let mut cur = base.clone();
    for power in 1..=12u32 {
        if cur.den.is_one() {
            let (px, py) = (cur.x.abs(), cur.y.abs());
            let n = &px * &px - &big_d * &py * &py;
            let norm = if n == BigInt::one() {
                1
            } else if n == -BigInt::one() {
                -1
            } else {
                return Err(Error::Certification(format!("unit has norm {n}")));
            };
            let (plus_x, plus_y) = if norm == 1 {
                (px.clone(), py.clone())
            } else {
                (&px * &px + &big_d * &py * &py, BigInt::from(2) * &px * &py)
            };
            debug_assert!(!py.is_zero());
            return Ok(PellSolution { d, regulator: dist, pell_x: px, pell_y: py, norm, plus_x, plus_y, power });
        }
        cur = cur.mul(&base, &big_d);
    }
    Err(Error::Certification("no power of the unit lies in ℤ[√D]".into()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_force(d: i64, norm: i64) -> (i64, i64) {
        for y in 1..10_000i64 {
            let t = d * y * y + norm;
            let x = (t as f64).sqrt().round() as i64;
            for c in [x - 1, x, x + 1] {
                if c > 0 && c * c == t {
                    return (c, y);
                }
            }
        }
        panic!("no solution below the search bound")
    }

    #[test]
    fn small_radicands_match_brute_force() {
        for (d, reg) in [(2u64, "0.881374"), (13, "1.194763"), (3, "1.316958"), (5, "0.481212"), (7, "2.768659")] {
            let s = pell_solution(d, &ScaledReal::parse(reg).unwrap()).unwrap();
            let minus = if s.norm == -1 { Some((s.pell_x.clone(), s.pell_y.clone())) } else { None };
            let plus = brute_force(d as i64, 1);
            assert_eq!((s.plus_x.clone(), s.plus_y.clone()), (plus.0.into(), plus.1.into()), "D={d}");
            if let Some((x, y)) = minus {
                let m = brute_force(d as i64, -1);
                assert_eq!((x, y), (m.0.into(), m.1.into()), "D={d}");
            }
        }
    }

    #[test]
    fn coarse_estimates_are_rejected() {
        assert!(matches!(
            pell_solution(13, &ScaledReal::parse("1.19").unwrap()),
            Err(Error::EstimateTooCoarse(_))
        ));
        assert!(matches!(pell_solution(13, &ScaledReal::parse("0.5").unwrap()), Err(Error::EstimateTooCoarse(_))));
        assert!(pell_solution(16, &ScaledReal::one()).is_err());
    }
}
