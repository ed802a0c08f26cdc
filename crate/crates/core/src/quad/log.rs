//! Natural logarithms of positive reals of the form `(u + v√Δ)/w`, returned as
//! dyadic rationals with absolute error below `2^-m`.
//!
//! Arguments are split as `2^e · y` with `y ∈ [1, 2)`, and
//! `ln y = 2 atanh((y−1)/(y+1))` is summed in fixed point with guard bits.

use std::sync::Mutex;

use num_bigint::{BigInt, BigUint, Sign};
use num_traits::{One, Zero};

use crate::fixedpoint::ScaledReal;

const GUARD_BITS: u32 = 64;

// ln 2 at the largest precision computed so far, as (bits, floor(ln2·2^bits)).
static LN2: Mutex<Option<(u32, BigInt)>> = Mutex::new(None);

/// `Σ t^(2k+1)/(2k+1)` for `t = num/den` with `0 ≤ t ≤ 1/3`, at `prec` bits.
fn atanh_fixed(t: &BigInt, prec: u32) -> BigInt {
    let mut sum = t.clone();
    let mut power = t.clone();
    let t2 = (t * t) >> prec;
    let mut k: u32 = 1;
    loop {
        power = (&power * &t2) >> prec;
        if power.is_zero() {
            break;
        }
        sum += &power / BigInt::from(2 * k + 1);
        k += 1;
    }
    sum
}

fn ln2_fixed(prec: u32) -> BigInt {
    let mut cache = LN2.lock().expect("ln2 cache");
    if let Some((bits, v)) = cache.as_ref() {
        if *bits >= prec {
            return v >> (bits - prec);
        }
    }
    let work = prec + 32;
    let third = (BigInt::one() << work) / BigInt::from(3u8);
    let v = atanh_fixed(&third, work) << 1u32;
    *cache = Some((work, v.clone()));
    v >> (work - prec)
}

/// `ln(f / 2^p)` for `f > 0`, as a fixed-point integer at `prec` bits.
/// The error is a few hundred units in the last place at most.
fn ln_fixed(f: &BigUint, p: u64, prec: u32) -> BigInt {
    assert!(!f.is_zero(), "logarithm of zero");
    let e = f.bits() - 1;
    let exp2 = e as i64 - p as i64;
    let f = BigInt::from(f.clone());
    let y = if e >= prec as u64 { f >> (e - prec as u64) } else { f << (prec as u64 - e) };
    let one = BigInt::one() << prec;
    let t = ((&y - &one) << prec) / (&y + &one);
    let ln_y = atanh_fixed(&t, prec) << 1u32;
    ln_y + ln2_fixed(prec) * exp2
}

fn round_to_bits(v: &BigInt, from: u32, to: u32) -> ScaledReal {
    let shift = from - to;
    let half = BigInt::one() << (shift - 1);
    ScaledReal::dyadic((v + half) >> shift, to)
}

fn bits_for_exponent(v: u64) -> u32 {
    64 - v.leading_zeros()
}

/// `ln(a)` for a positive integer `a`, within `2^-m`.
pub fn ln_integer(a: &BigUint, m: u32) -> ScaledReal {
    let prec = m + GUARD_BITS + bits_for_exponent(a.bits());
    round_to_bits(&ln_fixed(a, 0, prec), prec, m + 2)
}

/// `ln(a/b)` for positive integers, within `2^-m`.
pub fn ln_ratio(a: &BigUint, b: &BigUint, m: u32) -> ScaledReal {
    let prec = m + GUARD_BITS + bits_for_exponent(a.bits().max(b.bits()));
    let v = ln_fixed(a, 0, prec) - ln_fixed(b, 0, prec);
    round_to_bits(&v, prec, m + 2)
}

/// Fixed-point `ln(|u| + |v|√Δ)` at `prec` bits; requires the sum to be ≥ 1.
fn ln_same_sign(u: &BigInt, v: &BigInt, disc: &BigUint, prec: u32) -> BigInt {
    let p = prec as u64 + 2;
    let root = (disc << (2 * p)).sqrt();
    let f = (u.magnitude() << p) + v.magnitude() * root;
    ln_fixed(&f, p, prec)
}

/// `ln |(u + v√Δ)/w|` within `2^-m`, for `Δ` a positive non-square.
///
/// When `u` and `v√Δ` have opposite signs the value is computed through the
/// conjugate, `|u + v√Δ| = |u² − v²Δ| / (|u| + |v|√Δ)`, so no cancellation
/// occurs.
pub fn ln_abs_quadratic(u: &BigInt, v: &BigInt, w: &BigInt, disc: &BigUint, m: u32) -> ScaledReal {
    assert!(!w.is_zero(), "zero denominator");
    assert!(!(u.is_zero() && v.is_zero()), "logarithm of zero");
    let size = u.bits().max(v.bits() + disc.bits()).max(w.bits());
    let prec = m + GUARD_BITS + bits_for_exponent(size);
    let ln_w = ln_fixed(w.magnitude(), 0, prec);
    let value = if v.is_zero() {
        ln_fixed(u.magnitude(), 0, prec)
    } else if u.is_zero() || u.sign() == v.sign() {
        ln_same_sign(u, v, disc, prec)
    } else {
        let norm = u * u - v * v * BigInt::from_biguint(Sign::Plus, disc.clone());
        ln_fixed(norm.magnitude(), 0, prec) - ln_same_sign(u, v, disc, prec)
    };
    round_to_bits(&(value - ln_w), prec, m + 2)
}

/// `ln((p + √Δ)/q)` for a baby-step factor with `p, q > 0`.
pub fn ln_step_factor(p: i64, q: i64, disc: u64, m: u32) -> ScaledReal {
    ln_abs_quadratic(&BigInt::from(p), &BigInt::one(), &BigInt::from(q), &BigUint::from(disc), m)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: &ScaledReal, b: f64, tol: f64) -> bool {
        (a.to_f64() - b).abs() <= tol
    }

    #[test]
    fn matches_f64_on_simple_values() {
        for a in [1u32, 2, 3, 10, 12345, 1 << 20] {
            let v = ln_integer(&BigUint::from(a), 40);
            assert!(close(&v, (a as f64).ln(), 1e-11), "ln {a}");
        }
        let v = ln_ratio(&BigUint::from(3u8), &BigUint::from(7u8), 30);
        assert!(close(&v, (3.0f64 / 7.0).ln(), 1e-9));
    }

    #[test]
    fn quadratic_values() {
        let d = BigUint::from(13u8);
        // (3 + √13)/2
        let v = ln_abs_quadratic(&3.into(), &1.into(), &2.into(), &d, 50);
        assert!(close(&v, ((3.0 + 13f64.sqrt()) / 2.0).ln(), 1e-13));
        // (3 − √13)/2 has absolute value 1/((3+√13)/2)
        let c = ln_abs_quadratic(&3.into(), &(-1).into(), &2.into(), &d, 50);
        assert!((&v + &c).abs() < ScaledReal::pow2_neg(49));
        // negative denominators only flip the sign of the argument
        let n = ln_abs_quadratic(&(-3).into(), &(-1).into(), &2.into(), &d, 50);
        assert_eq!(n, v);
    }

    #[test]
    fn cancellation_is_avoided() {
        // 1766319049 − 226153980√61 = 1/(1766319049 + 226153980√61)
        let d = BigUint::from(61u8);
        let x = BigInt::from(1_766_319_049u64);
        let y = BigInt::from(226_153_980u64);
        let big = ln_abs_quadratic(&x, &y, &1.into(), &d, 60);
        let small = ln_abs_quadratic(&x, &(-y), &1.into(), &d, 60);
        assert!((&big + &small).abs() < ScaledReal::pow2_neg(59));
        assert!(close(&big, (2.0 * 1_766_319_049f64).ln(), 1e-9));
    }

    #[test]
    fn precision_refinement_is_consistent() {
        let a = ln_step_factor(6, 2, 52, 20);
        let b = ln_step_factor(6, 2, 52, 120);
        assert!((&a - &b).abs() < ScaledReal::pow2_neg(20));
    }
}
