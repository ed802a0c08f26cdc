//! Exact elements `(u + v√Δ)/w` of a real quadratic field.

use std::cmp::Ordering;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::log::ln_abs_quadratic;
use crate::fixedpoint::ScaledReal;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuadNum {
    pub u: BigInt,
    pub v: BigInt,
    /// Always positive.
    pub w: BigInt,
}

impl QuadNum {
    pub fn new(u: impl Into<BigInt>, v: impl Into<BigInt>, w: impl Into<BigInt>) -> Self {
        let (mut u, mut v, mut w) = (u.into(), v.into(), w.into());
        assert!(!w.is_zero(), "zero denominator");
        if w.is_negative() {
            u = -u;
            v = -v;
            w = -w;
        }
        Self { u, v, w }.reduced()
    }

    pub fn one() -> Self {
        Self::new(1, 0, 1)
    }

    fn reduced(self) -> Self {
        let g = self.u.gcd(&self.v).gcd(&self.w);
        if g.is_one() || g.is_zero() {
            self
        } else {
            Self { u: &self.u / &g, v: &self.v / &g, w: &self.w / &g }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.u.is_zero() && self.v.is_zero()
    }

    pub fn mul(&self, o: &QuadNum, disc: &BigInt) -> QuadNum {
        QuadNum::new(
            &self.u * &o.u + &self.v * &o.v * disc,
            &self.u * &o.v + &self.v * &o.u,
            &self.w * &o.w,
        )
    }

    /// `self / o` via the conjugate of `o`.
    pub fn div(&self, o: &QuadNum, disc: &BigInt) -> QuadNum {
        assert!(!o.is_zero(), "division by zero");
        let conj = QuadNum { u: o.u.clone(), v: -&o.v, w: BigInt::one() };
        let norm = &o.u * &o.u - &o.v * &o.v * disc;
        let num = self.mul(&conj, disc);
        QuadNum::new(num.u * &o.w, num.v * &o.w, num.w * norm)
    }

    /// Sign of the real number `self`.
    pub fn signum(&self, disc: &BigInt) -> Ordering {
        sign_of(&self.u, &self.v, disc)
    }

    /// Compares `|self|` with 1 exactly.
    pub fn cmp_abs_one(&self, disc: &BigInt) -> Ordering {
        let flip = self.signum(disc) == Ordering::Less;
        let (u, v) = if flip { (-&self.u, -&self.v) } else { (self.u.clone(), self.v.clone()) };
        sign_of(&(u - &self.w), &v, disc)
    }

    /// `ln |self|` within `2^-m`.
    pub fn ln_abs(&self, disc: &BigInt, m: u32) -> ScaledReal {
        let d: BigUint = disc.magnitude().clone();
        ln_abs_quadratic(&self.u, &self.v, &self.w, &d, m)
    }

    /// The conjugate `(u − v√Δ)/w`.
    pub fn conjugate(&self) -> QuadNum {
        QuadNum { u: self.u.clone(), v: -&self.v, w: self.w.clone() }
    }

    /// Norm `(u² − v²Δ)/w²` as a reduced fraction `(num, den)`.
    pub fn norm(&self, disc: &BigInt) -> (BigInt, BigInt) {
        let num = &self.u * &self.u - &self.v * &self.v * disc;
        let den = &self.w * &self.w;
        let g = num.gcd(&den);
        (num / &g, den / g)
    }
}

/// Exact sign of `a + b√Δ`.
pub fn sign_of(a: &BigInt, b: &BigInt, disc: &BigInt) -> Ordering {
    let sa = a.sign().cmp(&num_bigint::Sign::NoSign);
    let sb = b.sign().cmp(&num_bigint::Sign::NoSign);
    if sa == sb || sb == Ordering::Equal {
        return sa;
    }
    if sa == Ordering::Equal {
        return sb;
    }
    // opposite signs: the larger magnitude wins
    match (a * a).cmp(&(b * b * disc)) {
        Ordering::Greater => sa,
        _ => sb,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn field_arithmetic() {
        let d = BigInt::from(13);
        let e = QuadNum::new(3, 1, 2);
        let e3 = e.mul(&e, &d).mul(&e, &d);
        assert_eq!(e3, QuadNum::new(18, 5, 1));
        assert_eq!(e3.div(&e, &d), e.mul(&e, &d));
        assert_eq!(e.norm(&d), (BigInt::from(-1), BigInt::one()));
    }

    #[test]
    fn exact_comparisons() {
        let d = BigInt::from(2);
        // √2 − 1 is positive and below 1
        let a = QuadNum::new(-1, 1, 1);
        assert_eq!(a.signum(&d), Ordering::Greater);
        assert_eq!(a.cmp_abs_one(&d), Ordering::Less);
        // 1 − √2 is negative with absolute value below 1
        let b = QuadNum::new(1, -1, 1);
        assert_eq!(b.signum(&d), Ordering::Less);
        assert_eq!(b.cmp_abs_one(&d), Ordering::Less);
        assert_eq!(QuadNum::new(-3, 0, 3).cmp_abs_one(&d), Ordering::Equal);
        assert_eq!(QuadNum::new(0, -1, 1).cmp_abs_one(&d), Ordering::Greater);
    }
}
