use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fixedpoint::ScaledReal;

/// Convergent `num/den` of a continued fraction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Convergent {
    pub num: i128,
    pub den: i128,
}

impl Convergent {
    pub fn value(&self) -> ScaledReal {
        ScaledReal::ratio(self.num, self.den)
    }
}

/// Convergents of `num/den` (with `den > 0`) whose denominators do not exceed
/// `cap`, in order.
pub fn convergents_of(num: &BigInt, den: &BigInt, cap: u128) -> Vec<Convergent> {
    assert!(den.is_positive(), "denominator must be positive");
    let (mut a, mut b) = (num.clone(), den.clone());
    let (mut p0, mut q0) = (BigInt::from(1), BigInt::zero());
    let (mut p1, mut q1) = (BigInt::zero(), BigInt::from(1));
    let mut out = Vec::new();
    while !b.is_zero() {
        let (t, r) = a.div_mod_floor(&b);
        let p = &t * &p0 + &p1;
        let q = &t * &q0 + &q1;
        if q > BigInt::from(cap) {
            break;
        }
        out.push(Convergent { num: p.to_i128().expect("numerator fits"), den: q.to_i128().expect("denominator fits") });
        (p1, q1, p0, q0) = (p0, q0, p, q);
        (a, b) = (b, r);
    }
    out
}

/// A convergent `p/q` of `r` with `|r − p/q| < 1/(c q)` and `q ≤ c`.
pub fn cf_approx(r: &ScaledReal, c: &ScaledReal) -> Result<Convergent> {
    if *c <= ScaledReal::one() {
        return Err(Error::Precondition(format!("need c > 1, got {c}")));
    }
    let cap = c.floor().to_u128().ok_or_else(|| Error::Precondition("c too large".into()))?;
    let r = r.normalized();
    let best = *convergents_of(r.mantissa(), r.scale(), cap).last().expect("the first convergent has q = 1");
    let err = (r - best.value()).abs();
    if err >= ScaledReal::one().div(&c.mul_int(best.den)) {
        return Err(Error::Precision(format!("convergent {}/{} misses the bound", best.num, best.den)));
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;
    use proptest::prelude::*;

    #[test]
    fn integers_and_pi() {
        let c = cf_approx(&ScaledReal::from_int(24), &ScaledReal::from_int(7)).unwrap();
        assert_eq!(c, Convergent { num: 24, den: 1 });
        let pi = ScaledReal::ratio(355, 113);
        let c = cf_approx(&pi, &ScaledReal::from_int(200)).unwrap();
        // oracle: the expansion [3; 7, 16] gives 22/7 then 355/113
        assert_eq!(c, Convergent { num: 355, den: 113 });
        let c = cf_approx(&pi, &ScaledReal::from_int(100)).unwrap();
        assert_eq!(c, Convergent { num: 22, den: 7 });
        assert!(cf_approx(&pi, &ScaledReal::one()).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(256))]

        #[test]
        fn lemma_conditions_hold(num in -100_000i64..100_000, den in 1i64..100_000, c in 2u64..10_000) {
            let r = ScaledReal::ratio(num, den);
            let cv = cf_approx(&r, &ScaledReal::from_int(c)).unwrap();
            prop_assert!(cv.den as u64 <= c);
            let exact = BigRational::new(num.into(), den.into());
            let approx = BigRational::new(cv.num.into(), cv.den.into());
            let err = (exact - approx).abs();
            prop_assert!(err < BigRational::new(1.into(), (c as i128 * cv.den).into()));
        }
    }
}
