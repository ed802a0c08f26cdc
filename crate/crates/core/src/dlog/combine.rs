use num_bigint::BigInt;
use serde::Serialize;

use super::params::DlogParams;
use crate::error::{Error, Result};
use crate::fixedpoint::ScaledReal;

/// `(g, s, t)` with `s a + t b = g = gcd(a, b)`.
pub fn extended_gcd(a: i128, b: i128) -> (i128, i128, i128) {
    let (mut r0, mut r1) = (a, b);
    let (mut s0, mut s1) = (1i128, 0i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0.div_euclid(r1);
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    if r0 < 0 {
        (-r0, -s0, -t0)
    } else {
        (r0, s0, t0)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Combination {
    pub s: i128,
    pub t: i128,
    /// `(s h1 + t h2) / (N M)`.
    pub r: ScaledReal,
    /// `r` reduced into `[0, R̂)`.
    pub d_hat: ScaledReal,
}

/// Combines two samples `(h, k)`; `None` when `gcd(k1, k2) ≠ 1`.
pub fn combine_samples(s1: (u64, u64), s2: (u64, u64), params: &DlogParams) -> Result<Option<Combination>> {
    let (h1, k1) = s1;
    let (h2, k2) = s2;
    if k1 == 0 && k2 == 0 {
        return Err(Error::Precondition("k1 = k2 = 0".into()));
    }
    let (g, s, t) = extended_gcd(k1 as i128, k2 as i128);
    if g != 1 {
        return Ok(None);
    }
    let num = BigInt::from(s) * h1 + BigInt::from(t) * h2;
    let r = ScaledReal::new(num, BigInt::from(params.n) * params.m)?;
    let wraps = r.div(&params.r_hat).floor();
    let d_hat = &r - &params.r_hat.mul_int(wraps);
    Ok(Some(Combination { s, t, r, d_hat }))
}
