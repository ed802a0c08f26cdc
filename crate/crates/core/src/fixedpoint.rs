//! Exact rational numbers stored as `mantissa / scale`.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

// Mantissa and scale are reduced by their gcd once either grows past this.
const NORMALIZE_BITS: u64 = 256;

/// An exact real number `mantissa / scale` with `scale >= 1`.
///
/// The representation is not kept in lowest terms; equality, ordering and
/// hashing are by value.
#[derive(Clone)]
pub struct ScaledReal {
    mantissa: BigInt,
    scale: BigInt,
}

impl ScaledReal {
    pub fn new(mantissa: impl Into<BigInt>, scale: impl Into<BigInt>) -> Result<Self> {
        let (mut m, mut s) = (mantissa.into(), scale.into());
        if s.is_zero() {
            return Err(Error::ZeroScale);
        }
        if s.is_negative() {
            m = -m;
            s = -s;
        }
        Ok(Self { mantissa: m, scale: s }.tidy())
    }

    /// `mantissa / scale`; panics if `scale` is zero.
    pub fn ratio(mantissa: impl Into<BigInt>, scale: impl Into<BigInt>) -> Self {
        Self::new(mantissa, scale).expect("nonzero scale")
    }

    pub fn from_int(v: impl Into<BigInt>) -> Self {
        Self { mantissa: v.into(), scale: BigInt::one() }
    }

    pub fn zero() -> Self {
        Self::from_int(0)
    }

    pub fn one() -> Self {
        Self::from_int(1)
    }

    /// `mantissa / 2^bits`.
    pub fn dyadic(mantissa: impl Into<BigInt>, bits: u32) -> Self {
        Self { mantissa: mantissa.into(), scale: BigInt::one() << bits }.tidy()
    }

    /// `2^-bits`.
    pub fn pow2_neg(bits: u32) -> Self {
        Self::dyadic(1, bits)
    }

    pub fn mantissa(&self) -> &BigInt {
        &self.mantissa
    }

    pub fn scale(&self) -> &BigInt {
        &self.scale
    }

    fn tidy(self) -> Self {
        if self.mantissa.bits() > NORMALIZE_BITS || self.scale.bits() > NORMALIZE_BITS {
            self.normalized()
        } else {
            self
        }
    }

    /// The same value in lowest terms.
    pub fn normalized(&self) -> Self {
        let g = self.mantissa.gcd(&self.scale);
        if g.is_one() || g.is_zero() {
            return self.clone();
        }
        Self { mantissa: &self.mantissa / &g, scale: &self.scale / &g }
    }

    pub fn is_zero(&self) -> bool {
        self.mantissa.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.mantissa.is_negative()
    }

    pub fn is_positive(&self) -> bool {
        self.mantissa.is_positive()
    }

    pub fn abs(&self) -> Self {
        Self { mantissa: self.mantissa.abs(), scale: self.scale.clone() }
    }

    pub fn floor(&self) -> BigInt {
        self.mantissa.div_floor(&self.scale)
    }

    pub fn ceil(&self) -> BigInt {
        -((-&self.mantissa).div_floor(&self.scale))
    }

    /// Nearest integer, exact halves rounded toward +∞.
    pub fn round_nearest(&self) -> BigInt {
        let two = BigInt::from(2u8);
        (&self.mantissa * &two + &self.scale).div_floor(&(&self.scale * &two))
    }

    /// `⌊self · n⌋`.
    pub fn floor_scaled(&self, n: u64) -> BigInt {
        (&self.mantissa * n).div_floor(&self.scale)
    }

    /// The representative of `self` modulo `modulus` in `[0, modulus)`.
    pub fn mod_reduce(&self, modulus: &ScaledReal) -> ScaledReal {
        assert!(modulus.is_positive(), "modulus must be positive");
        let k = self.div(modulus).floor();
        self - &modulus.mul_int(k)
    }

    pub fn mul_int(&self, k: impl Into<BigInt>) -> Self {
        Self { mantissa: &self.mantissa * k.into(), scale: self.scale.clone() }.tidy()
    }

    pub fn div_int(&self, k: impl Into<BigInt>) -> Self {
        Self::ratio(self.mantissa.clone(), &self.scale * k.into()).tidy()
    }

    /// Exact quotient; panics on division by zero.
    pub fn div(&self, other: &ScaledReal) -> Self {
        Self::ratio(&self.mantissa * &other.scale, &self.scale * &other.mantissa)
    }

    pub fn min(self, other: Self) -> Self {
        if other < self { other } else { self }
    }

    pub fn max(self, other: Self) -> Self {
        if other > self { other } else { self }
    }

    /// Round down to a multiple of `2^-bits`.
    pub fn floor_to_bits(&self, bits: u32) -> Self {
        Self::dyadic(self.floor_scaled_big(&(BigInt::one() << bits)), bits)
    }

    /// Round up to a multiple of `2^-bits`.
    pub fn ceil_to_bits(&self, bits: u32) -> Self {
        let s = BigInt::one() << bits;
        let f = -((-&self.mantissa * &s).div_floor(&self.scale));
        Self::dyadic(f, bits)
    }

    fn floor_scaled_big(&self, n: &BigInt) -> BigInt {
        (&self.mantissa * n).div_floor(&self.scale)
    }

    pub fn to_f64(&self) -> f64 {
        let n = self.normalized();
        let shift = n.mantissa.bits().max(n.scale.bits()).saturating_sub(1000);
        let m = (&n.mantissa >> shift).to_f64().unwrap_or(f64::NAN);
        let s = (&n.scale >> shift).to_f64().unwrap_or(f64::NAN);
        if s == 0.0 {
            // scale collapsed under the shift, value is huge
            return if m.is_sign_negative() { f64::NEG_INFINITY } else { f64::INFINITY };
        }
        m / s
    }

    /// Decimal string rounded to `digits` fractional digits.
    pub fn to_decimal(&self, digits: u32) -> String {
        let p = BigInt::from(10u32).pow(digits);
        let two = BigInt::from(2u8);
        let v = (&self.mantissa * &p * &two + &self.scale).div_floor(&(&self.scale * &two));
        let neg = v.is_negative();
        let v = v.abs();
        let (ip, fp) = v.div_rem(&p);
        let mut out = String::new();
        if neg {
            out.push('-');
        }
        out.push_str(&ip.to_string());
        if digits > 0 {
            out.push('.');
            out.push_str(&format!("{:0>width$}", fp.to_string(), width = digits as usize));
        }
        out
    }

    /// Parses `p/q`, an integer, or a decimal such as `-2.5e-3`.
    pub fn parse(s: &str) -> Result<Self> {
        let t = s.trim();
        let bad = || Error::Parse(s.to_string());
        if let Some((p, q)) = t.split_once('/') {
            let p: BigInt = p.trim().parse().map_err(|_| bad())?;
            let q: BigInt = q.trim().parse().map_err(|_| bad())?;
            return Self::new(p, q).map_err(|_| bad());
        }
        let (body, exp) = match t.find(['e', 'E']) {
            Some(i) => (&t[..i], t[i + 1..].parse::<i32>().map_err(|_| bad())?),
            None => (t, 0),
        };
        let (neg, body) = match body.strip_prefix('-') {
            Some(b) => (true, b),
            None => (false, body.strip_prefix('+').unwrap_or(body)),
        };
        let (ip, fp) = body.split_once('.').unwrap_or((body, ""));
        if ip.is_empty() && fp.is_empty() {
            return Err(bad());
        }
        if !ip.chars().chain(fp.chars()).all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let digits = format!("{ip}{fp}");
        let mut m: BigInt = digits.parse().map_err(|_| bad())?;
        if neg {
            m = -m;
        }
        let e = exp - fp.len() as i32;
        let ten = BigInt::from(10u32);
        Ok(if e >= 0 {
            Self::from_int(m * ten.pow(e as u32))
        } else {
            Self::ratio(m, ten.pow(e.unsigned_abs()))
        })
    }
}

impl Default for ScaledReal {
    fn default() -> Self {
        Self::zero()
    }
}

impl From<i64> for ScaledReal {
    fn from(v: i64) -> Self {
        Self::from_int(v)
    }
}

impl From<BigInt> for ScaledReal {
    fn from(v: BigInt) -> Self {
        Self::from_int(v)
    }
}

impl PartialEq for ScaledReal {
    fn eq(&self, other: &Self) -> bool {
        if self.scale == other.scale {
            return self.mantissa == other.mantissa;
        }
        &self.mantissa * &other.scale == &other.mantissa * &self.scale
    }
}

impl Eq for ScaledReal {}

impl PartialOrd for ScaledReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ScaledReal {
    fn cmp(&self, other: &Self) -> Ordering {
        if self.scale == other.scale {
            return self.mantissa.cmp(&other.mantissa);
        }
        (&self.mantissa * &other.scale).cmp(&(&other.mantissa * &self.scale))
    }
}

impl std::hash::Hash for ScaledReal {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        let n = self.normalized();
        n.mantissa.hash(state);
        n.scale.hash(state);
    }
}

fn add_parts(a: &ScaledReal, b: &ScaledReal, negate_b: bool) -> ScaledReal {
    let bm = if negate_b { -&b.mantissa } else { b.mantissa.clone() };
    if a.scale == b.scale {
        return ScaledReal { mantissa: &a.mantissa + bm, scale: a.scale.clone() };
    }
    if a.scale.is_one() {
        return ScaledReal { mantissa: &a.mantissa * &b.scale + bm, scale: b.scale.clone() };
    }
    if b.scale.is_one() {
        return ScaledReal { mantissa: &a.mantissa + bm * &a.scale, scale: a.scale.clone() };
    }
    let (q, r) = a.scale.div_rem(&b.scale);
    if r.is_zero() {
        return ScaledReal { mantissa: &a.mantissa + bm * q, scale: a.scale.clone() };
    }
    let (q, r) = b.scale.div_rem(&a.scale);
    if r.is_zero() {
        return ScaledReal { mantissa: &a.mantissa * q + bm, scale: b.scale.clone() };
    }
    ScaledReal { mantissa: &a.mantissa * &b.scale + bm * &a.scale, scale: &a.scale * &b.scale }.tidy()
}

impl Add<&ScaledReal> for &ScaledReal {
    type Output = ScaledReal;
    fn add(self, rhs: &ScaledReal) -> ScaledReal {
        add_parts(self, rhs, false)
    }
}

impl Sub<&ScaledReal> for &ScaledReal {
    type Output = ScaledReal;
    fn sub(self, rhs: &ScaledReal) -> ScaledReal {
        add_parts(self, rhs, true)
    }
}

impl Mul<&ScaledReal> for &ScaledReal {
    type Output = ScaledReal;
    fn mul(self, rhs: &ScaledReal) -> ScaledReal {
        ScaledReal { mantissa: &self.mantissa * &rhs.mantissa, scale: &self.scale * &rhs.scale }.tidy()
    }
}

macro_rules! owned_ops {
    ($tr:ident, $f:ident) => {
        impl $tr<ScaledReal> for ScaledReal {
            type Output = ScaledReal;
            fn $f(self, rhs: ScaledReal) -> ScaledReal {
                (&self).$f(&rhs)
            }
        }
        impl $tr<&ScaledReal> for ScaledReal {
            type Output = ScaledReal;
            fn $f(self, rhs: &ScaledReal) -> ScaledReal {
                (&self).$f(rhs)
            }
        }
        impl $tr<ScaledReal> for &ScaledReal {
            type Output = ScaledReal;
            fn $f(self, rhs: ScaledReal) -> ScaledReal {
                self.$f(&rhs)
            }
        }
    };
}
owned_ops!(Add, add);
owned_ops!(Sub, sub);
owned_ops!(Mul, mul);

impl AddAssign<&ScaledReal> for ScaledReal {
    fn add_assign(&mut self, rhs: &ScaledReal) {
        *self = &*self + rhs;
    }
}

impl SubAssign<&ScaledReal> for ScaledReal {
    fn sub_assign(&mut self, rhs: &ScaledReal) {
        *self = &*self - rhs;
    }
}

impl Neg for ScaledReal {
    type Output = ScaledReal;
    fn neg(self) -> ScaledReal {
        ScaledReal { mantissa: -self.mantissa, scale: self.scale }
    }
}

impl Neg for &ScaledReal {
    type Output = ScaledReal;
    fn neg(self) -> ScaledReal {
        ScaledReal { mantissa: -&self.mantissa, scale: self.scale.clone() }
    }
}

impl fmt::Display for ScaledReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.normalized();
        if n.scale.is_one() {
            write!(f, "{}", n.mantissa)
        } else {
            write!(f, "{}/{}", n.mantissa, n.scale)
        }
    }
}

impl fmt::Debug for ScaledReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (~{})", self, self.to_decimal(6))
    }
}

impl FromStr for ScaledReal {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Self::parse(s)
    }
}

impl Serialize for ScaledReal {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for ScaledReal {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        Self::parse(&s).map_err(serde::de::Error::custom)
    }
}

/// Serializes a big integer as a decimal string.
pub fn serialize_bigint<S: Serializer>(v: &BigInt, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}
