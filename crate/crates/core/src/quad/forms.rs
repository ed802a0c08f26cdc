//! Reduced principal ideals of a real quadratic order, written as quadratic
//! irrationals `(P + √Δ)/Q`, with continued-fraction baby steps and
//! composition-based giant steps.
//!
//! The ideal `[A, (b + √Δ)/2]` is stored as `P = b`, `Q = 2A`, so
//! `2Q | Δ − P²` always holds.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_integer::{Integer, Roots};
use serde::Serialize;

use super::log::ln_step_factor;
use super::number::QuadNum;
use crate::error::{Error, Result};
use crate::fixedpoint::ScaledReal;

/// `(p + √disc)/q`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct ReducedForm {
    pub p: i64,
    pub q: i64,
    pub disc: u64,
}

// reductions of a freshly composed ideal never come close to this
const MAX_REDUCTION_STEPS: usize = 100_000;

pub fn is_square(n: u64) -> bool {
    let r = n.sqrt();
    r * r == n
}

/// Discriminant of the order `ℤ[(1+√D)/2]` if `D ≡ 1 (mod 4)`, else `ℤ[√D]`.
pub fn discriminant_for(d: u64) -> Result<u64> {
    if d < 2 || is_square(d) {
        return Err(Error::Config(format!("D = {d} must be a non-square integer ≥ 2")));
    }
    let disc = if d % 4 == 1 { d } else { 4 * d };
    check_discriminant(disc)?;
    Ok(disc)
}

pub fn check_discriminant(disc: u64) -> Result<()> {
    if disc < 5 || is_square(disc) || !(disc % 4 == 0 || disc % 4 == 1) || disc > 1 << 40 {
        return Err(Error::Config(format!("{disc} is not a usable discriminant")));
    }
    Ok(())
}

impl ReducedForm {
    pub fn new(p: i64, q: i64, disc: u64) -> Result<Self> {
        check_discriminant(disc)?;
        let f = Self { p, q, disc };
        if !f.is_ideal() || !f.is_reduced() {
            return Err(Error::MalformedElement(format!("({p} + √{disc})/{q} is not a reduced ideal")));
        }
        Ok(f)
    }

    /// The order itself, `[1, (b + √Δ)/2]` with the largest admissible `b < √Δ`.
    pub fn principal(disc: u64) -> Result<Self> {
        check_discriminant(disc)?;
        let s = disc.sqrt() as i64;
        let b = if (s as u64 % 2) == disc % 2 { s } else { s - 1 };
        Self::new(b, 2, disc)
    }

    fn root_floor(&self) -> i64 {
        self.disc.sqrt() as i64
    }

    /// `Q > 0`, `Q` even and `2Q | Δ − P²`.
    pub fn is_ideal(&self) -> bool {
        let t = self.disc as i128 - (self.p as i128).pow(2);
        self.q > 0 && self.q % 2 == 0 && t % (2 * self.q as i128) == 0
    }

    /// `(P + √Δ)/Q > 1` and `−1 < (P − √Δ)/Q < 0`, checked by squaring.
    pub fn is_reduced(&self) -> bool {
        let (p, q, d) = (self.p as i128, self.q as i128, self.disc as i128);
        if q <= 0 {
            return false;
        }
        let above_one = q - p <= 0 || (q - p).pow(2) < d;
        let conj_negative = p < 0 || p * p < d;
        let conj_above_minus_one = q + p > 0 && (q + p).pow(2) > d;
        above_one && conj_negative && conj_above_minus_one
    }

    fn check(&self) -> Result<()> {
        if self.is_ideal() && self.is_reduced() {
            Ok(())
        } else {
            Err(Error::MalformedElement(format!("{self:?} is not reduced")))
        }
    }

    /// `P` of the next form in the cycle.
    fn next_p(&self) -> i64 {
        let a = Integer::div_floor(&(self.p + self.root_floor()), &self.q);
        a * self.q - self.p
    }
}

/// One continued-fraction step.
pub fn qf_bs(f: &ReducedForm) -> Result<ReducedForm> {
    f.check()?;
    Ok(bs_unchecked(f))
}

pub(crate) fn bs_unchecked(f: &ReducedForm) -> ReducedForm {
    let p = f.next_p();
    let q = ((f.disc as i128 - (p as i128).pow(2)) / f.q as i128) as i64;
    ReducedForm { p, q, disc: f.disc }
}

/// Inverse of [`qf_bs`].
pub fn qf_bs_inv(f: &ReducedForm) -> Result<ReducedForm> {
    f.check()?;
    Ok(bs_inv_unchecked(f))
}

pub(crate) fn bs_inv_unchecked(f: &ReducedForm) -> ReducedForm {
    let q_prev = ((f.disc as i128 - (f.p as i128).pow(2)) / f.q as i128) as i64;
    let a = Integer::div_floor(&(f.p + f.root_floor()), &q_prev);
    ReducedForm { p: a * q_prev - f.p, q: q_prev, disc: f.disc }
}

/// The factor `ψ = (P' + √Δ)/Q > 1` relating `f` and its successor:
/// `bs(f) = ψ · f` as ideals.
pub fn step_factor(f: &ReducedForm) -> QuadNum {
    QuadNum::new(f.next_p(), 1, f.q)
}

/// `ln ψ` for the step out of `f`, within `2^-m`.
pub fn qf_delta_bs(f: &ReducedForm, m: u32) -> Result<ScaledReal> {
    f.check()?;
    Ok(ln_step_factor(f.next_p(), f.q, f.disc, m))
}

/// Product of the ideals `[a1, (b1+√Δ)/2]` and `[a2, (b2+√Δ)/2]` as
/// `content · [a3, (b3+√Δ)/2]`, returned as `(a3, b3, content)`.
pub fn compose(f: &ReducedForm, g: &ReducedForm) -> (i128, i128, i128) {
    let disc = f.disc as i128;
    let (mut a1, mut b1) = (f.q as i128 / 2, f.p as i128);
    let (mut a2, mut b2) = (g.q as i128 / 2, g.p as i128);
    if a1 > a2 {
        std::mem::swap(&mut a1, &mut a2);
        std::mem::swap(&mut b1, &mut b2);
    }
    let c2 = (b2 * b2 - disc) / (4 * a2);
    let s = (b1 + b2) / 2;
    let n = b2 - s;
    let (y1, d) = if a2 % a1 == 0 {
        (0, a1)
    } else {
        let e = a2.extended_gcd(&a1);
        (e.x, e.gcd)
    };
    let (x2, y2, d1) = if s % d == 0 {
        (0, -1, d)
    } else {
        let e = s.extended_gcd(&d);
        (e.x, -e.y, e.gcd)
    };
    let v1 = a1 / d1;
    let v2 = a2 / d1;
    let r = (y1 * y2 * n - x2 * c2).mod_floor(&v1);
    let b3 = b2 + 2 * v2 * r;
    let a3 = v1 * v2;
    // keep b3 small: any representative mod 2·a3 describes the same ideal
    let b3 = b3 - 2 * a3 * Integer::div_floor(&(b3 - a3), &(2 * a3)) - 2 * a3;
    (a3, b3, d1)
}

/// Reduces the ideal `(p + √Δ)/q` (with `q` possibly negative) by
/// continued-fraction steps. Returns the reduced form, the factor `ψ` with
/// `result = ψ · start` as ideals, and the number of steps.
pub fn reduce_ideal(p: i128, q: i128, disc: u64) -> (ReducedForm, QuadNum, usize) {
    let d = disc as i128;
    let s = (disc.sqrt()) as i128;
    let big_d = BigInt::from(disc);
    let (mut p, mut q) = (p, q);
    let mut psi = QuadNum::one();
    for steps in 0..MAX_REDUCTION_STEPS {
        if let (Ok(p64), Ok(q64)) = (i64::try_from(p), i64::try_from(q)) {
            let f = ReducedForm { p: p64, q: q64, disc };
            if f.is_reduced() {
                return (f, psi, steps);
            }
        }
        let fl = Integer::div_floor(&(p + s), &q.abs());
        let a = if q > 0 { fl } else { -fl - 1 };
        let p_next = a * q - p;
        let q_next = (d - p_next * p_next) / q;
        psi = psi.mul(&QuadNum::new(p_next, 1, q), &big_d);
        p = p_next;
        q = q_next;
    }
    panic!("ideal reduction did not terminate for discriminant {disc}");
}

/// Exact result of a giant step.
#[derive(Clone, Debug)]
pub struct GiantStep {
    pub form: ReducedForm,
    /// `d(form) = d(f) + d(g) + ln |theta|`, with `|theta| ≥ 1` minimal.
    pub theta: QuadNum,
    pub steps: usize,
}

pub fn giant_step_exact(f: &ReducedForm, g: &ReducedForm) -> Result<GiantStep> {
    if f.disc != g.disc {
        return Err(Error::Precondition(format!("discriminants {} and {} differ", f.disc, g.disc)));
    }
    f.check()?;
    g.check()?;
    let big_d = BigInt::from(f.disc);
    let (a3, b3, content) = compose(f, g);
    let (mut z, psi, mut steps) = reduce_ideal(b3, 2 * a3, f.disc);
    let mut theta = psi.mul(&QuadNum::new(1, 0, content), &big_d);
    while theta.cmp_abs_one(&big_d) == Ordering::Less {
        theta = theta.mul(&step_factor(&z), &big_d);
        z = bs_unchecked(&z);
        steps += 1;
    }
    loop {
        let prev = bs_inv_unchecked(&z);
        let back = theta.div(&step_factor(&prev), &big_d);
        if back.cmp_abs_one(&big_d) == Ordering::Less {
            break;
        }
        theta = back;
        z = prev;
        steps += 1;
    }
    Ok(GiantStep { form: z, theta, steps })
}

/// Composition followed by reduction, landing on the first element at
/// distance at least `d(f) + d(g)`.
pub fn qf_gs(f: &ReducedForm, g: &ReducedForm) -> Result<(ReducedForm, usize)> {
    giant_step_exact(f, g).map(|s| (s.form, s.steps))
}

/// All forms of the principal cycle, starting at the order itself.
pub fn principal_cycle(disc: u64, limit: usize) -> Result<Vec<ReducedForm>> {
    let x0 = ReducedForm::principal(disc)?;
    let mut out = vec![x0];
    let mut x = bs_unchecked(&x0);
    while x != x0 {
        if out.len() >= limit {
            return Err(Error::Certification(format!("principal cycle longer than {limit}")));
        }
        out.push(x);
        x = bs_unchecked(&x);
    }
    Ok(out)
}

impl ReducedForm {
    /// The ideal's `ℤ`-basis `{A, (P + √Δ)/2}` as coordinates `(α, β)` of
    /// `(α + β√Δ)/2`.
    pub fn basis(&self) -> [(i128, i128); 2] {
        [(self.q as i128, 0), (self.p as i128, 1)]
    }
}

impl std::fmt::Display for ReducedForm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({},{})", self.p, self.q)
    }
}
