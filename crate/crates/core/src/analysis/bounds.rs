use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};

/// `sin(πx)/(πx)`, with `sinc(0) = 1`.
pub fn sinc(x: f64) -> f64 {
    if x == 0.0 {
        1.0
    } else {
        (PI * x).sin() / (PI * x)
    }
}

fn two_sin() -> f64 {
    2.0 * (PI / 32.0).sin()
}

fn pos(x: f64) -> f64 {
    x.max(0.0)
}

/// Lower bound on one invocation of the two-sample period estimator.
/// Factors that turn negative outside the formula's regime are clamped to 0.
/// Infinite `S` and `q` evaluate the limit.
pub fn bound_psuccess_circ(s: f64, q: f64) -> Result<f64> {
    if s.is_nan() || q.is_nan() || s <= 2.0 || q < 1.0 {
        return Err(Error::Precondition(format!("need S > 2 and q ≥ 1, got S={s}, q={q}")));
    }
    let good = pos(1.0 / 32.0 - 2.0 / s);
    let fill = if q.is_infinite() { 1.0 } else { pos(1.0 - 2.0 * s / q) };
    let fill = if s.is_infinite() && q.is_infinite() { 1.0 } else { fill };
    let c = pos(sinc(0.5 + 0.5 / s) - two_sin());
    Ok(0.5 * good * good * fill * fill * c.powi(4))
}

/// Probability mass of one good outcome class, `β` of the single-sample
/// analysis.
pub fn bound_good_pair(s: f64, q: f64) -> Result<f64> {
    if s <= 2.0 || q < 1.0 {
        return Err(Error::Precondition(format!("need S > 2 and q ≥ 1, got S={s}, q={q}")));
    }
    let c = pos(sinc(0.5 + 0.5 / s) - two_sin());
    Ok(pos(s / 32.0 - 2.0) * pos(1.0 / s - 2.0 / q) * c * c)
}

/// Probability that measuring the function register leaves a periodic state.
pub fn bound_periodic(n: f64, r: f64, d_min: f64, q: f64) -> Result<f64> {
    if n <= 0.0 || r <= 0.0 || d_min <= 0.0 || q <= 0.0 {
        return Err(Error::Precondition("bound_periodic needs positive arguments".into()));
    }
    Ok(pos(1.0 - 1.0 / (n * d_min) - 1.0 / (n * r)) * pos(1.0 - 2.0 * n * r / q))
}

/// Open interval of admissible `κ` for the discrete-logarithm bound.
pub fn kappa_interval(q: u64) -> (f64, f64) {
    ((1.0 - sinc(0.75)) / (1.0 - two_sin()), 1.0 - 2.0 / (2.0 * q as f64 + 1.0))
}

/// Lower bound on `Pr(|fiber| ≥ κ|𝒜|)`.
pub fn bound_fiber_size(kappa: f64, b_size: f64, r: f64, n: f64, d_min: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&kappa) {
        return Err(Error::Precondition(format!("κ = {kappa} outside [0, 1)")));
    }
    let image = (r * (n + 1.0 / d_min)).floor();
    Ok((b_size / image - kappa) / (1.0 - kappa))
}

fn dlog_core(fill: f64, kappa: f64, b_term: f64, p_g: f64) -> f64 {
    let inner = pos(1.0 - two_sin() - (1.0 - sinc(0.75)) / kappa);
    p_g * fill * fill * kappa * kappa / 2.0 * inner.powi(4) * b_term * b_term
}

/// Discrete-logarithm success bound at a fixed admissible `κ`.
pub fn bound_dlog(q: u64, b: u64, p_g: f64, kappa: f64) -> Result<f64> {
    let (lo, hi) = kappa_interval(q);
    if !(kappa > lo && kappa < hi) {
        return Err(Error::Precondition(format!("κ = {kappa} outside ({lo}, {hi})")));
    }
    if !(0.0..=1.0).contains(&p_g) || b == 0 {
        return Err(Error::Precondition("need p_g ∈ [0, 1] and B ≥ 1".into()));
    }
    let fill = pos(1.0 - 2.0 / ((2.0 * q as f64 + 1.0) * (1.0 - kappa)));
    Ok(dlog_core(fill, kappa, pos(1.0 / 64.0 - 2.0 / b as f64), p_g))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct KappaChoice {
    pub kappa: f64,
    pub bound: f64,
}

/// Grid search with 64 interior points followed by golden-section refinement.
fn maximize(lo: f64, hi: f64, f: impl Fn(f64) -> f64) -> KappaChoice {
    let pts = 64;
    let step = (hi - lo) / (pts + 1) as f64;
    let mut best = (0usize, f64::NEG_INFINITY);
    for i in 1..=pts {
        let v = f(lo + step * i as f64);
        if v > best.1 {
            best = (i, v);
        }
    }
    let (mut a, mut b) = (lo + step * (best.0 - 1) as f64, lo + step * (best.0 + 1) as f64);
    let g = (5f64.sqrt() - 1.0) / 2.0;
    for _ in 0..80 {
        let c = b - g * (b - a);
        let d = a + g * (b - a);
        if f(c) >= f(d) {
            b = d;
        } else {
            a = c;
        }
    }
    let mid = (a + b) / 2.0;
    let (kappa, bound) = if f(mid) >= best.1 { (mid, f(mid)) } else { (lo + step * best.0 as f64, best.1) };
    KappaChoice { kappa, bound }
}

/// `max_κ` of [`bound_dlog`]; `None` when the admissible interval is empty.
pub fn bound_dlog_max(q: u64, b: u64, p_g: f64) -> Result<Option<KappaChoice>> {
    let (lo, hi) = kappa_interval(q);
    if lo >= hi {
        return Ok(None);
    }
    bound_dlog(q, b, p_g, (lo + hi) / 2.0)?;
    Ok(Some(maximize(lo, hi, |k| bound_dlog(q, b, p_g, k).unwrap_or(0.0))))
}

/// The size-independent form valid for `R ≥ 256`, `q ≥ 8`.
pub fn bound_dlog_simplified(p_g: f64) -> Result<KappaChoice> {
    if !(0.0..=1.0).contains(&p_g) {
        return Err(Error::Precondition("need p_g ∈ [0, 1]".into()));
    }
    let lo = kappa_interval(8).0;
    let hi = 1.0 - 1.0 / 8.0;
    Ok(maximize(lo, hi, |k| dlog_core(pos(1.0 - 1.0 / (8.0 * (1.0 - k))), k, 1.0 / 128.0, p_g)))
}
