//! The infrastructure of reduced principal ideals of a real quadratic order.

use std::collections::HashMap;
use std::sync::Mutex;

use num_bigint::BigInt;

use super::forms::{self, bs_inv_unchecked, bs_unchecked, discriminant_for, giant_step_exact, ReducedForm};
use super::number::QuadNum;
use crate::error::{Error, Result};
use crate::fixedpoint::ScaledReal;
use crate::infra::{parse_baby_step_spec, InfraParams, Infrastructure};

/// Largest principal cycle certified at construction.
pub const CYCLE_LIMIT: usize = 2_000_000;

// precision of the logarithms used to certify the parameters
const CERT_BITS: u32 = 80;
const SLACK_BITS: u32 = 64;

type GsKey = (ReducedForm, ReducedForm);

pub struct QuadraticInfra {
    radicand: u64,
    disc: u64,
    big_disc: BigInt,
    params: InfraParams,
    cycle_len: usize,
    bs_cache: Mutex<HashMap<(ReducedForm, u32), ScaledReal>>,
    gs_cache: Mutex<HashMap<GsKey, (ReducedForm, QuadNum)>>,
    dgs_cache: Mutex<HashMap<(ReducedForm, ReducedForm, u32), ScaledReal>>,
}

impl std::fmt::Debug for QuadraticInfra {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("QuadraticInfra").field("D", &self.radicand).field("disc", &self.disc).finish()
    }
}

impl QuadraticInfra {
    /// Backend for `ℚ(√D)` using the order of discriminant `D` (if
    /// `D ≡ 1 mod 4`) or `4D`.
    pub fn new(d: u64) -> Result<Self> {
        Self::with_discriminant(d, discriminant_for(d)?)
    }

    /// Backend for an explicit discriminant, e.g. 52 for `ℤ[√13]`.
    pub fn with_discriminant(radicand: u64, disc: u64) -> Result<Self> {
        forms::check_discriminant(disc)?;
        let cycle = forms::principal_cycle(disc, CYCLE_LIMIT)?;
        let params = certify(&cycle)?;
        Ok(Self {
            radicand,
            disc,
            big_disc: BigInt::from(disc),
            params,
            cycle_len: cycle.len(),
            bs_cache: Mutex::new(HashMap::new()),
            gs_cache: Mutex::new(HashMap::new()),
            dgs_cache: Mutex::new(HashMap::new()),
        })
    }

    pub fn radicand(&self) -> u64 {
        self.radicand
    }

    pub fn discriminant(&self) -> u64 {
        self.disc
    }

    /// Number of reduced principal ideals, found while certifying.
    pub fn cycle_len(&self) -> usize {
        self.cycle_len
    }

    fn exact_giant(&self, x: &ReducedForm, y: &ReducedForm) -> (ReducedForm, QuadNum) {
        let key = if x <= y { (*x, *y) } else { (*y, *x) };
        if let Some(v) = self.gs_cache.lock().unwrap().get(&key) {
            return v.clone();
        }
        let s = giant_step_exact(&key.0, &key.1).expect("giant step on certified forms");
        let v = (s.form, s.theta);
        self.gs_cache.lock().unwrap().insert(key, v.clone());
        v
    }
}

/// Witnesses the standing assumptions by walking the whole cycle.
fn certify(cycle: &[ReducedForm]) -> Result<InfraParams> {
    let gaps: Vec<ScaledReal> = cycle.iter().map(|f| forms::qf_delta_bs(f, CERT_BITS)).collect::<Result<_>>()?;
    let err = ScaledReal::pow2_neg(CERT_BITS);
    let n = gaps.len();
    let total = gaps.iter().fold(ScaledReal::zero(), |a, g| a + g);
    let total_err = err.mul_int(n as u64);
    let lower = |v: &ScaledReal, e: &ScaledReal| (v - e).floor_to_bits(SLACK_BITS);
    let upper = |v: &ScaledReal, e: &ScaledReal| (v + e).ceil_to_bits(SLACK_BITS);
    let d_min = lower(gaps.iter().min().unwrap(), &err);
    let d_max = upper(gaps.iter().max().unwrap(), &err);
    let (k_bar, d_k_bar) = if n >= 2 {
        let pair = (0..n).map(|i| &gaps[i] + &gaps[(i + 1) % n]).min().unwrap();
        (2, lower(&pair, &err.mul_int(2)))
    } else {
        (1, d_min.clone())
    };
    let r_upper = ScaledReal::from_int(upper(&total, &total_err).ceil());
    let r_lower = ScaledReal::from_int(lower(&total, &total_err).floor()).max(d_min.clone());
    let params = InfraParams { d_min_lower: d_min, d_max_upper: d_max, k_bar, d_k_bar, r_upper, r_lower };
    params.validate()?;
    if !params.d_min_lower.is_positive() {
        return Err(Error::Certification("a baby step has no certified positive length".into()));
    }
    Ok(params)
}

impl Infrastructure for QuadraticInfra {
    type Element = ReducedForm;

    fn origin(&self) -> ReducedForm {
        ReducedForm::principal(self.disc).expect("checked discriminant")
    }

    fn bs(&self, x: &ReducedForm) -> ReducedForm {
        bs_unchecked(x)
    }

    fn bs_inv(&self, x: &ReducedForm) -> ReducedForm {
        bs_inv_unchecked(x)
    }

    fn gs(&self, x: &ReducedForm, y: &ReducedForm) -> ReducedForm {
        self.exact_giant(x, y).0
    }

    fn delta_bs(&self, x: &ReducedForm, m: u32) -> ScaledReal {
        if let Some(v) = self.bs_cache.lock().unwrap().get(&(*x, m)) {
            return v.clone();
        }
        let v = forms::qf_delta_bs(x, m).expect("reduced form");
        self.bs_cache.lock().unwrap().insert((*x, m), v.clone());
        v
    }

    fn delta_gs(&self, x: &ReducedForm, y: &ReducedForm, m: u32) -> ScaledReal {
        let key = if x <= y { (*x, *y, m) } else { (*y, *x, m) };
        if let Some(v) = self.dgs_cache.lock().unwrap().get(&key) {
            return v.clone();
        }
        let (_, theta) = self.exact_giant(x, y);
        let v = theta.ln_abs(&self.big_disc, m);
        self.dgs_cache.lock().unwrap().insert(key, v.clone());
        v
    }

    fn params(&self) -> &InfraParams {
        &self.params
    }

    fn describe(&self, x: &ReducedForm) -> String {
        x.to_string()
    }

    fn parse_element(&self, spec: &str) -> Result<ReducedForm> {
        if let Some(r) = parse_baby_step_spec(self, spec) {
            return r;
        }
        let bad = || Error::MalformedElement(spec.to_string());
        let s = spec.trim().trim_start_matches('(').trim_end_matches(')');
        let (p, q) = s.split_once(',').ok_or_else(bad)?;
        let p: i64 = p.trim().parse().map_err(|_| bad())?;
        let q: i64 = q.trim().parse().map_err(|_| bad())?;
        ReducedForm::new(p, q, self.disc)
    }
}
