//! The infrastructure access model: baby steps, giant steps and approximate
//! relative distances. Algorithms only see this interface; exact distances
//! are available through [`ExactOracle`] for test backends.

use std::fmt::Debug;
use std::hash::Hash;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fixedpoint::ScaledReal;

pub mod config;
pub mod cyclic;
pub mod synthetic;

pub use config::{Backend, BackendConfig};
pub use cyclic::CyclicGroup;
pub use synthetic::{OracleInfra, Point};

/// Witnessed constants for the standing assumptions on an infrastructure.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InfraParams {
    /// Lower bound on every baby-step gap.
    pub d_min_lower: ScaledReal,
    /// Upper bound on every baby-step gap.
    pub d_max_upper: ScaledReal,
    /// Any `k_bar` consecutive gaps sum to at least `d_k_bar`.
    pub k_bar: u32,
    pub d_k_bar: ScaledReal,
    /// Bounds on the circumference.
    pub r_upper: ScaledReal,
    pub r_lower: ScaledReal,
}

impl InfraParams {
    pub fn validate(&self) -> Result<()> {
        let ok = self.d_min_lower.is_positive()
            && self.d_max_upper >= self.d_min_lower
            && self.d_k_bar.is_positive()
            && self.k_bar >= 1
            && self.r_lower.is_positive()
            && self.r_upper >= self.r_lower;
        if ok {
            Ok(())
        } else {
            Err(Error::Certification(format!("inconsistent parameters {self:?}")))
        }
    }

    /// `⌈2 d_max / d_k̄⌉`, the number of k̄-blocks a reduction may need to cross.
    pub fn reduction_blocks(&self) -> u64 {
        let v = self.d_max_upper.mul_int(2).div(&self.d_k_bar).ceil();
        u64::try_from(v).expect("parameter ratio fits u64")
    }

    /// Hard cap on baby steps in one reduction.
    pub fn step_budget(&self) -> usize {
        4 * self.k_bar as usize * self.reduction_blocks().max(1) as usize
    }
}

/// A one-dimensional infrastructure `(X, d)`.
pub trait Infrastructure: Send + Sync {
    type Element: Clone + Eq + Hash + Debug + Send + Sync;

    fn origin(&self) -> Self::Element;
    fn bs(&self, x: &Self::Element) -> Self::Element;
    fn bs_inv(&self, x: &Self::Element) -> Self::Element;
    fn gs(&self, x: &Self::Element, y: &Self::Element) -> Self::Element;
    /// Within `2^-m` of `Δbs(x)`, deterministic in `(x, m)`.
    fn delta_bs(&self, x: &Self::Element, m: u32) -> ScaledReal;
    /// Within `2^-m` of `Δgs(x, y)`, deterministic in `(x, y, m)`.
    fn delta_gs(&self, x: &Self::Element, y: &Self::Element, m: u32) -> ScaledReal;

    /// `gs(x, y)` together with the approximate `Δgs(x, y)`.
    fn giant_step(&self, x: &Self::Element, y: &Self::Element, m: u32) -> (Self::Element, ScaledReal) {
        (self.gs(x, y), self.delta_gs(x, y, m))
    }

    fn params(&self) -> &InfraParams;

    /// Human readable label of an element, accepted back by `parse_element`.
    fn describe(&self, x: &Self::Element) -> String;

    /// Parses a backend-native element label, or `bs^k` for `k` baby steps
    /// from the origin.
    fn parse_element(&self, spec: &str) -> Result<Self::Element>;
}

/// Exact distances, available only on synthetic and cyclic backends.
pub trait ExactOracle: Infrastructure {
    fn oracle_distance(&self, x: &Self::Element) -> ScaledReal;
    fn circumference(&self) -> ScaledReal;
    /// All elements in order of distance, starting at the origin.
    fn elements(&self) -> Vec<Self::Element>;

    /// The element with the largest distance `≤ t` and the offset
    /// `t − d(x)`, for `0 ≤ t < R`.
    fn locate(&self, t: &ScaledReal) -> (Self::Element, ScaledReal) {
        let mut best = self.origin();
        for x in self.elements() {
            if self.oracle_distance(&x) <= *t {
                best = x;
            } else {
                break;
            }
        }
        let f = t - &self.oracle_distance(&best);
        (best, f)
    }

    fn oracle_delta_bs(&self, x: &Self::Element) -> ScaledReal {
        let r = self.circumference();
        let d = (self.oracle_distance(&self.bs(x)) - self.oracle_distance(x)).mod_reduce(&r);
        // a one-element infrastructure steps all the way around the circle
        if d.is_zero() { r } else { d }
    }
}

/// `bs^k(origin)` for `spec = "bs^k"`, `None` for other specs.
pub(crate) fn parse_baby_step_spec<I: Infrastructure + ?Sized>(infra: &I, spec: &str) -> Option<Result<I::Element>> {
    let k = spec.trim().strip_prefix("bs^")?;
    Some(match k.parse::<u64>() {
        Ok(k) => {
            let mut x = infra.origin();
            for _ in 0..k {
                x = infra.bs(&x);
            }
            Ok(x)
        }
        Err(_) => Err(Error::MalformedElement(spec.to_string())),
    })
}
