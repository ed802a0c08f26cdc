//! A finite cyclic group `⟨g⟩` of order `n` viewed as an infrastructure with
//! unit gaps: baby steps multiply by `g`, giant steps multiply elements.

use serde::Serialize;

use super::{parse_baby_step_spec, ExactOracle, InfraParams, Infrastructure};
use crate::error::{Error, Result};
use crate::fixedpoint::ScaledReal;

/// The element `g^k`, stored by its exponent.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Power(pub u64);

#[derive(Clone, Debug)]
pub struct CyclicGroup {
    order: u64,
    params: InfraParams,
}

impl CyclicGroup {
    pub fn new(order: u64) -> Result<Self> {
        if order == 0 || order > 1 << 40 {
            return Err(Error::Config(format!("cyclic order {order} out of range")));
        }
        let one = ScaledReal::one();
        let r = ScaledReal::from_int(order);
        let params = InfraParams {
            d_min_lower: one.clone(),
            d_max_upper: one.clone(),
            k_bar: 1,
            d_k_bar: one,
            r_upper: r.clone(),
            r_lower: r,
        };
        Ok(Self { order, params })
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    fn check(&self, x: &Power) {
        assert!(x.0 < self.order, "exponent {} out of range", x.0);
    }
}

impl Infrastructure for CyclicGroup {
    type Element = Power;

    fn origin(&self) -> Power {
        Power(0)
    }

    fn bs(&self, x: &Power) -> Power {
        self.check(x);
        Power((x.0 + 1) % self.order)
    }

    fn bs_inv(&self, x: &Power) -> Power {
        self.check(x);
        Power((x.0 + self.order - 1) % self.order)
    }

    fn gs(&self, x: &Power, y: &Power) -> Power {
        self.check(x);
        self.check(y);
        Power(((x.0 as u128 + y.0 as u128) % self.order as u128) as u64)
    }

    fn delta_bs(&self, _x: &Power, _m: u32) -> ScaledReal {
        ScaledReal::one()
    }

    fn delta_gs(&self, _x: &Power, _y: &Power, _m: u32) -> ScaledReal {
        ScaledReal::zero()
    }

    fn params(&self) -> &InfraParams {
        &self.params
    }

    fn describe(&self, x: &Power) -> String {
        format!("g^{}", x.0)
    }

    fn parse_element(&self, spec: &str) -> Result<Power> {
        if let Some(r) = parse_baby_step_spec(self, spec) {
            return r;
        }
        let s = spec.trim();
        let s = s.strip_prefix("g^").unwrap_or(s);
        match s.parse::<u64>() {
            Ok(k) => Ok(Power(k % self.order)),
            Err(_) => Err(Error::MalformedElement(spec.to_string())),
        }
    }
}

impl ExactOracle for CyclicGroup {
    fn oracle_distance(&self, x: &Power) -> ScaledReal {
        self.check(x);
        ScaledReal::from_int(x.0)
    }

    fn circumference(&self) -> ScaledReal {
        ScaledReal::from_int(self.order)
    }

    fn elements(&self) -> Vec<Power> {
        (0..self.order).map(Power).collect()
    }

    fn locate(&self, t: &ScaledReal) -> (Power, ScaledReal) {
        let k = t.floor();
        let f = t - &ScaledReal::from_int(k.clone());
        (Power(u64::try_from(k).expect("distance in range")), f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn group_steps() {
        let g = CyclicGroup::new(12).unwrap();
        assert_eq!(g.bs(&Power(3)), Power(4));
        assert_eq!(g.bs(&Power(11)), Power(0));
        assert_eq!(g.gs(&Power(3), &Power(5)), Power(8));
        assert_eq!(g.gs(&Power(7), &Power(9)), Power(4));
        assert_eq!(g.delta_bs(&Power(4), 3), ScaledReal::one());
        assert!(g.delta_gs(&Power(4), &Power(9), 3).is_zero());
        assert_eq!(g.oracle_distance(&Power(7)), ScaledReal::from_int(7));
        assert_eq!(g.parse_element("g^14").unwrap(), Power(2));
    }
}
