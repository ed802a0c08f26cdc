//! f-representations `(x, f)` with `0 ≤ f < Δbs(x)`, and the group law.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fixedpoint::ScaledReal;
use crate::infra::Infrastructure;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct FRep<E> {
    pub x: E,
    pub f: ScaledReal,
}

impl<E> FRep<E> {
    pub fn new(x: E, f: ScaledReal) -> Self {
        Self { x, f }
    }
}

/// Identity element `(x0, 0)`.
pub fn identity<I: Infrastructure>(infra: &I) -> FRep<I::Element> {
    FRep::new(infra.origin(), ScaledReal::zero())
}

/// Moves `(x, f)` along baby steps until `0 ≤ f < Δ̃bs(x)`, preserving the
/// approximate absolute distance exactly. Returns the representation and
/// the number of baby steps taken.
pub fn reduce_counted<I: Infrastructure>(
    infra: &I,
    x: I::Element,
    f: ScaledReal,
    m: u32,
) -> Result<(FRep<I::Element>, usize)> {
    let budget = infra.params().step_budget();
    let (mut x, mut f) = (x, f);
    let mut steps = 0;
    loop {
        if f.is_negative() {
            x = infra.bs_inv(&x);
            f += &infra.delta_bs(&x, m);
        } else {
            let d = infra.delta_bs(&x, m);
            if f < d {
                return Ok((FRep::new(x, f), steps));
            }
            f -= &d;
            x = infra.bs(&x);
        }
        steps += 1;
        if steps > budget {
            return Err(Error::StepBudget { budget });
        }
    }
}

pub fn reduce<I: Infrastructure>(infra: &I, x: I::Element, f: ScaledReal, m: u32) -> Result<FRep<I::Element>> {
    reduce_counted(infra, x, f, m).map(|(r, _)| r)
}

/// `[x, f] + [y, g] = [gs(x, y), f + g − Δgs(x, y)]`, reduced.
pub fn add<I: Infrastructure>(infra: &I, a: &FRep<I::Element>, b: &FRep<I::Element>, m: u32) -> Result<FRep<I::Element>> {
    let (z, dgs) = infra.giant_step(&a.x, &b.x, m);
    reduce(infra, z, &(&a.f + &b.f) - &dgs, m)
}

/// `a · p` by doubling and adding.
pub fn scalar_mul<I: Infrastructure>(infra: &I, a: u64, p: &FRep<I::Element>, m: u32) -> Result<FRep<I::Element>> {
    let mut acc: Option<FRep<I::Element>> = None;
    let mut power = p.clone();
    let mut k = a;
    while k > 0 {
        if k & 1 == 1 {
            acc = Some(match acc {
                None => power.clone(),
                Some(s) => add(infra, &s, &power, m)?,
            });
        }
        k >>= 1;
        if k > 0 {
            power = add(infra, &power, &power, m)?;
        }
    }
    Ok(acc.unwrap_or_else(|| identity(infra)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::infra::cyclic::Power;
    use crate::infra::{CyclicGroup, ExactOracle, OracleInfra, Point};
    use proptest::prelude::*;

    fn r(s: &str) -> ScaledReal {
        ScaledReal::parse(s).unwrap()
    }

    fn demo() -> OracleInfra {
        OracleInfra::from_strs(&["0.6", "1.1", "0.8"]).unwrap()
    }

    // absolute distance of an f-representation on an exact backend
    fn psi<I: ExactOracle>(infra: &I, p: &FRep<I::Element>) -> ScaledReal {
        (infra.oracle_distance(&p.x) + &p.f).mod_reduce(&infra.circumference())
    }

    #[test]
    fn reduce_examples() {
        let g = CyclicGroup::new(12).unwrap();
        assert_eq!(reduce(&g, Power(3), r("2"), 8).unwrap(), FRep::new(Power(5), ScaledReal::zero()));
        let o = demo();
        assert_eq!(reduce(&o, Point(1), r("1.3"), 8).unwrap(), FRep::new(Point(2), r("0.2")));
        assert_eq!(reduce(&o, Point(1), r("-0.1"), 8).unwrap(), FRep::new(Point(0), r("0.5")));
    }

    #[test]
    fn add_examples() {
        let g = CyclicGroup::new(12).unwrap();
        let s = add(&g, &FRep::new(Power(3), ScaledReal::zero()), &FRep::new(Power(5), ScaledReal::zero()), 8).unwrap();
        assert_eq!(s, FRep::new(Power(8), ScaledReal::zero()));
        let o = demo();
        let x1 = FRep::new(Point(1), ScaledReal::zero());
        assert_eq!(add(&o, &x1, &x1, 8).unwrap(), FRep::new(Point(1), r("0.6")));
        let y = FRep::new(Point(2), r("0.3"));
        assert_eq!(add(&o, &identity(&o), &y, 8).unwrap(), y);
    }

    #[test]
    fn scalar_mul_examples() {
        let g = CyclicGroup::new(12).unwrap();
        let p = FRep::new(Power(2), ScaledReal::zero());
        assert_eq!(scalar_mul(&g, 5, &p, 8).unwrap(), FRep::new(Power(10), ScaledReal::zero()));
        assert_eq!(scalar_mul(&g, 0, &p, 8).unwrap(), identity(&g));
        let o = demo();
        let x1 = FRep::new(Point(1), ScaledReal::zero());
        assert_eq!(scalar_mul(&o, 4, &x1, 8).unwrap(), FRep::new(Point(2), r("0.7")));
    }

    #[test]
    fn step_budget_is_enforced() {
        let o = demo();
        let err = reduce(&o, Point(0), r("100"), 8).unwrap_err();
        assert!(matches!(err, Error::StepBudget { .. }));
    }

    fn arb_infra() -> impl Strategy<Value = OracleInfra> {
        prop::collection::vec((1i64..40, 1i64..12), 1..12).prop_map(|g| {
            let gaps: Vec<ScaledReal> = g.into_iter().map(|(n, d)| ScaledReal::ratio(n, d)).collect();
            OracleInfra::new(&gaps).unwrap()
        })
    }

    fn arb_rep(o: &OracleInfra, i: usize, t: u32) -> FRep<Point> {
        let x = Point(i % o.len());
        let f = o.gaps()[x.0].mul_int(t).div_int(1000);
        FRep::new(x, f)
    }

    proptest! {
        #[test]
        fn absolute_distance_is_additive(o in arb_infra(), i in 0usize..100, j in 0usize..100, s in 0u32..1000, t in 0u32..1000) {
            let a = arb_rep(&o, i, s);
            let b = arb_rep(&o, j, t);
            let sum = add(&o, &a, &b, 16).unwrap();
            let want = (psi(&o, &a) + psi(&o, &b)).mod_reduce(&o.circumference());
            prop_assert_eq!(psi(&o, &sum), want);
            prop_assert!(!sum.f.is_negative() && sum.f < o.oracle_delta_bs(&sum.x));
            prop_assert_eq!(add(&o, &b, &a, 16).unwrap(), sum);
        }

        #[test]
        fn scalar_mul_distributes(o in arb_infra(), i in 0usize..100, s in 0u32..1000, a in 0u64..300, b in 0u64..300) {
            let p = arb_rep(&o, i, s);
            let lhs = scalar_mul(&o, a + b, &p, 16).unwrap();
            let rhs = add(&o, &scalar_mul(&o, a, &p, 16).unwrap(), &scalar_mul(&o, b, &p, 16).unwrap(), 16).unwrap();
            prop_assert_eq!(psi(&o, &lhs), psi(&o, &rhs));
            let want = psi(&o, &p).mul_int(a + b).mod_reduce(&o.circumference());
            prop_assert_eq!(psi(&o, &lhs), want);
        }
    }
}
