//! Synthetic infrastructure given by a list of rational gaps.

use std::collections::HashSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive};
use serde::Serialize;

use super::{parse_baby_step_spec, ExactOracle, InfraParams, Infrastructure};
use crate::error::{Error, Result};
use crate::fixedpoint::ScaledReal;
use crate::rng::splitmix64;

/// Index of an element, ordered by distance from the origin.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Point(pub usize);

/// Optional overrides of the witnessed constants. Each override must be
/// consistent with the actual gaps.
#[derive(Clone, Debug, Default)]
pub struct SyntheticOptions {
    pub k_bar: Option<u32>,
    /// Seed for deterministic perturbations of the approximate deltas, kept
    /// strictly below `2^-m`. `None` makes the deltas exact.
    pub perturb: Option<u64>,
}

/// Infrastructure with elements `x_0, …, x_{n−1}` at the partial sums of the
/// supplied gaps. All distances share one common denominator.
#[derive(Clone, Debug)]
pub struct OracleInfra {
    den: i128,
    // numerators of d(x_i) over `den`
    dist: Vec<i128>,
    total: i128,
    gaps: Vec<ScaledReal>,
    params: InfraParams,
    perturb: Option<u64>,
}

impl OracleInfra {
    pub fn new(gaps: &[ScaledReal]) -> Result<Self> {
        Self::with_options(gaps, SyntheticOptions::default())
    }

    pub fn from_strs(gaps: &[&str]) -> Result<Self> {
        let g = gaps.iter().map(|s| ScaledReal::parse(s)).collect::<Result<Vec<_>>>()?;
        Self::new(&g)
    }

    pub fn with_options(gaps: &[ScaledReal], opts: SyntheticOptions) -> Result<Self> {
        if gaps.is_empty() {
            return Err(Error::Config("synthetic backend needs at least one gap".into()));
        }
        if gaps.iter().any(|g| !g.is_positive()) {
            return Err(Error::Config("gaps must be positive".into()));
        }
        let den = gaps.iter().fold(BigInt::one(), |acc, g| acc.lcm(g.normalized().scale()));
        let den_i = den.to_i128().filter(|d| *d < 1 << 60).ok_or_else(|| Error::Config("gap denominators too large".into()))?;
        let mut dist = Vec::with_capacity(gaps.len());
        let mut acc: i128 = 0;
        for g in gaps {
            dist.push(acc);
            let num = (g.mantissa() * &den / g.scale()).to_i128().ok_or_else(|| Error::Config("gap too large".into()))?;
            acc = acc.checked_add(num).filter(|a| *a < 1 << 100).ok_or_else(|| Error::Config("circumference too large".into()))?;
        }
        let n = gaps.len();
        let k_bar = opts.k_bar.unwrap_or(1);
        if k_bar == 0 {
            return Err(Error::Config("k_bar must be at least 1".into()));
        }
        let d_min = gaps.iter().min().unwrap().clone();
        let d_max = gaps.iter().max().unwrap().clone();
        let d_k_bar = (0..n)
            .map(|i| (0..k_bar as usize).fold(ScaledReal::zero(), |s, t| s + &gaps[(i + t) % n]))
            .min()
            .unwrap();
        let r = ScaledReal::ratio(acc, den_i);
        let r_upper = ScaledReal::from_int(r.ceil());
        let r_lower = ScaledReal::from_int(r.floor()).max(d_min.clone());
        let params = InfraParams { d_min_lower: d_min, d_max_upper: d_max, k_bar, d_k_bar, r_upper, r_lower };
        params.validate()?;
        Ok(Self { den: den_i, dist, total: acc, gaps: gaps.to_vec(), params, perturb: opts.perturb })
    }

    pub fn len(&self) -> usize {
        self.dist.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dist.is_empty()
    }

    pub fn gaps(&self) -> &[ScaledReal] {
        &self.gaps
    }

    pub fn is_perturbed(&self) -> bool {
        self.perturb.is_some()
    }

    fn check(&self, x: &Point) {
        assert!(x.0 < self.dist.len(), "element index {} out of range", x.0);
    }

    /// Smallest element index with distance `>= t`, and the overshoot.
    fn ceil_element(&self, t: i128) -> (Point, i128) {
        let idx = self.dist.partition_point(|&d| d < t);
        if idx == self.dist.len() {
            (Point(0), self.total - t)
        } else {
            (Point(idx), self.dist[idx] - t)
        }
    }

    // Deterministic offset in (−2^-m, 2^-m).
    fn noise(&self, key: u64, m: u32) -> ScaledReal {
        let Some(salt) = self.perturb else { return ScaledReal::zero() };
        let h = splitmix64(salt ^ splitmix64(key ^ splitmix64(m as u64)));
        let span = (1u64 << 21) - 1;
        let k = (h % span) as i64 - ((1 << 20) - 1);
        ScaledReal::dyadic(k, m + 20)
    }

    /// Elements whose exact distance is within `eps` of `t` on the circle.
    pub fn elements_near(&self, t: &ScaledReal, eps: &ScaledReal) -> HashSet<Point> {
        let r = self.circumference();
        let t = t.mod_reduce(&r);
        (0..self.len())
            .filter(|&i| {
                let d = (&self.oracle_distance(&Point(i)) - &t).mod_reduce(&r);
                d <= *eps || &r - &d <= *eps
            })
            .map(Point)
            .collect()
    }
}

impl Infrastructure for OracleInfra {
    type Element = Point;

    fn origin(&self) -> Point {
        Point(0)
    }

    fn bs(&self, x: &Point) -> Point {
        self.check(x);
        Point((x.0 + 1) % self.dist.len())
    }

    fn bs_inv(&self, x: &Point) -> Point {
        self.check(x);
        Point((x.0 + self.dist.len() - 1) % self.dist.len())
    }

    fn gs(&self, x: &Point, y: &Point) -> Point {
        self.giant_step_exact(x, y).0
    }

    fn delta_bs(&self, x: &Point, m: u32) -> ScaledReal {
        self.check(x);
        &self.gaps[x.0] + &self.noise(x.0 as u64, m)
    }

    fn delta_gs(&self, x: &Point, y: &Point, m: u32) -> ScaledReal {
        let (_, d) = self.giant_step_exact(x, y);
        let (a, b) = if x.0 <= y.0 { (x.0, y.0) } else { (y.0, x.0) };
        d + self.noise(((a as u64) << 32 | b as u64) ^ 0x5555_0000_0000_0000, m)
    }

    fn giant_step(&self, x: &Point, y: &Point, m: u32) -> (Point, ScaledReal) {
        (self.gs(x, y), self.delta_gs(x, y, m))
    }

    fn params(&self) -> &InfraParams {
        &self.params
    }

    fn describe(&self, x: &Point) -> String {
        format!("x{}", x.0)
    }

    fn parse_element(&self, spec: &str) -> Result<Point> {
        if let Some(r) = parse_baby_step_spec(self, spec) {
            return r;
        }
        let s = spec.trim();
        let s = s.strip_prefix('x').unwrap_or(s);
        match s.parse::<usize>() {
            Ok(i) if i < self.len() => Ok(Point(i)),
            _ => Err(Error::MalformedElement(spec.to_string())),
        }
    }
}

impl OracleInfra {
    fn giant_step_exact(&self, x: &Point, y: &Point) -> (Point, ScaledReal) {
        self.check(x);
        self.check(y);
        let mut t = self.dist[x.0] + self.dist[y.0];
        if t >= self.total {
            t -= self.total;
        }
        let (z, over) = self.ceil_element(t);
        (z, ScaledReal::ratio(over, self.den))
    }
}

impl ExactOracle for OracleInfra {
    fn oracle_distance(&self, x: &Point) -> ScaledReal {
        self.check(x);
        ScaledReal::ratio(self.dist[x.0], self.den)
    }

    fn circumference(&self) -> ScaledReal {
        ScaledReal::ratio(self.total, self.den)
    }

    fn elements(&self) -> Vec<Point> {
        (0..self.len()).map(Point).collect()
    }

    fn locate(&self, t: &ScaledReal) -> (Point, ScaledReal) {
        let scaled = t.floor_scaled(self.den as u64).to_i128().expect("distance fits");
        let idx = self.dist.partition_point(|&d| d <= scaled).max(1) - 1;
        (Point(idx), t - &ScaledReal::ratio(self.dist[idx], self.den))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn demo() -> OracleInfra {
        OracleInfra::from_strs(&["0.6", "1.1", "0.8"]).unwrap()
    }

    fn r(s: &str) -> ScaledReal {
        ScaledReal::parse(s).unwrap()
    }

    #[test]
    fn baby_steps_wrap() {
        let x = demo();
        assert_eq!(x.bs(&Point(2)), Point(0));
        assert_eq!(x.bs_inv(&x.bs(&Point(1))), Point(1));
        assert_eq!(x.bs_inv(&Point(0)), Point(2));
    }

    #[test]
    fn giant_step_examples() {
        let x = demo();
        assert_eq!(x.gs(&Point(1), &Point(1)), Point(2));
        assert_eq!(x.delta_gs(&Point(1), &Point(1), 10), r("0.5"));
        assert_eq!(x.gs(&Point(0), &Point(2)), Point(2));
        assert!(x.delta_gs(&Point(0), &Point(2), 10).is_zero());
        // 1.7 + 1.7 = 3.4 ≡ 0.9 → x2 at 1.7
        assert_eq!(x.gs(&Point(2), &Point(2)), Point(2));
        assert_eq!(x.delta_gs(&Point(2), &Point(2), 10), r("0.8"));
    }

    #[test]
    fn wrap_past_last_element_lands_on_origin() {
        // 1.7 + 0.6 = 2.3 lies after x2, so the next element is x0 at 2.5
        let x = demo();
        assert_eq!(x.gs(&Point(2), &Point(1)), Point(0));
        assert_eq!(x.delta_gs(&Point(2), &Point(1), 4), r("0.2"));
    }

    #[test]
    fn oracle_surface() {
        let x = demo();
        assert_eq!(x.oracle_distance(&Point(2)), r("1.7"));
        assert!(x.oracle_distance(&Point(0)).is_zero());
        assert_eq!(x.circumference(), r("2.5"));
        assert_eq!(x.delta_bs(&Point(1), 10), r("1.1"));
        assert_eq!(x.oracle_delta_bs(&Point(2)), r("0.8"));
    }

    #[test]
    fn params_witnessed() {
        let x = OracleInfra::with_options(
            &[r("0.6"), r("1.1"), r("0.8")],
            SyntheticOptions { k_bar: Some(2), perturb: None },
        )
        .unwrap();
        let p = x.params();
        assert_eq!(p.d_min_lower, r("0.6"));
        assert_eq!(p.d_max_upper, r("1.1"));
        assert_eq!(p.d_k_bar, r("1.4"));
        assert_eq!(p.r_upper, r("3"));
        assert_eq!(p.r_lower, r("2"));
    }

    #[test]
    fn perturbation_stays_below_precision() {
        let x = OracleInfra::with_options(
            &[r("0.6"), r("1.1"), r("0.8")],
            SyntheticOptions { k_bar: None, perturb: Some(11) },
        )
        .unwrap();
        for m in 1..40 {
            for i in 0..3 {
                let e = (&x.delta_bs(&Point(i), m) - &x.oracle_delta_bs(&Point(i))).abs();
                assert!(e < ScaledReal::pow2_neg(m));
                assert_eq!(x.delta_bs(&Point(i), m), x.delta_bs(&Point(i), m));
                for j in 0..3 {
                    assert_eq!(x.delta_gs(&Point(i), &Point(j), m), x.delta_gs(&Point(j), &Point(i), m));
                }
            }
        }
        assert_ne!(x.delta_bs(&Point(0), 8), r("0.6"));
    }

    #[test]
    fn rejects_bad_gaps() {
        assert!(OracleInfra::from_strs(&[]).is_err());
        assert!(OracleInfra::from_strs(&["1", "0"]).is_err());
        assert!(OracleInfra::from_strs(&["1", "-1/2"]).is_err());
    }

    #[test]
    fn parse_elements() {
        let x = demo();
        assert_eq!(x.parse_element("x2").unwrap(), Point(2));
        assert_eq!(x.parse_element("bs^4").unwrap(), Point(1));
        assert!(x.parse_element("x3").is_err());
    }
}
