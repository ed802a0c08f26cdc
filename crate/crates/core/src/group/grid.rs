//! Shifted evaluation grids `i/N + j/L` and the quantized maps `h_N`, `g_N`.

use num_traits::ToPrimitive;
use rand::Rng;
use serde::Serialize;

use super::homomorphism::{DlogEvaluator, HEvaluator};
use crate::error::{Error, Result};
use crate::fixedpoint::ScaledReal;
use crate::infra::{InfraParams, Infrastructure};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct ShiftedGrid {
    pub n: u64,
    pub l: u64,
    /// Shift index in `[0, L/N)`.
    pub j: u64,
}

impl ShiftedGrid {
    pub fn new(n: u64, l: u64, j: u64) -> Result<Self> {
        if n == 0 || l == 0 || l % n != 0 || j >= l / n {
            return Err(Error::Precondition(format!("invalid grid N={n}, L={l}, j={j}")));
        }
        Ok(Self { n, l, j })
    }

    /// `i/N + j/L`.
    pub fn point(&self, i: u64) -> ScaledReal {
        let step = self.l / self.n;
        ScaledReal::ratio(i as u128 * step as u128 + self.j as u128, self.l)
    }

    pub fn shifts(&self) -> u64 {
        self.l / self.n
    }
}

/// `⌈2/d_min⌉`, the smallest admissible `N`.
pub fn min_samples_per_unit(params: &InfraParams) -> u64 {
    ScaledReal::from_int(2).div(&params.d_min_lower).ceil().to_u64().expect("N fits u64")
}

fn check_n(n: u64, params: &InfraParams) -> Result<()> {
    let need = min_samples_per_unit(params);
    if n < need {
        return Err(Error::Precondition(format!("N = {n} is below ⌈2/d_min⌉ = {need}")));
    }
    Ok(())
}

fn bad_fraction(p: &ScaledReal) -> Result<ScaledReal> {
    if p.is_negative() || *p >= ScaledReal::one() {
        return Err(Error::Precondition(format!("probability {p} must lie in [0, 1)")));
    }
    Ok(ScaledReal::one() - p)
}

/// `L = N ⌈(2k̄/(1 − p_h)) ⌈q/(N d_k̄)⌉⌉`.
pub fn offset_denominator_circ(n: u64, q: u64, params: &InfraParams, p_h: &ScaledReal) -> Result<u64> {
    check_n(n, params)?;
    let miss = bad_fraction(p_h)?;
    let blocks = ScaledReal::from_int(q).div(&params.d_k_bar.mul_int(n)).ceil();
    let inner = ScaledReal::from_int(blocks).mul_int(2 * params.k_bar as u64).div(&miss).ceil();
    (inner * n).to_u64().ok_or_else(|| Error::Precondition("grid denominator overflows".into()))
}

/// `L = ⌈2 A k̄ ⌈R̂/d_k̄⌉ / (1 − p_g)⌉ N`.
pub fn offset_denominator_dlog(n: u64, a: u64, r_hat: &ScaledReal, params: &InfraParams, p_g: &ScaledReal) -> Result<u64> {
    check_n(n, params)?;
    let miss = bad_fraction(p_g)?;
    let blocks = r_hat.div(&params.d_k_bar).ceil();
    let inner = ScaledReal::from_int(blocks).mul_int(2 * a as u128 * params.k_bar as u128).div(&miss).ceil();
    (inner * n).to_u64().ok_or_else(|| Error::Precondition("grid denominator overflows".into()))
}

/// Grid for the circumference algorithm with a uniformly random shift.
pub fn pick_shift_circ<R: Rng>(n: u64, q: u64, params: &InfraParams, p_h: &ScaledReal, rng: &mut R) -> Result<ShiftedGrid> {
    let l = offset_denominator_circ(n, q, params, p_h)?;
    ShiftedGrid::new(n, l, rng.random_range(0..l / n))
}

/// Grid for the discrete-logarithm algorithm with a uniformly random shift.
pub fn pick_shift_dlog<R: Rng>(
    n: u64,
    a: u64,
    r_hat: &ScaledReal,
    params: &InfraParams,
    p_g: &ScaledReal,
    rng: &mut R,
) -> Result<ShiftedGrid> {
    let l = offset_denominator_dlog(n, a, r_hat, params, p_g)?;
    ShiftedGrid::new(n, l, rng.random_range(0..l / n))
}

fn quantize(f: &ScaledReal, n: u64) -> i64 {
    f.floor_scaled(n).to_i64().expect("quantized offset fits i64")
}

/// `h_N(i) = (x̃, ⌊f̃ N⌋)` where `h̃(i/N + j/L) = (x̃, f̃)`.
pub fn quantize_h_n<I: Infrastructure>(ev: &HEvaluator<'_, I>, grid: &ShiftedGrid, i: u64) -> Result<(I::Element, i64)> {
    let rep = ev.h_tilde(&grid.point(i))?;
    Ok((rep.x, quantize(&rep.f, grid.n)))
}

/// `g_N(a, b) = (ỹ, ⌊f̃ N⌋)` where `g̃(a, b/N + j/L) = (ỹ, f̃)`.
pub fn quantize_g_n<I: Infrastructure>(ev: &DlogEvaluator<'_, I>, grid: &ShiftedGrid, a: u64, b: u64) -> Result<(I::Element, i64)> {
    let rep = ev.g_tilde(a, &grid.point(b))?;
    Ok((rep.x, quantize(&rep.f, grid.n)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::precision::{choose_precision, choose_precision_dlog};
    use crate::infra::cyclic::Power;
    use crate::infra::{CyclicGroup, OracleInfra, Point};

    fn r(s: &str) -> ScaledReal {
        ScaledReal::parse(s).unwrap()
    }

    #[test]
    fn offset_formula_instance() {
        let g = CyclicGroup::new(12).unwrap();
        assert_eq!(offset_denominator_circ(2, 64, g.params(), &r("1/2")).unwrap(), 256);
        // one multiplier and R̂ = q/N gives the same order as the circumference grid
        let d = offset_denominator_dlog(2, 1, &r("32"), g.params(), &r("1/2")).unwrap();
        assert_eq!(d, 256);
        assert!(offset_denominator_circ(1, 64, g.params(), &r("1/2")).is_err());
        assert!(offset_denominator_circ(2, 64, g.params(), &r("1")).is_err());
    }

    #[test]
    fn good_shift_fraction_meets_target() {
        // exhaustive sweep over all shifts
        let o = OracleInfra::from_strs(&["0.6", "1.1", "0.8"]).unwrap();
        let (n, q) = (4u64, 128u64);
        let p_h = r("1/2");
        let l = offset_denominator_circ(n, q, o.params(), &p_h).unwrap();
        let one_l = ScaledReal::ratio(1, l);
        let mut bad = 0;
        for j in 0..l / n {
            let grid = ShiftedGrid::new(n, l, j).unwrap();
            let close = (0..q).any(|i| {
                let pt = grid.point(i);
                !o.elements_near(&pt, &(&one_l - &ScaledReal::ratio(1, 1u64 << 40))).is_empty()
            });
            if close {
                bad += 1;
            }
        }
        assert!(ScaledReal::ratio(bad, l / n) <= ScaledReal::one() - p_h, "bad {bad} of {}", l / n);
    }

    #[test]
    fn quantized_maps() {
        let g = CyclicGroup::new(12).unwrap();
        let grid = ShiftedGrid::new(2, 256, 0).unwrap();
        let ev = HEvaluator::new(&g, choose_precision(&r("40"), 256, g.params()).unwrap()).unwrap();
        for i in 0..80 {
            let (x, l) = quantize_h_n(&ev, &grid, i).unwrap();
            assert_eq!(x, Power((i / 2) % 12));
            assert_eq!(l, (i % 2) as i64);
        }
        let o = OracleInfra::from_strs(&["0.6", "1.1", "0.8"]).unwrap();
        let grid = ShiftedGrid::new(4, 1024, 3).unwrap();
        let ev = HEvaluator::new(&o, choose_precision(&r("40"), 1024, o.params()).unwrap()).unwrap();
        assert_eq!(quantize_h_n(&ev, &grid, 7).unwrap(), (Point(2), 0));
        let dev = DlogEvaluator::new(&g, Power(5), choose_precision_dlog(12, &r("13"), 64, g.params()).unwrap()).unwrap();
        let grid = ShiftedGrid::new(2, 64, 0).unwrap();
        for a in 0..12u64 {
            for b in 0..24u64 {
                let (y, l) = quantize_g_n(&dev, &grid, a, b).unwrap();
                assert_eq!(y, Power((5 * a + b / 2) % 12));
                assert_eq!(l, (b % 2) as i64);
            }
        }
    }
}
