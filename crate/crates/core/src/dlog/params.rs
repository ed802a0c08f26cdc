use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::analysis::{bound_dlog_max, cf_approx, KappaChoice};
use crate::error::{Error, Result};
use crate::fixedpoint::ScaledReal;
use crate::group::{min_samples_per_unit, offset_denominator_dlog};
use crate::infra::InfraParams;

/// Which Fourier samples may enter the recombination.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KFilter {
    /// `k ≤ ⌊B/64⌋ − 1`.
    Paper,
    /// Every `k`.
    All,
    /// `Paper` when it admits some `k ≥ 1`, otherwise `All`.
    #[default]
    Auto,
}

impl KFilter {
    /// Largest admitted `k`.
    pub fn k_max(self, b: u64) -> u64 {
        let paper = (b / 64).saturating_sub(1);
        match self {
            KFilter::Paper => paper,
            KFilter::All => b.saturating_sub(1),
            KFilter::Auto if paper >= 1 => paper,
            KFilter::Auto => b.saturating_sub(1),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DlogParams {
    pub m: u64,
    pub n: u64,
    /// Denominator of the convergent that fixes `N = q ⌈2/d_min⌉`.
    pub q: u64,
    pub b: u64,
    pub a: u64,
    pub l: u64,
    pub r_hat: ScaledReal,
    /// Accuracy of `R̂`.
    pub epsilon: ScaledReal,
    /// `|M B − M N R̂| + M N ε`, at most 1/2 for paper parameters.
    pub deviation: ScaledReal,
    pub kappa: Option<KappaChoice>,
    pub cells: u128,
}

/// Required accuracy of `R̂` for a multiplier bound `M`.
pub fn required_epsilon(m: u64, params: &InfraParams) -> ScaledReal {
    ScaledReal::ratio(1, 16 * (m as u128).pow(2) * min_samples_per_unit(params) as u128)
}

/// `M = ⌈2(R̂ + ε) + 1⌉`.
pub fn multiplier_bound(r_hat: &ScaledReal, epsilon: &ScaledReal) -> u64 {
    (&(r_hat + epsilon).mul_int(2) + &ScaledReal::one()).ceil().to_u64().expect("M fits u64")
}

/// Chooses `M, N, B, A, L` and the `κ` maximizing the success bound.
pub fn select_params(
    params: &InfraParams,
    r_hat: &ScaledReal,
    epsilon: &ScaledReal,
    p_g: &ScaledReal,
    q_override: Option<u64>,
    cell_cap: u128,
) -> Result<DlogParams> {
    let m = multiplier_bound(r_hat, epsilon);
    if *epsilon > required_epsilon(m, params) {
        return Err(Error::EstimateTooCoarse(format!("|R − R̂| ≤ {epsilon} exceeds 1/(16 M² ⌈2/d_min⌉)")));
    }
    let c = min_samples_per_unit(params);
    let q = match q_override {
        Some(q) if q >= 1 => q,
        Some(_) => return Err(Error::Config("convergent denominator override must be positive".into())),
        None => {
            let cv = cf_approx(&r_hat.mul_int(c), &ScaledReal::from_int(4 * m))?;
            cv.den as u64
        }
    };
    let n = q * c;
    let b = r_hat.mul_int(n).round_nearest().to_u64().ok_or_else(|| Error::Config("B overflows".into()))?;
    let a = m * b;
    let deviation = &(&ScaledReal::from_int(BigInt::from(m) * b) - &r_hat.mul_int(BigInt::from(m) * n)).abs()
        + &epsilon.mul_int(BigInt::from(m) * n);
    if q_override.is_none() && deviation > ScaledReal::ratio(1, 2) {
        return Err(Error::Precision(format!("|MB − MNR| bound {deviation} exceeds 1/2")));
    }
    let cells = a as u128 * b as u128;
    if cells > cell_cap {
        let shrink = (cells as f64 / cell_cap as f64).sqrt();
        return Err(Error::Config(format!(
            "A·B = {cells} exceeds the cap {cell_cap}; shrink B (≈ R N) by a factor {shrink:.2}"
        )));
    }
    let l = offset_denominator_dlog(n, a, r_hat, params, p_g)?;
    let kappa = bound_dlog_max(q, b, p_g.to_f64())?;
    Ok(DlogParams { m, n, q, b, a, l, r_hat: r_hat.clone(), epsilon: epsilon.clone(), deviation, kappa, cells })
}
