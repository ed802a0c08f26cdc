//! Fixtures shared by the benchmarks.

use infra1d::infra::OracleInfra;
use infra1d::ScaledReal;

/// Synthetic infrastructure with `n` elements and gaps cycling through
/// `3/5, 11/10, 4/5, 7/4`.
pub fn synthetic(n: usize) -> OracleInfra {
    let base = [(3, 5), (11, 10), (4, 5), (7, 4)];
    let gaps: Vec<ScaledReal> = (0..n).map(|i| ScaledReal::ratio(base[i % 4].0, base[i % 4].1)).collect();
    OracleInfra::new(&gaps).expect("valid gaps")
}
