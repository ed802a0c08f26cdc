//! Generalized discrete logarithm: parameter selection, two-dimensional
//! Fourier sampling of `g_N` fibers, and recombination.

mod combine;
mod params;
mod pipeline;

pub use combine::{combine_samples, extended_gcd, Combination};
pub use params::{select_params, DlogParams, KFilter};
pub use pipeline::{dlog_fiber_sample, dlog_pipeline, DlogConfig, DlogResult, DlogRun, DlogTrial};
