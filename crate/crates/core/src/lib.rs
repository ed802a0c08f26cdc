//! Circle-group arithmetic on one-dimensional infrastructures, classical
//! simulation of the Fourier-sampling steps used to estimate their
//! circumference and generalized discrete logarithms, and the analytic bounds
//! those procedures are checked against.

pub mod analysis;
pub mod dlog;
pub mod error;
pub mod fixedpoint;
pub mod group;
pub mod infra;
pub mod period;
pub mod qsampler;
pub mod quad;
pub mod rng;

pub use error::{Error, Result};
pub use fixedpoint::ScaledReal;
