//! Classical simulation of the quantum steps: fiber tables of the quantized
//! maps, measurement of the function register, and Fourier sampling.

mod fibers;
mod fourier;

pub use fibers::{build_fibers_1d, build_fibers_2d, measure_second_register, FiberTable, PseudoPeriodicState};
pub use fourier::{
    fourier_distribution_1d, fourier_distribution_2d, fourier_sample_1d, fourier_sample_2d, OutcomeSampler,
    QuantumSample, DEFAULT_CELL_CAP, PROBABILITY_FLOOR,
};
