//! Period estimation from pairs of Fourier samples and the circumference
//! pipeline built on it.

mod candidates;
mod pipeline;
mod verify;

pub use candidates::{candidate_periods, convergents, estimate_period, CandidateList};
pub use pipeline::{
    circumference_pipeline, default_samples_per_unit, transform_length, CircTrial, CircumferenceConfig,
    CircumferenceRun,
};
pub use verify::{verify_and_refine, CircumferenceResult, Witness};
