//! The circle group on f-representations and the homomorphisms into it.

pub mod frep;
pub mod grid;
pub mod homomorphism;
pub mod precision;

pub use frep::{add, reduce, scalar_mul, FRep};
pub use grid::{
    min_samples_per_unit, offset_denominator_circ, offset_denominator_dlog, pick_shift_circ, pick_shift_dlog,
    quantize_g_n, quantize_h_n, ShiftedGrid,
};
pub use homomorphism::{
    g_exact_on_oracle, g_tilde, h_exact_on_oracle, h_tilde, DlogEvaluator, Evaluation, HEvaluator,
};
pub use precision::{choose_precision, choose_precision_dlog, PrecisionBudget};
