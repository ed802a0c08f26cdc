//! Real quadratic fields as infrastructures.

pub mod backend;
pub mod forms;
pub mod log;
pub mod number;
pub mod pell;

pub use backend::QuadraticInfra;
pub use forms::{qf_bs, qf_bs_inv, qf_delta_bs, qf_gs, ReducedForm};
pub use number::QuadNum;
pub use pell::{pell_solution, PellSolution};
