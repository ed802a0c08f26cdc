//! Analytic success bounds and standalone verifiers for the supporting
//! lemmas.

mod bounds;
mod cf;
mod coprime;
mod geomsum;
mod stats;

pub use bounds::{
    bound_dlog, bound_dlog_max, bound_dlog_simplified, bound_fiber_size, bound_good_pair, bound_periodic,
    bound_psuccess_circ, kappa_interval, sinc, KappaChoice,
};
pub use cf::{cf_approx, convergents_of, Convergent};
pub use coprime::{coprime_exact, coprime_experiment, PRIME_RECIPROCAL_SQUARES};
pub use geomsum::{geomsum_lhs, geomsum_rhs, geomsum_sweep, random_instance, GeomSumInstance, SubsetKind};
pub use stats::{one_sided_binomial, BinomialTest, BoundReport, CONFIDENCE};
