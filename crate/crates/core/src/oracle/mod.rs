//! Ground truth without Monte Carlo: exhaustive enumeration for tiny systems
//! and the deterministic recursions satisfied by second moments.

mod enumerate;
mod recursions;

pub use enumerate::{
    enumerate_distribution, Atom, ExactDistribution, ATOM_BUDGET, MAX_HORIZON, MAX_WALKERS,
    MERGE_TOL,
};
pub use recursions::{
    lemma_a1_iterate, variance_bounds_interacting, variance_product_alpha0,
    variance_recursion_alpha0, write_sequence_csv, VarianceEnvelope,
};
