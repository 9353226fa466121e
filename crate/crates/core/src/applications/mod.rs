//! Urn schemes and preferential-attachment opinion dynamics expressed as
//! gain schedules and kernels for the walk model.

pub mod graph;
pub mod urn;

pub use graph::{graph_to_schedule, grow_with_max_degrees, hub_rate, pa_grow, PAGraph};
pub use urn::{simulate_urn, urn_to_schedule, ScaleRule, UrnMapping, UrnSpec};
