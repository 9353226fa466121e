//! The two-state interacting reinforced walk: parameters, gain schedules, state
//! and the one-step transition.

mod kernel;
mod params;
mod schedule;
mod state;

pub use kernel::{kernel_decompose, KernelDecomposition, KernelSpec};
pub use params::{Dynamics, InitialLaw, ModelParams};
pub use schedule::{step_size, SquareSummability, StepSchedule, EPSILON_GUARD};
pub use state::WalkState;
pub(crate) use state::mean;
