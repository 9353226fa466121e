//! Simulation, exact oracles and statistical checks for N mean-field
//! interacting reinforced random walks on [0, 1].
//!
//! Walker i moves as Z_{n+1}(i) = (1 - r_n) Z_n(i) + r_n (rho I_{n+1}(i) + (1 - rho) q),
//! where the draws I_{n+1}(i) are conditionally independent Bernoulli with
//! parameter (1 - alpha) Z_n(i) + alpha Z_n and Z_n is the walker average.

// Parameter checks are written as `!(x > 0.0)` so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analytics;
pub mod applications;
pub mod ensemble;
pub mod error;
pub mod model;
pub mod oracle;
pub mod rng;

pub use error::{Error, Result};
pub use model::{InitialLaw, ModelParams, StepSchedule, WalkState};
pub use rng::RandomStream;
