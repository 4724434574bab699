//! Joint optimization of RIS phases and transmit covariance.
//!
//! The covariance block is solved exactly by water-filling over the channel
//! eigenmodes; the phase block one element at a time in closed form. The
//! driver alternates the two from the best of several random starts.

mod altopt;
mod phase;
mod waterfill;

use thiserror::Error;

use crate::channel::ChannelError;

pub use altopt::{
    alternating_optimize, random_phase_profiles, AltOptConfig, AltOptResult, Convergence,
    DEFAULT_MAX_ITERATIONS,
};
pub use phase::{
    optimize_single_phase, phase_eigenvalue, sweep_all_phases, whiten, PhaseStepContext,
};
pub use waterfill::{
    allocate_power, capacity_given_covariance, waterfill, WaterfillResult, RANK_TOLERANCE,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OptimizerError {
    #[error("invalid argument: {0}")]
    Argument(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error(transparent)]
    Channel(#[from] ChannelError),
}
