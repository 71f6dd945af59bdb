//! Variational-learning dynamics of grammar competition.
//!
//! * [`advantage`]: advantage matrices, region measures and penalty probabilities.
//! * [`dynamics`]: the reliable-learner generational map and stochastic LRP learners.
//! * [`stability`]: rest points, chart-Jacobian stability, bifurcation sweeps.
//! * [`npl`]: the Naive Parameter Learner on small parametric grammar spaces.
//! * [`cli`]: the command-line front end behind the `varlearn` binary.

pub mod advantage;
pub mod cli;
pub mod dynamics;
pub mod error;
pub mod npl;
pub mod rng;
pub mod simplex;
pub mod stability;

pub use advantage::{AdvantageMatrix, PenaltyVector, RegionMeasure, ValidationReport};
pub use dynamics::{LearnerState, StochasticSchedule, Trajectory};
pub use error::{Error, Result};
pub use simplex::{PopulationState, StateKind};
