//! Rest points of the reliable-learner map and their stability.
//!
//! Stability is read off the Jacobian of the map restricted to the simplex,
//! in the chart `(p_1, …, p_{n−1})`: a rest point is asymptotically stable when
//! every eigenvalue modulus is below 1 and unstable when one exceeds 1.

mod analytic;
mod conjecture;
mod eigen;
mod jacobian;
mod rest_points;
mod sweep;

pub use analytic::{analytic_rest_point, SystemClass};
pub use conjecture::{
    assess, conjecture_explore, Assessment, ConjectureReport, Counterexample, RestPointCounts,
};
pub use eigen::eigen_moduli;
pub use jacobian::{chart_jacobian, DEFAULT_STEP};
pub use rest_points::{
    balance_residual, classify, find_rest_points, report, search_rest_points, Classification,
    RestPointOptions, RestPointReport, RestPointSearch,
};
pub use sweep::{
    bifurcation_sweep, default_start, parse_grid, OrbitDiagram, OrbitPoint, DEFAULT_BURN_IN,
    SWEEP_STEP_TOL, VERTEX_TOL,
};
