use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::advantage::AdvantageMatrix;
use crate::dynamics::reliable_map;
use crate::error::{Error, Result};
use crate::simplex::PopulationState;

pub const DEFAULT_BURN_IN: usize = 10_000;
/// Iteration stops once successive states differ by less than this in ∞-norm.
pub const SWEEP_STEP_TOL: f64 = 1e-12;
/// A limit state counts as vertex `v1` when `p_1 > 1 − VERTEX_TOL`.
pub const VERTEX_TOL: f64 = 1e-6;

pub fn default_start() -> PopulationState {
    PopulationState::from_raw(vec![0.98, 0.01, 0.01])
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrbitPoint {
    pub rho: f64,
    pub limit: PopulationState,
    pub iterations: usize,
    /// Last step size `‖p' − p‖∞`.
    pub step: f64,
    pub converged: bool,
}

/// Orbit diagram of canonical quasi-Babelian systems over a grid of `ρ = b/a`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrbitDiagram {
    pub a: f64,
    pub points: Vec<OrbitPoint>,
    /// Smallest grid `ρ` whose limit sits at `v1`.
    pub bifurcation_estimate: Option<f64>,
}

impl OrbitDiagram {
    pub fn rho_values(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.rho).collect()
    }

    pub fn limit_states(&self) -> Vec<&PopulationState> {
        self.points.iter().map(|p| &p.limit).collect()
    }
}

pub fn bifurcation_sweep(
    a: f64,
    rho_grid: &[f64],
    burn_in: usize,
    start: &PopulationState,
) -> Result<OrbitDiagram> {
    if rho_grid.is_empty() {
        return Err(Error::EmptyGrid);
    }
    if let Some(&rho) = rho_grid.iter().find(|r| !(**r > 0.0 && **r <= 4.0)) {
        return Err(Error::param("rho", rho, "grid values must lie in (0, 4]"));
    }
    if start.dim() != 3 {
        return Err(Error::DimensionMismatch {
            expected: 3,
            actual: start.dim(),
        });
    }
    let points = rho_grid
        .par_iter()
        .map(|&rho| iterate_to_limit(&AdvantageMatrix::quasi_babelian(a, rho * a)?, rho, burn_in, start))
        .collect::<Result<Vec<_>>>()?;
    let bifurcation_estimate = points
        .iter()
        .filter(|p| p.limit[0] > 1.0 - VERTEX_TOL)
        .map(|p| p.rho)
        .reduce(f64::min);
    Ok(OrbitDiagram {
        a,
        points,
        bifurcation_estimate,
    })
}

fn iterate_to_limit(
    m: &AdvantageMatrix,
    rho: f64,
    burn_in: usize,
    start: &PopulationState,
) -> Result<OrbitPoint> {
    let mut p = start.clone();
    let mut step = f64::INFINITY;
    let mut iterations = 0;
    while iterations < burn_in {
        let next = reliable_map(m, &p)?;
        step = p.max_abs_diff(next.as_slice());
        p = next;
        iterations += 1;
        if step < SWEEP_STEP_TOL {
            break;
        }
    }
    Ok(OrbitPoint {
        rho,
        limit: p,
        iterations,
        step,
        converged: step < SWEEP_STEP_TOL,
    })
}

/// Parses `start:stop:step`; includes `stop` when it lies within half a step of the grid.
pub fn parse_grid(spec: &str) -> Result<Vec<f64>> {
    let parts: Vec<f64> = spec
        .split(':')
        .map(|s| s.trim().parse::<f64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| Error::EmptyGrid)?;
    let [start, stop, step] = parts[..] else {
        return Err(Error::EmptyGrid);
    };
    if !(step > 0.0) || !start.is_finite() || !stop.is_finite() {
        return Err(Error::param("step", step, "grid step must be > 0"));
    }
    if stop < start {
        return Err(Error::EmptyGrid);
    }
    let count = ((stop - start) / step + 0.5).floor() as usize + 1;
    Ok((0..count).map(|i| start + i as f64 * step).collect())
}
