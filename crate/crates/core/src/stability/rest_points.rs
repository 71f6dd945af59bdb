use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::eigen::eigen_moduli;
use super::jacobian::{chart_jacobian, DEFAULT_STEP};
use crate::advantage::AdvantageMatrix;
use crate::dynamics::reliable_map;
use crate::error::Result;
use crate::simplex::{PopulationState, StateKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Classification {
    AsymptoticallyStable,
    Unstable,
    Inconclusive,
}

/// Stable iff every modulus is below `1 − margin`; unstable iff one exceeds `1 + margin`.
pub fn classify(moduli: &[f64], margin: f64) -> Classification {
    if moduli.iter().all(|&m| m < 1.0 - margin) {
        Classification::AsymptoticallyStable
    } else if moduli.iter().any(|&m| m > 1.0 + margin) {
        Classification::Unstable
    } else {
        Classification::Inconclusive
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RestPointReport {
    pub location: PopulationState,
    pub kind: StateKind,
    /// Interior: `max_i |c_i p_i − mean_j c_j p_j|`. Otherwise: `max_i |p_i' − p_i|`.
    pub residual: f64,
    pub eigenvalue_moduli: Vec<f64>,
    pub classification: Classification,
}

impl RestPointReport {
    pub fn largest_modulus(&self) -> f64 {
        self.eigenvalue_moduli.first().copied().unwrap_or(0.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RestPointOptions {
    /// Newton convergence threshold on `‖r‖∞`.
    pub tol: f64,
    /// Finite-difference step for the chart Jacobian.
    pub h: f64,
    /// Tie margin around 1 for classification.
    pub margin: f64,
    pub starts: usize,
    pub max_iterations: usize,
}

impl Default for RestPointOptions {
    fn default() -> Self {
        Self {
            tol: 1e-12,
            h: DEFAULT_STEP,
            margin: 1e-7,
            starts: 50,
            max_iterations: 100,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RestPointSearch {
    /// Vertices first, then interior points in order of discovery.
    pub reports: Vec<RestPointReport>,
    pub starts: usize,
    /// Newton starts that reached an interior solution.
    pub converged_starts: usize,
}

impl RestPointSearch {
    pub fn interior(&self) -> impl Iterator<Item = &RestPointReport> {
        self.reports.iter().filter(|r| r.kind == StateKind::Interior)
    }
}

const SHRINK: f64 = 1e-12;
const DEDUP: f64 = 1e-8;
const INTERIOR_FLOOR: f64 = 1e-9;
const MAX_HALVINGS: usize = 30;

/// Vertices plus every interior solution of `c_1 p_1 = … = c_n p_n` reachable by
/// damped Newton from quasi-random interior starts.
pub fn find_rest_points(a: &AdvantageMatrix, tol: f64) -> Result<Vec<RestPointReport>> {
    let opts = RestPointOptions {
        tol,
        ..RestPointOptions::default()
    };
    Ok(search_rest_points(a, &opts)?.reports)
}

pub fn search_rest_points(a: &AdvantageMatrix, opts: &RestPointOptions) -> Result<RestPointSearch> {
    a.require_proper()?;
    let n = a.n();
    let mut reports = Vec::new();
    for i in 0..n {
        reports.push(report(a, PopulationState::vertex(n, i)?, opts)?);
    }
    let mut found: Vec<Vec<f64>> = Vec::new();
    let mut converged_starts = 0;
    for start in simplex_starts(n, opts.starts) {
        let Some(p) = newton(a, start, opts) else {
            continue;
        };
        if p.iter().any(|&v| v < INTERIOR_FLOOR) {
            continue;
        }
        converged_starts += 1;
        let duplicate = found.iter().any(|q| {
            q.iter()
                .zip(&p)
                .all(|(x, y)| (x - y).abs() <= DEDUP)
        });
        if !duplicate {
            found.push(p);
        }
    }
    for p in found {
        reports.push(report(a, PopulationState::from_raw(p), opts)?);
    }
    Ok(RestPointSearch {
        reports,
        starts: opts.starts,
        converged_starts,
    })
}

/// Builds the report for a known rest point.
pub fn report(
    a: &AdvantageMatrix,
    location: PopulationState,
    opts: &RestPointOptions,
) -> Result<RestPointReport> {
    let kind = location.kind();
    let residual = match kind {
        StateKind::Interior => balance_residual(a, location.as_slice()),
        _ => {
            let next = reliable_map(a, &location)?;
            location.max_abs_diff(next.as_slice())
        }
    };
    let moduli = eigen_moduli(&chart_jacobian(a, &location, opts.h)?)?;
    Ok(RestPointReport {
        classification: classify(&moduli, opts.margin),
        location,
        kind,
        residual,
        eigenvalue_moduli: moduli,
    })
}

/// `max_i |c_i p_i − mean_j c_j p_j|`.
pub fn balance_residual(a: &AdvantageMatrix, p: &[f64]) -> f64 {
    let g = weighted_penalties(a, p);
    let mean = g.iter().sum::<f64>() / g.len() as f64;
    g.iter().map(|v| (v - mean).abs()).fold(0.0, f64::max)
}

fn weighted_penalties(a: &AdvantageMatrix, p: &[f64]) -> Vec<f64> {
    let mut c = vec![0.0; a.n()];
    a.penalties_into(p, &mut c);
    c.iter().zip(p).map(|(c, p)| c * p).collect()
}

/// `r_i = c_i p_i − c_n p_n`, `i < n`.
fn residual(a: &AdvantageMatrix, p: &[f64]) -> DVector<f64> {
    let g = weighted_penalties(a, p);
    let last = g[g.len() - 1];
    DVector::from_iterator(g.len() - 1, g[..g.len() - 1].iter().map(|v| v - last))
}

/// Jacobian of [`residual`] in the chart. With `g_i = c_i p_i`,
/// `∂g_i/∂p_j = a_ij p_i + δ_ij c_i` and `∂/∂q_k = ∂/∂p_k − ∂/∂p_n`.
fn residual_jacobian(a: &AdvantageMatrix, p: &[f64]) -> DMatrix<f64> {
    let n = a.n();
    let mut c = vec![0.0; n];
    a.penalties_into(p, &mut c);
    let dg = |i: usize, j: usize| a.get(i, j) * p[i] + if i == j { c[i] } else { 0.0 };
    let dq = |i: usize, k: usize| dg(i, k) - dg(i, n - 1);
    DMatrix::from_fn(n - 1, n - 1, |i, k| dq(i, k) - dq(n - 1, k))
}

fn project(mut p: Vec<f64>) -> Vec<f64> {
    for v in p.iter_mut() {
        *v = v.max(SHRINK);
    }
    let s: f64 = p.iter().sum();
    p.iter_mut().for_each(|v| *v /= s);
    p
}

fn newton(a: &AdvantageMatrix, start: Vec<f64>, opts: &RestPointOptions) -> Option<Vec<f64>> {
    let n = a.n();
    let mut p = project(start);
    let mut r = residual(a, &p);
    let mut norm = r.amax();
    for _ in 0..opts.max_iterations {
        if norm <= opts.tol {
            return Some(p);
        }
        let step = residual_jacobian(a, &p).lu().solve(&(-&r))?;
        let mut t = 1.0;
        let mut accepted = false;
        for _ in 0..=MAX_HALVINGS {
            let mut q = p.clone();
            for k in 0..n - 1 {
                q[k] += t * step[k];
                q[n - 1] -= t * step[k];
            }
            let q = project(q);
            let rq = residual(a, &q);
            let nq = rq.amax();
            if nq < norm {
                p = q;
                r = rq;
                norm = nq;
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    (norm <= opts.tol).then_some(p)
}

/// Quasi-random interior points: Halton points in `[0,1]^{n−1}`, sorted, turned
/// into spacings.
pub(crate) fn simplex_starts(n: usize, count: usize) -> Vec<Vec<f64>> {
    const PRIMES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    (1..=count as u64)
        .map(|idx| {
            let mut cuts: Vec<f64> = PRIMES[..n - 1]
                .iter()
                .map(|&b| radical_inverse(idx, b))
                .collect();
            cuts.sort_by(f64::total_cmp);
            let mut prev = 0.0;
            let mut p = Vec::with_capacity(n);
            for c in cuts {
                p.push(c - prev);
                prev = c;
            }
            p.push(1.0 - prev);
            p
        })
        .collect()
}

fn radical_inverse(mut i: u64, base: u64) -> f64 {
    let inv = 1.0 / base as f64;
    let mut f = inv;
    let mut x = 0.0;
    while i > 0 {
        x += (i % base) as f64 * f;
        i /= base;
        f *= inv;
    }
    x
}
