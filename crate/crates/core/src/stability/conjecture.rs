//! Fuzzing harness for two open questions about proper systems: whether every
//! one has either `n` or `n + 1` rest points, and whether an interior rest point,
//! when present, is always asymptotically stable. Outcomes are tallied and any
//! deviating system is kept in full; nothing here asserts either claim.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::rest_points::{search_rest_points, Classification, RestPointOptions, RestPointReport};
use crate::advantage::{AdvantageMatrix, RegionMeasure};
use crate::error::{Error, Result};
use crate::rng;

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RestPointCounts {
    /// Exactly the `n` vertices.
    pub n: usize,
    /// Vertices plus one interior point.
    pub n_plus_1: usize,
    pub other: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Counterexample {
    pub trial: usize,
    pub reason: String,
    pub regions: Option<RegionMeasure>,
    pub matrix: AdvantageMatrix,
    pub rest_points: Vec<RestPointReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConjectureReport {
    pub n: usize,
    pub trials: usize,
    pub seed: u64,
    pub rest_point_counts: RestPointCounts,
    /// Tallies over interior rest points (a trial may contribute several).
    pub interior_stable_count: usize,
    pub interior_unstable_count: usize,
    pub interior_inconclusive_count: usize,
    pub counterexamples: Vec<Counterexample>,
}

impl ConjectureReport {
    pub fn fraction_n_or_n_plus_1(&self) -> f64 {
        (self.rest_point_counts.n + self.rest_point_counts.n_plus_1) as f64 / self.trials as f64
    }
}

/// Outcome of a single system.
#[derive(Debug, Clone, PartialEq)]
pub struct Assessment {
    pub rest_points: Vec<RestPointReport>,
    pub interior: Vec<Classification>,
}

impl Assessment {
    pub fn count(&self) -> usize {
        self.rest_points.len()
    }

    fn deviation(&self, n: usize) -> Option<String> {
        if self.count() != n && self.count() != n + 1 {
            return Some(format!("{} rest points", self.count()));
        }
        let unstable = self
            .interior
            .iter()
            .filter(|c| **c != Classification::AsymptoticallyStable)
            .count();
        (unstable > 0).then(|| format!("{unstable} interior rest point(s) not classified stable"))
    }
}

pub fn assess(a: &AdvantageMatrix) -> Result<Assessment> {
    let search = search_rest_points(a, &RestPointOptions::default())?;
    let interior = search.interior().map(|r| r.classification).collect();
    Ok(Assessment {
        rest_points: search.reports,
        interior,
    })
}

/// Samples `trials` systems of `n` grammars from uniformly drawn region measures
/// (admissible by construction) and tallies their rest-point structure.
pub fn conjecture_explore(trials: usize, n: usize, seed: u64) -> Result<ConjectureReport> {
    if trials == 0 {
        return Err(Error::param("trials", 0.0, "must be >= 1"));
    }
    if n < 2 {
        return Err(Error::BadShape { rows: n });
    }
    let outcomes = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut r = rng::stream(seed, &[t as u64]);
            // A zero advantage has probability zero under the flat draw; redraw if it happens.
            loop {
                let regions = RegionMeasure::sample_uniform(n, &mut r)?;
                let matrix = AdvantageMatrix::from_regions(&regions)?;
                if matrix.is_proper() {
                    let assessment = assess(&matrix)?;
                    return Ok((regions, matrix, assessment));
                }
            }
        })
        .collect::<Result<Vec<_>>>()?;

    let mut report = ConjectureReport {
        n,
        trials,
        seed,
        rest_point_counts: RestPointCounts::default(),
        interior_stable_count: 0,
        interior_unstable_count: 0,
        interior_inconclusive_count: 0,
        counterexamples: Vec::new(),
    };
    for (trial, (regions, matrix, assessment)) in outcomes.into_iter().enumerate() {
        match assessment.count() {
            c if c == n => report.rest_point_counts.n += 1,
            c if c == n + 1 => report.rest_point_counts.n_plus_1 += 1,
            _ => report.rest_point_counts.other += 1,
        }
        for c in &assessment.interior {
            match c {
                Classification::AsymptoticallyStable => report.interior_stable_count += 1,
                Classification::Unstable => report.interior_unstable_count += 1,
                Classification::Inconclusive => report.interior_inconclusive_count += 1,
            }
        }
        if let Some(reason) = assessment.deviation(n) {
            report.counterexamples.push(Counterexample {
                trial,
                reason,
                regions: Some(regions),
                matrix,
                rest_points: assessment.rest_points,
            });
        }
    }
    Ok(report)
}
