//! Points on the probability simplex.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance on `Σ p_i = 1` accepted at construction.
pub const SIMPLEX_TOL: f64 = 1e-12;

/// Community-level grammar probabilities `p`, one entry per grammar.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct PopulationState(Vec<f64>);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StateKind {
    /// Some `p_i = 1`.
    Vertex,
    /// Some `p_i = 0`, none equal to 1.
    Boundary,
    Interior,
}

impl PopulationState {
    /// Checked constructor: non-negative entries summing to 1 within [`SIMPLEX_TOL`].
    pub fn new(p: Vec<f64>) -> Result<Self> {
        Self::with_tolerance(p, SIMPLEX_TOL)
    }

    pub fn with_tolerance(p: Vec<f64>, tol: f64) -> Result<Self> {
        if p.is_empty() {
            return Err(Error::OffSimplex("empty state".into()));
        }
        if let Some((i, v)) = p
            .iter()
            .enumerate()
            .find(|(_, v)| !v.is_finite() || **v < 0.0)
        {
            return Err(Error::OffSimplex(format!("p[{i}] = {v}")));
        }
        let sum: f64 = p.iter().sum();
        if (sum - 1.0).abs() > tol {
            return Err(Error::OffSimplex(format!("sum = {sum}")));
        }
        Ok(Self(p))
    }

    /// Clamps negatives to zero and divides by the sum. Fails only if nothing positive remains.
    pub fn normalized(mut p: Vec<f64>) -> Result<Self> {
        for v in p.iter_mut() {
            if !v.is_finite() {
                return Err(Error::OffSimplex(format!("non-finite entry {v}")));
            }
            *v = v.max(0.0);
        }
        let sum: f64 = p.iter().sum();
        if sum <= 0.0 {
            return Err(Error::OffSimplex("no positive mass".into()));
        }
        p.iter_mut().for_each(|v| *v /= sum);
        Ok(Self(p))
    }

    pub fn vertex(n: usize, i: usize) -> Result<Self> {
        if i >= n {
            return Err(Error::IndexOutOfRange { index: i, len: n });
        }
        let mut p = vec![0.0; n];
        p[i] = 1.0;
        Ok(Self(p))
    }

    pub fn uniform(n: usize) -> Self {
        Self(vec![1.0 / n as f64; n])
    }

    /// Wraps a vector already known to lie on the simplex.
    pub(crate) fn from_raw(p: Vec<f64>) -> Self {
        Self(p)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    pub fn kind(&self) -> StateKind {
        if self.0.iter().any(|&v| v == 1.0) {
            StateKind::Vertex
        } else if self.0.iter().any(|&v| v == 0.0) {
            StateKind::Boundary
        } else {
            StateKind::Interior
        }
    }

    /// Index of the vertex this state sits on, if any.
    pub fn vertex_index(&self) -> Option<usize> {
        self.0.iter().position(|&v| v == 1.0)
    }

    pub fn max_abs_diff(&self, other: &[f64]) -> f64 {
        self.0
            .iter()
            .zip(other)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// Barycentric projection for ternary plots: `tx = p2 + p3/2`, `ty = (√3/2) p3`.
    pub fn ternary(&self) -> Option<(f64, f64)> {
        match self.0.as_slice() {
            [_, p2, p3] => Some((p2 + p3 / 2.0, 3f64.sqrt() / 2.0 * p3)),
            _ => None,
        }
    }
}

impl std::ops::Index<usize> for PopulationState {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl TryFrom<Vec<f64>> for PopulationState {
    type Error = Error;
    fn try_from(v: Vec<f64>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<PopulationState> for Vec<f64> {
    fn from(p: PopulationState) -> Self {
        p.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classifies_states() {
        assert_eq!(
            PopulationState::vertex(3, 1).unwrap().kind(),
            StateKind::Vertex
        );
        assert_eq!(
            PopulationState::new(vec![0.1, 0.9, 0.0]).unwrap().kind(),
            StateKind::Boundary
        );
        assert_eq!(PopulationState::uniform(3).kind(), StateKind::Interior);
    }

    #[test]
    fn rejects_off_simplex() {
        assert!(PopulationState::new(vec![0.5, 0.6]).is_err());
        assert!(PopulationState::new(vec![-0.1, 1.1]).is_err());
        assert!(PopulationState::new(vec![f64::NAN, 1.0]).is_err());
        assert!(PopulationState::new(vec![]).is_err());
    }

    #[test]
    fn ternary_projection() {
        let (tx, ty) = PopulationState::vertex(3, 2).unwrap().ternary().unwrap();
        assert!((tx - 0.5).abs() < 1e-15);
        assert!((ty - 3f64.sqrt() / 2.0).abs() < 1e-15);
        assert!(PopulationState::uniform(2).ternary().is_none());
    }

    #[test]
    fn serde_validates() {
        let p: PopulationState = serde_json::from_str("[0.25,0.75]").unwrap();
        assert_eq!(p.as_slice(), &[0.25, 0.75]);
        assert!(serde_json::from_str::<PopulationState>("[0.25,0.5]").is_err());
    }
}
