use serde::{Deserialize, Serialize};

use crate::advantage::AdvantageMatrix;
use crate::error::Result;
use crate::simplex::PopulationState;

/// Advantage-matrix families with closed-form interior rest points.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "class", rename_all = "kebab-case")]
pub enum SystemClass {
    Babelian { n: usize, a: f64 },
    Symmetric { a: f64, b: f64, c: f64 },
    QuasiBabelian { a: f64, b: f64 },
}

impl SystemClass {
    pub fn matrix(&self) -> Result<AdvantageMatrix> {
        match *self {
            SystemClass::Babelian { n, a } => AdvantageMatrix::babelian(n, a),
            SystemClass::Symmetric { a, b, c } => AdvantageMatrix::symmetric(a, b, c),
            SystemClass::QuasiBabelian { a, b } => AdvantageMatrix::quasi_babelian(a, b),
        }
    }
}

/// Closed-form interior rest point; `None` for quasi-Babelian systems with `ρ = b/a ≥ 2`.
///
/// * Babelian: the uniform state.
/// * Symmetric: `(c, b, a) / (a + b + c)`.
/// * Quasi-Babelian: `(1, 2 − ρ, 2 − ρ) / (5 − 2ρ)`.
pub fn analytic_rest_point(class: &SystemClass) -> Option<PopulationState> {
    match *class {
        SystemClass::Babelian { n, .. } => Some(PopulationState::uniform(n)),
        SystemClass::Symmetric { a, b, c } => {
            let d = a + b + c;
            Some(PopulationState::from_raw(vec![c / d, b / d, a / d]))
        }
        SystemClass::QuasiBabelian { a, b } => {
            let rho = b / a;
            if rho >= 2.0 {
                return None;
            }
            let d = 5.0 - 2.0 * rho;
            let rest = (2.0 - rho) / d;
            Some(PopulationState::from_raw(vec![1.0 / d, rest, rest]))
        }
    }
}
