use nalgebra::DMatrix;

use crate::advantage::AdvantageMatrix;
use crate::dynamics::map_into;
use crate::error::{Error, Result};
use crate::simplex::PopulationState;

pub const DEFAULT_STEP: f64 = 1e-6;

/// Jacobian of the reliable map in the chart `(p_1, …, p_{n−1})`, `p_n = 1 − Σ`.
///
/// Central differences in the interior; second-order one-sided differences for
/// a chart coordinate within `h` of 0 or 1. Perturbed points may leave the
/// simplex slightly; the map is a rational function that stays smooth there
/// for proper matrices.
pub fn chart_jacobian(a: &AdvantageMatrix, p: &PopulationState, h: f64) -> Result<DMatrix<f64>> {
    a.require_proper()?;
    if p.dim() != a.n() {
        return Err(Error::DimensionMismatch {
            expected: a.n(),
            actual: p.dim(),
        });
    }
    if !(h > 0.0) {
        return Err(Error::param("h", h, "step must be > 0"));
    }
    let n = a.n();
    let m = n - 1;
    let base = p.as_slice();
    let mut jac = DMatrix::zeros(m, m);
    let eval = |k: usize, offset: f64| -> Vec<f64> {
        let mut q = base.to_vec();
        q[k] += offset;
        q[n - 1] -= offset;
        let mut out = vec![0.0; n];
        map_into(a, &q, &mut out);
        out
    };
    for k in 0..m {
        let x = base[k];
        let column: Vec<f64> = if x < h {
            let (f0, f1, f2) = (eval(k, 0.0), eval(k, h), eval(k, 2.0 * h));
            (0..m)
                .map(|i| (-3.0 * f0[i] + 4.0 * f1[i] - f2[i]) / (2.0 * h))
                .collect()
        } else if x > 1.0 - h {
            let (f0, f1, f2) = (eval(k, 0.0), eval(k, -h), eval(k, -2.0 * h));
            (0..m)
                .map(|i| (3.0 * f0[i] - 4.0 * f1[i] + f2[i]) / (2.0 * h))
                .collect()
        } else {
            let (fp, fm) = (eval(k, h), eval(k, -h));
            (0..m).map(|i| (fp[i] - fm[i]) / (2.0 * h)).collect()
        };
        for (i, v) in column.into_iter().enumerate() {
            jac[(i, k)] = v;
        }
    }
    Ok(jac)
}
