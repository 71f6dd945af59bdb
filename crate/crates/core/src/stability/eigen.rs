use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Moduli of all eigenvalues of a small real matrix, sorted descending.
/// Complex-conjugate pairs contribute two equal moduli.
pub fn eigen_moduli(m: &DMatrix<f64>) -> Result<Vec<f64>> {
    if !m.is_square() {
        return Err(Error::NotSquare {
            rows: m.nrows(),
            cols: m.ncols(),
        });
    }
    if m.is_empty() {
        return Ok(Vec::new());
    }
    let mut moduli: Vec<f64> = m
        .clone()
        .complex_eigenvalues()
        .iter()
        .map(|z| z.norm())
        .collect();
    moduli.sort_by(|a, b| b.total_cmp(a));
    Ok(moduli)
}
