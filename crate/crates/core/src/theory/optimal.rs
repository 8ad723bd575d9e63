use ndarray::Array1;

use super::{check_inputs, qfunc, TheoryError};
use crate::smalldense::{spd_solve_vec, SymMatrix};

/// `D_c^{-1/2}(e_{2t} − e_{2t+1})`, after checking the two-class layout.
fn contrast(c: &[f64], target: usize) -> Result<Array1<f64>, TheoryError> {
    if !c.len().is_multiple_of(2) || 2 * target + 1 >= c.len() {
        return Err(TheoryError::Invalid(format!(
            "target task {} does not exist in a two-class layout with {} blocks",
            target + 1,
            c.len()
        )));
    }
    let mut z = Array1::zeros(c.len());
    z[2 * target] = 1.0 / c[2 * target].sqrt();
    z[2 * target + 1] = -1.0 / c[2 * target + 1].sqrt();
    Ok(z)
}

/// Label vector minimizing the asymptotic error on task `target` of a
/// two-class layout:
/// `ỹ* ∝ D_c^{-1/2}(𝓜 + I)^{-1} 𝓜 D_c^{-1/2}(e_{t1} − e_{t2})`.
///
/// Returned with unit norm (only its direction matters); the zero vector
/// when `𝓜` carries no information on the target task.
pub fn optimal_labels(
    calm: &SymMatrix,
    c: &[f64],
    target: usize,
) -> Result<Array1<f64>, TheoryError> {
    check_inputs(calm, c, 1.0)?;
    let z = contrast(c, target)?;
    let w = calm.as_array().dot(&z);
    let mut y = spd_solve_vec(&calm.shifted(1.0), &w)?;
    for (v, &ca) in y.iter_mut().zip(c) {
        *v /= ca.sqrt();
    }
    let norm = y.dot(&y).sqrt();
    if norm > 0.0 {
        y /= norm;
    }
    Ok(y)
}

/// Error reached on task `target` with [`optimal_labels`]:
/// `Q(½ √(c0 · zᵀ 𝓜 (𝓜 + I)^{-1} 𝓜 z))` with `z = D_c^{-1/2}(e_{t1} − e_{t2})`.
pub fn optimal_error(
    calm: &SymMatrix,
    c: &[f64],
    c0: f64,
    target: usize,
) -> Result<f64, TheoryError> {
    check_inputs(calm, c, c0)?;
    let z = contrast(c, target)?;
    let w = calm.as_array().dot(&z);
    let s = spd_solve_vec(&calm.shifted(1.0), &w)?;
    let quad = w.dot(&s).max(0.0);
    Ok(qfunc(0.5 * (c0 * quad).sqrt()))
}

/// How much supervised PCA gains over PCA on one two-class task, in squared
/// score separation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GapSummary {
    /// `Δ𝔪²_spca − Δ𝔪²_pca = 16 / ((n/p)‖Δμ‖² + 4)`.
    pub absolute: f64,
    /// Absolute gap over `Δ𝔪²_spca`, `16 / ((n/p)‖Δμ‖⁴)`.
    pub relative: f64,
}

/// Closed-form gaps for `‖Δμ‖² = dmu2` at sample-to-dimension ratio
/// `n_over_p`, for a spike above the visibility threshold. They do not
/// depend on the class proportions.
pub fn pca_spca_gap(dmu2: f64, n_over_p: f64) -> Result<GapSummary, TheoryError> {
    if !(dmu2 > 0.0 && n_over_p > 0.0) {
        return Err(TheoryError::Invalid(
            "‖Δμ‖² and n/p must be positive".into(),
        ));
    }
    Ok(GapSummary {
        absolute: 16.0 / (n_over_p * dmu2 + 4.0),
        relative: 16.0 / (n_over_p * dmu2 * dmu2),
    })
}
