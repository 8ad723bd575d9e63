use serde::{Deserialize, Serialize};

use super::{check_inputs, TheoryError};
use crate::smalldense::{sym_eigenvalues, SymMatrix};

/// Relative margin under which a spike counts as sitting on the threshold
/// (and is therefore treated as invisible).
pub(crate) const VISIBILITY_MARGIN: f64 = 1e-9;

/// Eigenvalue picture of `XXᵀ/p` in the large-dimensional limit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralSummary {
    /// Eigenvalues `ℓ_i` of the normalized Gram matrix, descending.
    pub spikes: Vec<f64>,
    /// `ℓ_i > 1/√c0`.
    pub visible: Vec<bool>,
    /// Limit of the matching isolated eigenvalue; the right bulk edge for
    /// invisible spikes.
    pub isolated: Vec<f64>,
    /// `(1 − √(1/c0))²` and `(1 + √(1/c0))²`.
    pub bulk_edges: (f64, f64),
}

pub(crate) fn is_visible(ell: f64, c0: f64) -> bool {
    ell > (1.0 + VISIBILITY_MARGIN) / c0.sqrt()
}

/// Spike visibility and isolated-eigenvalue positions for `calm` at ratio `c0`.
pub fn phase_transition(calm: &SymMatrix, c0: f64) -> Result<SpectralSummary, TheoryError> {
    check_inputs(calm, &vec![1.0; calm.order()], c0)?;
    let spikes = sym_eigenvalues(calm)?.to_vec();
    let r = (1.0 / c0).sqrt();
    let bulk_edges = ((1.0 - r).powi(2), (1.0 + r).powi(2));
    let visible: Vec<bool> = spikes.iter().map(|&l| is_visible(l, c0)).collect();
    let isolated = spikes
        .iter()
        .zip(&visible)
        .map(|(&l, &v)| {
            if v {
                1.0 + 1.0 / c0 + l + 1.0 / (c0 * l)
            } else {
                bulk_edges.1
            }
        })
        .collect();
    Ok(SpectralSummary {
        spikes,
        visible,
        isolated,
        bulk_edges,
    })
}
