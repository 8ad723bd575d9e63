//! Closed-form large-dimensional predictions: where spikes separate from the
//! noise bulk, the Gaussian law of projected test scores, the error rates
//! they imply, and the label vector that minimizes the error on a target task.

mod laws;
mod optimal;
mod spectral;

use ndarray::{Array2, ArrayView1};
use serde::{Deserialize, Serialize};

use thiserror::Error;

use crate::smalldense::{LinalgError, SymMatrix};

pub use laws::{mtl_score_law, mtl_score_law_binary, pca_score_law, spca_score_law};
pub use optimal::{optimal_error, optimal_labels, pca_spca_gap, GapSummary};
pub use spectral::{phase_transition, SpectralSummary};

#[derive(Debug, Error)]
pub enum TheoryError {
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("label vector is zero")]
    ZeroLabels,
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Standard normal upper tail `P(N(0,1) > t)`.
pub fn qfunc(t: f64) -> f64 {
    0.5 * libm::erfc(t / std::f64::consts::SQRT_2)
}

/// Limiting law of projected test scores: a test point of block `a` has
/// score `N(means[a], I_τ)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreLaw {
    /// `mk x τ`, one row per block.
    pub means: Array2<f64>,
    /// Some eigenvalue used by the law was (numerically) repeated. Means are
    /// then basis dependent inside the cluster; separations and errors are not.
    pub degenerate: bool,
}

impl ScoreLaw {
    /// Score dimension `τ`.
    pub fn dim(&self) -> usize {
        self.means.ncols()
    }

    pub fn mean(&self, block: usize) -> ArrayView1<'_, f64> {
        self.means.row(block)
    }

    /// `‖𝔪_a − 𝔪_b‖`.
    pub fn separation(&self, a: usize, b: usize) -> f64 {
        let d = &self.means.row(a) - &self.means.row(b);
        d.dot(&d).sqrt()
    }

    /// Error of the nearest-mean rule between blocks `a` and `b` under equal
    /// priors, `Q(‖𝔪_a − 𝔪_b‖ / 2)`.
    pub fn error_between(&self, a: usize, b: usize) -> f64 {
        qfunc(0.5 * self.separation(a, b))
    }

    /// Error on a two-class task (blocks `2t` and `2t + 1`).
    pub fn binary_error(&self, task: usize) -> f64 {
        self.error_between(2 * task, 2 * task + 1)
    }

    /// Midpoint of the two class means of a two-class task, for scalar laws.
    pub fn threshold(&self, task: usize) -> Option<f64> {
        (self.dim() == 1).then(|| 0.5 * (self.means[[2 * task, 0]] + self.means[[2 * task + 1, 0]]))
    }
}

/// Checks that `calm`, `c` and `c0` describe the same `mk` blocks.
pub(crate) fn check_inputs(calm: &SymMatrix, c: &[f64], c0: f64) -> Result<(), TheoryError> {
    if calm.order() != c.len() {
        return Err(TheoryError::Invalid(format!(
            "normalized Gram matrix has order {}, {} proportions given",
            calm.order(),
            c.len()
        )));
    }
    if c.iter().any(|&v| !(v > 0.0 && v.is_finite())) {
        return Err(TheoryError::Invalid("proportions must be positive".into()));
    }
    if !(c0 > 0.0 && c0.is_finite()) {
        return Err(TheoryError::Invalid(format!(
            "ratio p/n = {c0} must be positive"
        )));
    }
    Ok(())
}
