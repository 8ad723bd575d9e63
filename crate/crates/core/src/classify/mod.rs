//! Trainable classifiers: PCA, supervised PCA with arbitrary block labels,
//! multi-task supervised PCA with optimal labels, and the one-vs-all
//! multi-class extension with per-task standardization.

mod binary;
mod multiclass;
mod pca;
mod persist;

use ndarray::{Array1, ArrayView1, ArrayView2, Axis};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::datamodel::DataError;
use crate::estimator::EstimateError;
use crate::smalldense::LinalgError;
use crate::theory::TheoryError;

pub use binary::{fit_mtl_spca_binary, fit_naive_spca, fit_spca_binary, BinaryModel};
pub use multiclass::{fit_algorithm1, Allocation, MultiClassModel, OneVsAllHead};
pub use pca::{fit_pca, PcaModel};
pub use persist::{
    load_model, model_from_str, model_to_string, save_model, FORMAT_NAME, FORMAT_VERSION,
};

#[derive(Debug, Error)]
pub enum ClassifyError {
    #[error("label direction is zero: {0}")]
    DegenerateDirection(String),
    #[error("degenerate training data: {0}")]
    DegenerateData(String),
    #[error("unsupported layout: {0}")]
    Layout(String),
    #[error("test point has dimension {got}, model expects {expected}")]
    Dimension { expected: usize, got: usize },
    #[error("model file: {0}")]
    Format(String),
    #[error(transparent)]
    Data(#[from] DataError),
    #[error(transparent)]
    Estimate(#[from] EstimateError),
    #[error(transparent)]
    Theory(#[from] TheoryError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// How a projector was built.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProjectorKind {
    Pca,
    Spca,
    MtlSpca,
}

/// Outcome for one test point.
#[derive(Debug, Clone, PartialEq)]
pub struct Prediction {
    /// Zero-based class of the target task.
    pub class: usize,
    /// Raw scores: the projection for PCA, the matched-filter score for a
    /// binary model, one score per head for a multi-class model.
    pub scores: Vec<f64>,
    /// Decision statistics: squared distance to each class centroid (PCA),
    /// score minus threshold (binary), score minus own-class centre (one per
    /// head).
    pub centered: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum FittedModel {
    Pca(PcaModel),
    Binary(BinaryModel),
    MultiClass(MultiClassModel),
}

impl FittedModel {
    pub fn dim(&self) -> usize {
        match self {
            FittedModel::Pca(m) => m.basis.nrows(),
            FittedModel::Binary(m) => m.direction.len(),
            FittedModel::MultiClass(m) => m.dim(),
        }
    }

    pub fn target(&self) -> usize {
        match self {
            FittedModel::Pca(m) => m.target,
            FittedModel::Binary(m) => m.target,
            FittedModel::MultiClass(m) => m.target,
        }
    }

    /// Asymptotic error predicted at fit time from the estimated statistics
    /// (binary problems only).
    pub fn predicted_error(&self) -> Option<f64> {
        match self {
            FittedModel::Pca(m) => m.predicted_error,
            FittedModel::Binary(m) => Some(m.predicted_error),
            FittedModel::MultiClass(_) => None,
        }
    }

    fn predict_unchecked(&self, x: ArrayView1<'_, f64>) -> Prediction {
        match self {
            FittedModel::Pca(m) => m.predict_point(x),
            FittedModel::Binary(m) => m.predict_point(x),
            FittedModel::MultiClass(m) => m.predict_point(x),
        }
    }
}

impl From<PcaModel> for FittedModel {
    fn from(m: PcaModel) -> Self {
        FittedModel::Pca(m)
    }
}

impl From<BinaryModel> for FittedModel {
    fn from(m: BinaryModel) -> Self {
        FittedModel::Binary(m)
    }
}

impl From<MultiClassModel> for FittedModel {
    fn from(m: MultiClassModel) -> Self {
        FittedModel::MultiClass(m)
    }
}

/// Classifies one test point of the target task.
pub fn predict(model: &FittedModel, x: ArrayView1<'_, f64>) -> Result<Prediction, ClassifyError> {
    check_dim(model.dim(), x.len())?;
    Ok(model.predict_unchecked(x))
}

/// Classifies every column of a `p x N` matrix.
pub fn predict_batch(
    model: &FittedModel,
    x: ArrayView2<'_, f64>,
) -> Result<Vec<Prediction>, ClassifyError> {
    check_dim(model.dim(), x.nrows())?;
    Ok(x.axis_iter(Axis(1))
        .map(|col| model.predict_unchecked(col))
        .collect())
}

/// Class indices only.
pub fn predict_classes(
    model: &FittedModel,
    x: ArrayView2<'_, f64>,
) -> Result<Vec<usize>, ClassifyError> {
    Ok(predict_batch(model, x)?
        .into_iter()
        .map(|p| p.class)
        .collect())
}

fn check_dim(expected: usize, got: usize) -> Result<(), ClassifyError> {
    if expected != got {
        return Err(ClassifyError::Dimension { expected, got });
    }
    Ok(())
}

/// Unit vector along `v`, or `None` when `v` vanishes.
fn unit(v: Array1<f64>) -> Option<(Array1<f64>, f64)> {
    let norm = v.dot(&v).sqrt();
    (norm > 0.0 && norm.is_finite()).then(|| (v / norm, norm))
}
