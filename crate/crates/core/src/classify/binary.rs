use ndarray::{Array1, ArrayView1};
use serde::{Deserialize, Serialize};

use super::{unit, ClassifyError, Prediction, ProjectorKind};
use crate::datamodel::{LabelAssignment, TaskDataset};
use crate::estimator::{stats_and_sums, SplitRule, SufficientStats};
use crate::theory::{mtl_score_law_binary, optimal_error, optimal_labels};

/// Matched-filter classifier `x ↦ wᵀx` with `w = Xy/‖Xy‖`, thresholded at
/// the midpoint of the two predicted class means of the target task.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BinaryModel {
    pub kind: ProjectorKind,
    pub target: usize,
    /// One label score per block.
    pub labels: Array1<f64>,
    pub direction: Array1<f64>,
    /// `‖Xy‖`.
    pub normalizer: f64,
    pub stats: SufficientStats,
    /// Predicted score means of the two target classes (plug-in estimates).
    pub centroids: [f64; 2],
    /// Projected training means of the two target classes (diagnostic; biased
    /// because the training points also built the direction).
    pub empirical_centroids: [f64; 2],
    pub threshold: f64,
    pub predicted_error: f64,
}

impl BinaryModel {
    pub(super) fn predict_point(&self, x: ArrayView1<'_, f64>) -> Prediction {
        let s = self.direction.dot(&x);
        let first_above = self.centroids[0] >= self.centroids[1];
        let class = if s == self.threshold || (s > self.threshold) == first_above {
            0
        } else {
            1
        };
        Prediction {
            class,
            scores: vec![s],
            centered: vec![s - self.threshold],
        }
    }
}

/// Supervised PCA with one label score per (task, class) block; decisions
/// are made for task `target`, which must have two classes.
pub fn fit_spca_binary(
    x: &TaskDataset,
    labels: &Array1<f64>,
    target: usize,
) -> Result<BinaryModel, ClassifyError> {
    let (stats, sums) = stats_and_sums(x, SplitRule::Positional)?;
    fit_with_stats(x, &sums, labels, target, stats, ProjectorKind::Spca)
}

/// Supervised PCA with `+1`/`−1` labels on every task, blind to how related
/// the tasks are.
pub fn fit_naive_spca(x: &TaskDataset, target: usize) -> Result<BinaryModel, ClassifyError> {
    check_binary(x, target)?;
    fit_spca_binary(
        x,
        &LabelAssignment::plus_minus(x.layout().tasks()).vector(),
        target,
    )
}

/// Multi-task supervised PCA: estimates the statistics, derives the
/// error-minimizing labels for `target` and fits the matched filter.
pub fn fit_mtl_spca_binary(x: &TaskDataset, target: usize) -> Result<BinaryModel, ClassifyError> {
    check_binary(x, target)?;
    let (stats, sums) = stats_and_sums(x, SplitRule::Positional)?;
    let labels = optimal_labels(&stats.calm, &stats.proportions, target)?;
    if labels.iter().all(|&v| v == 0.0) {
        return Err(ClassifyError::DegenerateDirection(
            "estimated statistics carry no information on the target task".into(),
        ));
    }
    let predicted = optimal_error(&stats.calm, &stats.proportions, stats.c0, target)?;
    let mut model = fit_with_stats(x, &sums, &labels, target, stats, ProjectorKind::MtlSpca)?;
    model.predicted_error = predicted;
    Ok(model)
}

pub(super) fn check_binary(x: &TaskDataset, target: usize) -> Result<(), ClassifyError> {
    let layout = x.layout();
    if layout.classes() != 2 {
        return Err(ClassifyError::Layout(format!(
            "binary model needs two classes per task, found {}",
            layout.classes()
        )));
    }
    if target >= layout.tasks() {
        return Err(ClassifyError::Layout(format!(
            "target task {} but the data has {} tasks",
            target + 1,
            layout.tasks()
        )));
    }
    Ok(())
}

/// `sums` are the block sums `XJ` of `x`.
pub(super) fn fit_with_stats(
    x: &TaskDataset,
    sums: &ndarray::Array2<f64>,
    labels: &Array1<f64>,
    target: usize,
    stats: SufficientStats,
    kind: ProjectorKind,
) -> Result<BinaryModel, ClassifyError> {
    check_binary(x, target)?;
    if labels.len() != sums.ncols() {
        return Err(ClassifyError::Layout(format!(
            "{} label scores for {} blocks",
            labels.len(),
            sums.ncols()
        )));
    }
    let xy = sums.dot(labels);
    let (direction, normalizer) = unit(xy)
        .ok_or_else(|| ClassifyError::DegenerateDirection("Xy = 0 for the given labels".into()))?;

    let law = mtl_score_law_binary(&stats.calm, &stats.proportions, stats.c0, labels)?;
    let (a, b) = (2 * target, 2 * target + 1);
    let counts = x.layout().block_counts();
    let centroids = [law.means[[a, 0]], law.means[[b, 0]]];
    let empirical_centroids = [
        direction.dot(&sums.column(a)) / counts[a] as f64,
        direction.dot(&sums.column(b)) / counts[b] as f64,
    ];
    Ok(BinaryModel {
        kind,
        target,
        labels: labels.clone(),
        direction,
        normalizer,
        threshold: 0.5 * (centroids[0] + centroids[1]),
        predicted_error: law.binary_error(target),
        centroids,
        empirical_centroids,
        stats,
    })
}
