use ndarray::{Array2, ArrayView1};
use serde::{Deserialize, Serialize};

use super::{ClassifyError, Prediction};
use crate::datamodel::{column_mean, TaskDataset};
use crate::estimator::{build_stats, SufficientStats};
use crate::smalldense::top_subspace;
use crate::theory::{pca_score_law, phase_transition};

/// Nearest-centroid classifier on the top `τ` principal directions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PcaModel {
    pub target: usize,
    /// `p x τ`, orthonormal.
    pub basis: Array2<f64>,
    pub stats: SufficientStats,
    /// `m x τ` predicted class centroids (plug-in estimates, signs matched
    /// to the sample eigenvectors).
    pub centroids: Array2<f64>,
    /// `m x τ` projected training class means.
    pub empirical_centroids: Array2<f64>,
    /// Whether each estimated spike lies above the visibility threshold.
    pub visible: Vec<bool>,
    pub predicted_error: Option<f64>,
    pub warning: Option<String>,
}

impl PcaModel {
    pub(super) fn predict_point(&self, x: ArrayView1<'_, f64>) -> Prediction {
        let s = self.basis.t().dot(&x);
        let centered: Vec<f64> = self
            .centroids
            .rows()
            .into_iter()
            .map(|c| {
                let d = &s - &c;
                d.dot(&d)
            })
            .collect();
        let mut class = 0;
        for (j, &d) in centered.iter().enumerate() {
            if d < centered[class] {
                class = j;
            }
        }
        Prediction {
            class,
            scores: s.to_vec(),
            centered,
        }
    }
}

/// PCA classifier on single-task data.
///
/// Centroids come from the asymptotic law evaluated at the estimated
/// statistics. Components whose spike is not visible get zero centroid
/// entries, so with no visible spike every class ties and class 1 is
/// returned, with a warning recorded in the model.
pub fn fit_pca(x: &TaskDataset, tau: usize) -> Result<PcaModel, ClassifyError> {
    let layout = x.layout();
    if layout.tasks() != 1 {
        return Err(ClassifyError::Layout(format!(
            "PCA classifier expects a single task, found {}",
            layout.tasks()
        )));
    }
    if x.samples().iter().all(|&v| v == 0.0) {
        return Err(ClassifyError::DegenerateData("all samples are zero".into()));
    }
    let classes = layout.classes();
    let basis = top_subspace(x.samples(), tau)?.basis;
    let stats = build_stats(x)?;
    let law_tau = tau.min(classes);
    let law = pca_score_law(&stats.calm, &stats.proportions, stats.c0, law_tau)?;
    let spectrum = phase_transition(&stats.calm, stats.c0)?;

    let mut empirical_centroids = Array2::zeros((classes, tau));
    for j in 0..classes {
        empirical_centroids
            .row_mut(j)
            .assign(&basis.t().dot(&column_mean(x.block(j))));
    }
    let mut centroids = Array2::zeros((classes, tau));
    for i in 0..law_tau {
        let mut col = law.means.column(i).to_owned();
        let agreement: f64 = (0..classes)
            .map(|j| layout.block_counts()[j] as f64 * col[j] * empirical_centroids[[j, i]])
            .sum();
        if agreement < 0.0 {
            col.mapv_inplace(|v| -v);
        }
        centroids.column_mut(i).assign(&col);
    }

    let visible: Vec<bool> = spectrum.visible.iter().take(law_tau).copied().collect();
    let warning = (!visible.iter().any(|&v| v)).then(|| {
        "no estimated spike is above the visibility threshold; the projection carries no class \
         information and every point is assigned to class 1"
            .to_string()
    });
    let predicted_error = (classes == 2).then(|| law.error_between(0, 1));
    Ok(PcaModel {
        target: 0,
        basis,
        stats,
        centroids,
        empirical_centroids,
        visible,
        predicted_error,
        warning,
    })
}
