use ndarray::{Array1, ArrayView1};
use serde::{Deserialize, Serialize};

use super::{unit, ClassifyError, Prediction};
use crate::datamodel::{one_vs_all_view, zscore_per_task, TaskDataset, ZScoreMap};
use crate::estimator::{stats_and_sums, SplitRule, SufficientStats};
use crate::theory::{mtl_score_law_binary, optimal_labels};

/// How the per-class scores are compared.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Allocation {
    /// `argmax_ℓ (g_ℓ − 𝔪̂_own,ℓ)`.
    #[default]
    Centered,
    /// `argmax_ℓ g_ℓ`.
    Uncentered,
}

/// "Class ℓ versus the rest" matched filter on standardized data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OneVsAllHead {
    /// Label scores on the regrouped blocks (own class, rest) of every task.
    pub labels: Array1<f64>,
    pub direction: Array1<f64>,
    pub normalizer: f64,
    pub stats: SufficientStats,
    /// Predicted score mean of the own class on the target task.
    pub own_centre: f64,
    /// Predicted score mean of the merged other classes.
    pub rest_centre: f64,
    pub empirical_own_centre: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultiClassModel {
    pub target: usize,
    pub zscore: ZScoreMap,
    pub heads: Vec<OneVsAllHead>,
    pub allocation: Allocation,
}

impl MultiClassModel {
    pub fn classes(&self) -> usize {
        self.heads.len()
    }

    pub fn dim(&self) -> usize {
        self.heads[0].direction.len()
    }

    pub fn with_allocation(mut self, allocation: Allocation) -> Self {
        self.allocation = allocation;
        self
    }

    pub(super) fn predict_point(&self, x: ArrayView1<'_, f64>) -> Prediction {
        let z = self
            .zscore
            .apply(self.target, x)
            .expect("dimension checked by caller");
        let scores: Vec<f64> = self.heads.iter().map(|h| h.direction.dot(&z)).collect();
        let centered: Vec<f64> = scores
            .iter()
            .zip(&self.heads)
            .map(|(g, h)| g - h.own_centre)
            .collect();
        let decision = match self.allocation {
            Allocation::Centered => &centered,
            Allocation::Uncentered => &scores,
        };
        let mut class = 0;
        for (l, &v) in decision.iter().enumerate() {
            if v > decision[class] {
                class = l;
            }
        }
        Prediction {
            class,
            scores,
            centered,
        }
    }
}

/// One-vs-all multi-task supervised PCA for task `target`.
///
/// Every task is standardized with its own feature means and deviations.
/// Then, for each class ℓ, the data are regrouped into "ℓ versus rest", the
/// statistics are re-estimated on that view, and the optimal labels give a
/// unit direction. Its predicted own-class mean is the centring constant.
pub fn fit_algorithm1(x: &TaskDataset, target: usize) -> Result<MultiClassModel, ClassifyError> {
    let layout = x.layout();
    if layout.classes() < 2 {
        return Err(ClassifyError::Layout(
            "at least two classes are required".into(),
        ));
    }
    if target >= layout.tasks() {
        return Err(ClassifyError::Layout(format!(
            "target task {} but the data has {} tasks",
            target + 1,
            layout.tasks()
        )));
    }
    let (z, zscore) = zscore_per_task(x);
    let mut heads = Vec::with_capacity(layout.classes());
    for class in 0..layout.classes() {
        let view = one_vs_all_view(&z, class)?;
        let (stats, sums) = stats_and_sums(&view, SplitRule::Positional)?;
        let labels = optimal_labels(&stats.calm, &stats.proportions, target)?;
        let xy = sums.dot(&labels);
        let (direction, normalizer) = unit(xy).ok_or_else(|| {
            ClassifyError::DegenerateDirection(format!("class {} versus rest", class + 1))
        })?;
        let law = mtl_score_law_binary(&stats.calm, &stats.proportions, stats.c0, &labels)?;
        let own = view.layout().block(target, 0);
        heads.push(OneVsAllHead {
            own_centre: law.means[[own, 0]],
            rest_centre: law.means[[own + 1, 0]],
            empirical_own_centre: direction.dot(&sums.column(own))
                / view.layout().block_counts()[own] as f64,
            labels,
            direction,
            normalizer,
            stats,
        });
    }
    Ok(MultiClassModel {
        target,
        zscore,
        heads,
        allocation: Allocation::Centered,
    })
}
