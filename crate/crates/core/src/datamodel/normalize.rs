use ndarray::{Array1, Array2, ArrayView1, ArrayView2, Axis};
use serde::{Deserialize, Serialize};

use super::{DataError, TaskDataset};

/// Per-task affine maps `x ↦ (x - mean) / scale` learned on training data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZScoreMap {
    pub means: Vec<Vec<f64>>,
    /// Standard deviations; features with zero variance keep a scale of 1
    /// and are listed in `constant_features`.
    pub scales: Vec<Vec<f64>>,
    pub constant_features: Vec<Vec<usize>>,
}

impl ZScoreMap {
    pub fn tasks(&self) -> usize {
        self.means.len()
    }

    /// True when some feature of some task had zero variance.
    pub fn has_warnings(&self) -> bool {
        self.constant_features.iter().any(|f| !f.is_empty())
    }

    pub fn apply(&self, task: usize, x: ArrayView1<'_, f64>) -> Result<Array1<f64>, DataError> {
        self.check(task, x.len())?;
        let (mu, s) = (&self.means[task], &self.scales[task]);
        Ok(x.iter()
            .zip(mu)
            .zip(s)
            .map(|((&v, &m), &d)| (v - m) / d)
            .collect())
    }

    /// Applies the task map to every column of a `p x N` matrix.
    pub fn apply_columns(
        &self,
        task: usize,
        x: ArrayView2<'_, f64>,
    ) -> Result<Array2<f64>, DataError> {
        self.check(task, x.nrows())?;
        let (mu, s) = (&self.means[task], &self.scales[task]);
        let mut out = x.to_owned();
        for (i, mut row) in out.axis_iter_mut(Axis(0)).enumerate() {
            row.mapv_inplace(|v| (v - mu[i]) / s[i]);
        }
        Ok(out)
    }

    fn check(&self, task: usize, dim: usize) -> Result<(), DataError> {
        if task >= self.tasks() {
            return Err(DataError::OutOfRange(format!("task {}", task + 1)));
        }
        if dim != self.means[task].len() {
            return Err(DataError::Shape(format!(
                "point has dimension {dim}, map expects {}",
                self.means[task].len()
            )));
        }
        Ok(())
    }
}

/// Standardizes every feature within each task (population variance).
///
/// Returns the standardized dataset and the maps to apply to test points of
/// each task. Constant features are only centred, and reported in the map.
pub fn zscore_per_task(x: &TaskDataset) -> (TaskDataset, ZScoreMap) {
    let layout = x.layout().clone();
    let p = layout.dim();
    let mut samples = x.samples().to_owned();
    let mut map = ZScoreMap {
        means: Vec::with_capacity(layout.tasks()),
        scales: Vec::with_capacity(layout.tasks()),
        constant_features: Vec::with_capacity(layout.tasks()),
    };

    for t in 0..layout.tasks() {
        let range = layout.task_range(t);
        let nt = range.len() as f64;
        let mut block = samples.slice_mut(ndarray::s![.., range]);
        let mut means = vec![0.0; p];
        let mut scales = vec![1.0; p];
        let mut constant = Vec::new();
        for (i, mut row) in block.axis_iter_mut(Axis(0)).enumerate() {
            let mean = row.sum() / nt;
            let var = row.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / nt;
            let sd = var.sqrt();
            let floor = 1e-12 * mean.abs().max(1.0);
            means[i] = mean;
            if sd > floor {
                scales[i] = sd;
                row.mapv_inplace(|v| (v - mean) / sd);
            } else {
                constant.push(i);
                row.fill(0.0);
            }
        }
        map.means.push(means);
        map.scales.push(scales);
        map.constant_features.push(constant);
    }

    let out =
        TaskDataset::new(layout, samples).expect("standardization keeps shape and finiteness");
    (out, map)
}
