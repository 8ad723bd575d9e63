use ndarray::{Array1, Array2, ArrayView1, Axis};
use serde::{Deserialize, Serialize};

use super::{DataError, TaskDataset, TaskLayout};

/// Per-block label scores `ỹ` (`mk x q`). Every sample of block `a`
/// receives row `a`; the expansion `y = Jỹ` never materializes `J`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabelAssignment {
    rows: usize,
    cols: usize,
    scores: Vec<f64>,
}

impl LabelAssignment {
    pub fn new(scores: Array2<f64>) -> Self {
        let (rows, cols) = scores.dim();
        Self {
            rows,
            cols,
            scores: scores.iter().copied().collect(),
        }
    }

    /// Binary case: one score per block.
    pub fn binary(scores: Array1<f64>) -> Self {
        let rows = scores.len();
        Self {
            rows,
            cols: 1,
            scores: scores.to_vec(),
        }
    }

    /// `(+1, -1)` repeated for every task.
    pub fn plus_minus(tasks: usize) -> Self {
        Self::binary(
            (0..2 * tasks)
                .map(|a| if a % 2 == 0 { 1.0 } else { -1.0 })
                .collect(),
        )
    }

    pub fn matrix(&self) -> Array2<f64> {
        Array2::from_shape_vec((self.rows, self.cols), self.scores.clone()).expect("consistent")
    }

    /// First column; the whole assignment in the binary case.
    pub fn vector(&self) -> Array1<f64> {
        self.matrix().column(0).to_owned()
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn is_binary(&self) -> bool {
        self.cols == 1
    }

    pub fn expand(&self, layout: &TaskLayout) -> Result<Array2<f64>, DataError> {
        expand_labels(layout, &self.matrix())
    }
}

/// Per-sample labels `y = Jỹ`, one row per training column.
pub fn expand_labels(layout: &TaskLayout, scores: &Array2<f64>) -> Result<Array2<f64>, DataError> {
    if scores.nrows() != layout.blocks() {
        return Err(DataError::Shape(format!(
            "label matrix has {} rows, layout has {} blocks",
            scores.nrows(),
            layout.blocks()
        )));
    }
    let mut y = Array2::zeros((layout.n(), scores.ncols()));
    for a in 0..layout.blocks() {
        let row = scores.row(a);
        for i in layout.block_range(a) {
            y.row_mut(i).assign(&row);
        }
    }
    Ok(y)
}

/// `X y = (XJ) ỹ` for a binary assignment, computed from block sums.
pub fn project_labels(
    x: &TaskDataset,
    scores: ArrayView1<'_, f64>,
) -> Result<Array1<f64>, DataError> {
    if scores.len() != x.layout().blocks() {
        return Err(DataError::Shape(format!(
            "{} label scores for {} blocks",
            scores.len(),
            x.layout().blocks()
        )));
    }
    Ok(x.block_sums().dot(&scores))
}

/// Source column (in `x`) of every column of the one-vs-all view for class
/// `target` (zero-based).
pub fn one_vs_all_columns(layout: &TaskLayout, target: usize) -> Result<Vec<usize>, DataError> {
    if target >= layout.classes() {
        return Err(DataError::OutOfRange(format!(
            "class {} (layout has {})",
            target + 1,
            layout.classes()
        )));
    }
    let mut cols = Vec::with_capacity(layout.n());
    for t in 0..layout.tasks() {
        cols.extend(layout.block_range(layout.block(t, target)));
        for j in (0..layout.classes()).filter(|&j| j != target) {
            cols.extend(layout.block_range(layout.block(t, j)));
        }
    }
    Ok(cols)
}

/// Regroups every task into "class `target`" versus "all other classes".
pub fn one_vs_all_view(x: &TaskDataset, target: usize) -> Result<TaskDataset, DataError> {
    let layout = x.layout();
    if layout.classes() < 2 {
        return Err(DataError::InvalidLayout(
            "one-vs-all needs at least two classes".into(),
        ));
    }
    let cols = one_vs_all_columns(layout, target)?;
    let counts = layout
        .counts_by_task()
        .into_iter()
        .map(|row| {
            let own = row[target];
            vec![own, row.iter().sum::<usize>() - own]
        })
        .collect();
    let view_layout = TaskLayout::new(counts, layout.dim())?;
    TaskDataset::new(view_layout, x.samples().select(Axis(1), &cols))
}
