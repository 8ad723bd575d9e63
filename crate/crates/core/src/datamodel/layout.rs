use std::ops::Range;

use ndarray::{Array2, ArrayView2, Axis, ShapeBuilder};
use serde::{Deserialize, Serialize};

use super::DataError;

/// Partition of the training set into `k` tasks of `m` classes each.
///
/// Blocks are indexed task-major: block `a = t * m + j` holds class `j` of
/// task `t` (both zero-based), and samples are stored contiguously in that
/// order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TaskLayout {
    tasks: usize,
    classes: usize,
    counts: Vec<usize>,
    dim: usize,
}

impl TaskLayout {
    /// `counts[t][j]` samples for class `j` of task `t`, in dimension `dim`.
    pub fn new(counts: Vec<Vec<usize>>, dim: usize) -> Result<Self, DataError> {
        let tasks = counts.len();
        if tasks == 0 {
            return Err(DataError::InvalidLayout("no tasks".into()));
        }
        let classes = counts[0].len();
        if classes == 0 {
            return Err(DataError::InvalidLayout("no classes".into()));
        }
        if counts.iter().any(|row| row.len() != classes) {
            return Err(DataError::InvalidLayout(
                "every task must have the same number of classes".into(),
            ));
        }
        if dim == 0 {
            return Err(DataError::InvalidLayout(
                "dimension must be positive".into(),
            ));
        }
        for (t, row) in counts.iter().enumerate() {
            for (j, &c) in row.iter().enumerate() {
                if c < 2 {
                    return Err(DataError::InvalidLayout(format!(
                        "task {} class {} has {} samples; at least 2 are required",
                        t + 1,
                        j + 1,
                        c
                    )));
                }
            }
        }
        Ok(Self {
            tasks,
            classes,
            counts: counts.into_iter().flatten().collect(),
            dim,
        })
    }

    /// Single task with the given per-class counts.
    pub fn single_task(counts: Vec<usize>, dim: usize) -> Result<Self, DataError> {
        Self::new(vec![counts], dim)
    }

    pub fn tasks(&self) -> usize {
        self.tasks
    }

    pub fn classes(&self) -> usize {
        self.classes
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of (task, class) blocks, `m k`.
    pub fn blocks(&self) -> usize {
        self.counts.len()
    }

    pub fn block(&self, task: usize, class: usize) -> usize {
        task * self.classes + class
    }

    pub fn count(&self, task: usize, class: usize) -> usize {
        self.counts[self.block(task, class)]
    }

    pub fn block_counts(&self) -> &[usize] {
        &self.counts
    }

    pub fn counts_by_task(&self) -> Vec<Vec<usize>> {
        self.counts
            .chunks(self.classes)
            .map(|c| c.to_vec())
            .collect()
    }

    pub fn n(&self) -> usize {
        self.counts.iter().sum()
    }

    pub fn task_size(&self, task: usize) -> usize {
        self.task_range(task).len()
    }

    pub fn block_range(&self, block: usize) -> Range<usize> {
        let start: usize = self.counts[..block].iter().sum();
        start..start + self.counts[block]
    }

    pub fn task_range(&self, task: usize) -> Range<usize> {
        let first = self.block(task, 0);
        let start: usize = self.counts[..first].iter().sum();
        let len: usize = self.counts[first..first + self.classes].iter().sum();
        start..start + len
    }

    /// `(task, class)` owning column `col`.
    pub fn locate(&self, col: usize) -> Option<(usize, usize)> {
        let mut acc = 0;
        for (a, &c) in self.counts.iter().enumerate() {
            acc += c;
            if col < acc {
                return Some((a / self.classes, a % self.classes));
            }
        }
        None
    }

    /// Block proportions `n_tj / n`.
    pub fn proportions(&self) -> Vec<f64> {
        let n = self.n() as f64;
        self.counts.iter().map(|&c| c as f64 / n).collect()
    }

    /// Dimension-to-sample ratio `p / n`.
    pub fn ratio(&self) -> f64 {
        self.dim as f64 / self.n() as f64
    }
}

/// Training samples stored as a `p x n` column-major matrix, grouped by
/// block in layout order.
#[derive(Debug, Clone, PartialEq)]
pub struct TaskDataset {
    layout: TaskLayout,
    samples: Array2<f64>,
}

impl TaskDataset {
    pub fn new(layout: TaskLayout, samples: Array2<f64>) -> Result<Self, DataError> {
        let (p, n) = samples.dim();
        if p != layout.dim() || n != layout.n() {
            return Err(DataError::Shape(format!(
                "samples are {p} x {n}, layout expects {} x {}",
                layout.dim(),
                layout.n()
            )));
        }
        if samples.iter().any(|x| !x.is_finite()) {
            return Err(DataError::NonFinite);
        }
        Ok(Self {
            layout,
            samples: to_column_major(samples),
        })
    }

    /// Assembles a dataset from one `p x n_tj` matrix per block, in layout
    /// order.
    pub fn from_blocks(layout: TaskLayout, blocks: &[Array2<f64>]) -> Result<Self, DataError> {
        if blocks.len() != layout.blocks() {
            return Err(DataError::Shape(format!(
                "{} blocks given, layout has {}",
                blocks.len(),
                layout.blocks()
            )));
        }
        let p = layout.dim();
        let mut data = Vec::with_capacity(p * layout.n());
        for (a, block) in blocks.iter().enumerate() {
            if block.nrows() != p || block.ncols() != layout.block_counts()[a] {
                return Err(DataError::Shape(format!("block {a} has the wrong shape")));
            }
            for col in block.axis_iter(Axis(1)) {
                data.extend(col.iter());
            }
        }
        let samples = Array2::from_shape_vec((p, layout.n()).f(), data)
            .map_err(|e| DataError::Shape(e.to_string()))?;
        Self::new(layout, samples)
    }

    pub fn layout(&self) -> &TaskLayout {
        &self.layout
    }

    pub fn samples(&self) -> ArrayView2<'_, f64> {
        self.samples.view()
    }

    pub fn into_samples(self) -> Array2<f64> {
        self.samples
    }

    pub fn block(&self, block: usize) -> ArrayView2<'_, f64> {
        let r = self.layout.block_range(block);
        self.samples.slice(ndarray::s![.., r])
    }

    pub fn task(&self, task: usize) -> ArrayView2<'_, f64> {
        let r = self.layout.task_range(task);
        self.samples.slice(ndarray::s![.., r])
    }

    /// Column sums of every block, `p x mk` (equivalently `X J`).
    pub fn block_sums(&self) -> Array2<f64> {
        let p = self.layout.dim();
        let mut sums = Array2::zeros((p, self.layout.blocks()));
        for a in 0..self.layout.blocks() {
            let mut acc = sums.column_mut(a);
            for col in self.block(a).axis_iter(Axis(1)) {
                acc += &col;
            }
        }
        sums
    }

    /// Keeps only the listed tasks, in the given order.
    pub fn select_tasks(&self, tasks: &[usize]) -> Result<TaskDataset, DataError> {
        let all = self.layout.counts_by_task();
        let mut counts = Vec::with_capacity(tasks.len());
        let mut columns = Vec::new();
        for &t in tasks {
            if t >= self.layout.tasks() {
                return Err(DataError::OutOfRange(format!("task {}", t + 1)));
            }
            counts.push(all[t].clone());
            columns.extend(self.layout.task_range(t));
        }
        let layout = TaskLayout::new(counts, self.layout.dim())?;
        Self::new(layout, self.samples.select(Axis(1), &columns))
    }
}

pub(crate) fn to_column_major(a: Array2<f64>) -> Array2<f64> {
    if a.t().is_standard_layout() {
        return a;
    }
    let (p, n) = a.dim();
    let mut data = Vec::with_capacity(p * n);
    for col in a.axis_iter(Axis(1)) {
        data.extend(col.iter());
    }
    Array2::from_shape_vec((p, n).f(), data).expect("shape preserved")
}
