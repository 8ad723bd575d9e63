//! Datasets, the task/class layout, synthetic mixtures, per-task
//! standardization, label expansion and CSV ingestion.

mod csvio;
mod labels;
mod layout;
mod normalize;
mod synth;

use thiserror::Error;

pub use csvio::{load_csv, read_samples, save_csv, LabeledSamples};
pub use labels::{
    expand_labels, one_vs_all_columns, one_vs_all_view, project_labels, LabelAssignment,
};
pub use layout::{TaskDataset, TaskLayout};
pub use normalize::{zscore_per_task, ZScoreMap};
pub use synth::{
    column_mean, sample_gaussian, synth_gaussian, synth_gaussian_with, MixtureSpec, SyntheticConfig,
};

#[derive(Debug, Error)]
pub enum DataError {
    #[error("invalid layout: {0}")]
    InvalidLayout(String),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("non-finite sample values")]
    NonFinite,
    #[error("{0} is out of range")]
    OutOfRange(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("line {line}: {message}")]
    Parse { line: u64, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[cfg(test)]
mod tests;
