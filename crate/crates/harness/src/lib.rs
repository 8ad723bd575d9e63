//! Experiment reproduction and validation on top of `mtlspca`: synthetic
//! sweeps with theory and empirical curves, a runtime benchmark, a
//! Monte-Carlo check of the score laws, and CSV reports.

pub mod config;
pub mod experiments;
pub mod oracle;
pub mod report;

use mtlspca::classify::ClassifyError;
use mtlspca::datamodel::DataError;
use mtlspca::estimator::EstimateError;
use mtlspca::smalldense::LinalgError;
use mtlspca::theory::TheoryError;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};
use thiserror::Error;

pub use config::{Fig1Config, Fig2Config, Fig3Config, Fig4Config, RuntimeConfig};
pub use experiments::{run_fig1, run_fig2, run_fig3_synth, run_fig4_synth, run_runtime_bench};
pub use oracle::{monte_carlo_oracle, EmpiricalLaw, OracleConfig, OracleProjector};
pub use report::{load_report, save_report, ExperimentReport, ReportMeta, ReportRow};

#[derive(Debug, Error)]
pub enum HarnessError {
    /// Bad configuration, arguments or input files.
    #[error("input error: {0}")]
    Input(String),
    /// A report or result violates its own invariants.
    #[error("invalid result: {0}")]
    Invalid(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl HarnessError {
    /// Process exit code: 1 for input problems, 2 for numerical failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Numerical(_) | HarnessError::Invalid(_) => 2,
            HarnessError::Input(_) | HarnessError::Io(_) => 1,
        }
    }
}

impl From<DataError> for HarnessError {
    fn from(e: DataError) -> Self {
        HarnessError::Input(e.to_string())
    }
}

impl From<EstimateError> for HarnessError {
    fn from(e: EstimateError) -> Self {
        match e {
            EstimateError::TooFewSamples { .. } | EstimateError::Shape(_) => {
                HarnessError::Input(e.to_string())
            }
            EstimateError::Linalg(_) => HarnessError::Numerical(e.to_string()),
        }
    }
}

impl From<TheoryError> for HarnessError {
    fn from(e: TheoryError) -> Self {
        match e {
            TheoryError::Invalid(_) => HarnessError::Input(e.to_string()),
            _ => HarnessError::Numerical(e.to_string()),
        }
    }
}

impl From<LinalgError> for HarnessError {
    fn from(e: LinalgError) -> Self {
        match e {
            LinalgError::RankTooLarge { .. } | LinalgError::Shape(_) => {
                HarnessError::Input(e.to_string())
            }
            _ => HarnessError::Numerical(e.to_string()),
        }
    }
}

impl From<ClassifyError> for HarnessError {
    fn from(e: ClassifyError) -> Self {
        match e {
            ClassifyError::Data(e) => e.into(),
            ClassifyError::Estimate(e) => e.into(),
            ClassifyError::Theory(e) => e.into(),
            ClassifyError::Linalg(e) => e.into(),
            ClassifyError::Io(e) => e.into(),
            ClassifyError::Layout(_)
            | ClassifyError::Dimension { .. }
            | ClassifyError::Format(_) => HarnessError::Input(e.to_string()),
            ClassifyError::DegenerateDirection(_) | ClassifyError::DegenerateData(_) => {
                HarnessError::Numerical(e.to_string())
            }
        }
    }
}

/// Independent generator for `stream` under master `seed`.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// First 16 hex digits of the SHA-256 of `text`.
pub fn short_hash(text: &str) -> String {
    Sha256::digest(text.as_bytes())
        .iter()
        .take(8)
        .map(|b| format!("{b:02x}"))
        .collect()
}

/// Mean and standard error of the mean, summed pairwise so the result does
/// not depend on how the values were produced.
pub fn mean_and_stderr(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = pairwise_sum(values) / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let sq: Vec<f64> = values.iter().map(|v| (v - mean).powi(2)).collect();
    (mean, (pairwise_sum(&sq) / (n - 1.0) / n).sqrt())
}

fn pairwise_sum(v: &[f64]) -> f64 {
    if v.len() <= 8 {
        return v.iter().sum();
    }
    let (a, b) = v.split_at(v.len() / 2);
    pairwise_sum(a) + pairwise_sum(b)
}
