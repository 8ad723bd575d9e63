//! Experiment configurations. Every field has a default, so an empty TOML
//! file (or no file) reproduces the reference setup; unknown keys are
//! rejected.

use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::{short_hash, HarnessError};

/// Two classes at `∓norm·e_1` with equal counts, swept over the dimension.
///
/// Keys: `dims`, `per_class`, `test_per_class`, `seeds`, `norm`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Fig1Config {
    pub dims: Vec<usize>,
    pub per_class: usize,
    pub test_per_class: usize,
    pub seeds: usize,
    pub norm: f64,
}

impl Default for Fig1Config {
    fn default() -> Self {
        Self {
            dims: (1..=10).map(|i| 100 * i).collect(),
            per_class: 500,
            test_per_class: 500,
            seeds: 10,
            norm: 1.0,
        }
    }
}

/// Source task along `e_1`, target along `βe_1 + √(1−β²)e_p`, swept over β.
///
/// Keys: `dim`, `source_per_class`, `target_per_class`, `betas`,
/// `test_per_class`, `seeds`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Fig2Config {
    pub dim: usize,
    pub source_per_class: usize,
    pub target_per_class: usize,
    pub betas: Vec<f64>,
    pub test_per_class: usize,
    pub seeds: usize,
}

impl Default for Fig2Config {
    fn default() -> Self {
        Self {
            dim: 100,
            source_per_class: 1000,
            target_per_class: 50,
            betas: (0..10).map(|i| i as f64 / 9.0).collect(),
            test_per_class: 1000,
            seeds: 10,
        }
    }
}

/// Many small source tasks with relatedness drawn uniformly in `[0, 1]`,
/// swept over the number of tasks (target included).
///
/// Keys: `dim`, `target_per_class`, `other_per_class`, `task_counts`,
/// `test_samples`, `seeds`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Fig3Config {
    pub dim: usize,
    pub target_per_class: usize,
    pub other_per_class: usize,
    pub task_counts: Vec<usize>,
    pub test_samples: usize,
    pub seeds: usize,
}

impl Default for Fig3Config {
    fn default() -> Self {
        Self {
            dim: 200,
            target_per_class: 50,
            other_per_class: 5,
            task_counts: (1..=8).map(|i| 1 << i).collect(),
            test_samples: 10_000,
            seeds: 10,
        }
    }
}

/// Multi-class transfer: class `j` of task `t` has mean
/// `β_t·scale·e_j + √(1−β_t²)·scale·e_{p−j}`; the last task is the target.
///
/// Keys: `dim`, `classes`, `betas`, `per_class` (one count per task),
/// `scale`, `test_per_class`, `seeds`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Fig4Config {
    pub dim: usize,
    pub classes: usize,
    pub betas: Vec<f64>,
    pub per_class: Vec<usize>,
    pub scale: f64,
    pub test_per_class: usize,
    pub seeds: usize,
}

impl Default for Fig4Config {
    fn default() -> Self {
        Self {
            dim: 200,
            classes: 10,
            betas: vec![0.2, 0.4, 0.6],
            per_class: vec![100, 100, 50],
            scale: 2.0,
            test_per_class: 500,
            seeds: 10,
        }
    }
}

/// Fit-and-predict wall clock of the multi-task classifier with `n = 2p`
/// split evenly over two tasks of two classes.
///
/// Keys: `dims`, `repeats`, `beta`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RuntimeConfig {
    pub dims: Vec<usize>,
    pub repeats: usize,
    pub beta: f64,
}

impl Default for RuntimeConfig {
    fn default() -> Self {
        Self {
            dims: (4..=11).map(|i| 1 << i).collect(),
            repeats: 3,
            beta: 0.5,
        }
    }
}

/// Parses a configuration file; a missing path gives the defaults.
pub fn load_config<T: DeserializeOwned + Default>(path: Option<&Path>) -> Result<T, HarnessError> {
    match path {
        None => Ok(T::default()),
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .map_err(|e| HarnessError::Input(format!("{}: {e}", p.display())))?;
            toml::from_str(&text).map_err(|e| HarnessError::Input(format!("{}: {e}", p.display())))
        }
    }
}

/// Hash of the canonical TOML form of a configuration.
pub fn config_hash<T: Serialize>(config: &T) -> String {
    short_hash(&toml::to_string(config).unwrap_or_default())
}

pub(crate) fn require(cond: bool, message: &str) -> Result<(), HarnessError> {
    if cond {
        Ok(())
    } else {
        Err(HarnessError::Input(message.to_string()))
    }
}
