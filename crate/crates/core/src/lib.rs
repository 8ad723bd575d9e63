//! Supervised PCA for multi-task classification.
//!
//! The crate is split into the numerical kernels ([`smalldense`]), the data
//! layer ([`datamodel`]), plug-in estimation of the sufficient statistics
//! ([`estimator`]), the closed-form asymptotic predictions ([`theory`]) and
//! the trainable classifiers built on top of them ([`classify`]).

pub mod classify;
pub mod datamodel;
pub mod estimator;
pub mod smalldense;
pub mod theory;

pub use classify::{FittedModel, Prediction};
pub use datamodel::{LabelAssignment, MixtureSpec, TaskDataset, TaskLayout};
pub use estimator::SufficientStats;
pub use smalldense::{EigenDecomposition, SymMatrix};
pub use theory::ScoreLaw;
