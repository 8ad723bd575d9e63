//! Monte-Carlo estimate of the projected-score law: train on fresh draws of
//! a mixture, project fresh points of every block, and collect the score
//! moments.

use mtlspca::datamodel::{
    project_labels, sample_gaussian, synth_gaussian_with, LabelAssignment, MixtureSpec,
};
use mtlspca::estimator::SufficientStats;
use mtlspca::smalldense::{sym_eig, top_subspace};
use ndarray::{Array1, Array2};

use crate::{mean_and_stderr, stream_rng, HarnessError};

/// Which projection the oracle trains.
#[derive(Debug, Clone, PartialEq)]
pub enum OracleProjector {
    /// Matched filter `Xy/‖Xy‖` with one label score per block.
    Labels(LabelAssignment),
    /// Top `components` eigenvectors of `XXᵀ`. Each is signed to agree with
    /// the matching population spike direction, the convention of the
    /// theoretical PCA law.
    Pca { components: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleConfig {
    /// Independent training sets.
    pub training_sets: usize,
    /// Test points drawn per block for each training set.
    pub draws_per_block: usize,
    /// Draw test noise in `±z` pairs (needs an even `draws_per_block`).
    /// The noise then cancels exactly in the score means, leaving only the
    /// spread across training sets.
    pub antithetic: bool,
}

impl OracleConfig {
    pub fn trials(&self) -> usize {
        self.training_sets * self.draws_per_block
    }
}

/// Empirical moments of the projected scores, `blocks x components`.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalLaw {
    pub means: Array2<f64>,
    pub variances: Array2<f64>,
    /// Standard error of each mean, from the spread of the per-training-set
    /// means (valid with or without antithetic draws).
    pub mean_stderr: Array2<f64>,
    /// Scores collected per block.
    pub trials: usize,
}

/// Runs `cfg.training_sets` independent fits; training set `i` draws from
/// stream `i` of `seed`.
pub fn monte_carlo_oracle(
    spec: &MixtureSpec,
    projector: &OracleProjector,
    cfg: OracleConfig,
    seed: u64,
) -> Result<EmpiricalLaw, HarnessError> {
    if cfg.trials() < 1000 {
        return Err(HarnessError::Input(format!(
            "the oracle needs at least 1000 scores per block, got {}",
            cfg.trials()
        )));
    }
    if cfg.antithetic && !cfg.draws_per_block.is_multiple_of(2) {
        return Err(HarnessError::Input(
            "antithetic draws need an even draws_per_block".into(),
        ));
    }
    if cfg.training_sets < 2 {
        return Err(HarnessError::Input(
            "the oracle needs at least two training sets".into(),
        ));
    }
    let layout = spec.layout();
    let blocks = layout.blocks();
    let components = match projector {
        OracleProjector::Labels(labels) => {
            if !labels.is_binary() || labels.rows() != blocks {
                return Err(HarnessError::Input(format!(
                    "need one label score for each of the {blocks} blocks"
                )));
            }
            1
        }
        OracleProjector::Pca { components } => {
            if *components == 0 || *components > blocks {
                return Err(HarnessError::Input(format!(
                    "components must lie in 1..={blocks}"
                )));
            }
            *components
        }
    };
    let reference = match projector {
        OracleProjector::Pca { components } => Some(spike_directions(spec, *components)?),
        OracleProjector::Labels(_) => None,
    };

    let mut scores = vec![vec![Vec::with_capacity(cfg.trials()); components]; blocks];
    let mut set_means = vec![vec![Vec::with_capacity(cfg.training_sets); components]; blocks];
    for set in 0..cfg.training_sets as u64 {
        let mut rng = stream_rng(seed, set);
        let x = synth_gaussian_with(spec, &mut rng);
        let w = match projector {
            OracleProjector::Labels(labels) => {
                let v = project_labels(&x, labels.vector().view())?;
                let norm = v.dot(&v).sqrt();
                if norm == 0.0 {
                    return Err(HarnessError::Numerical(
                        "training set gave a zero projection".into(),
                    ));
                }
                (v / norm).insert_axis(ndarray::Axis(1))
            }
            OracleProjector::Pca { components } => {
                let mut basis = top_subspace(x.samples(), *components)?.basis;
                let reference = reference.as_ref().expect("built for PCA");
                for (mut col, r) in basis.columns_mut().into_iter().zip(reference.columns()) {
                    if col.dot(&r) < 0.0 {
                        col.mapv_inplace(|v| -v);
                    }
                }
                basis
            }
        };
        for (a, (per_block, per_set)) in scores.iter_mut().zip(&mut set_means).enumerate() {
            let draws = if cfg.antithetic {
                let half = sample_gaussian(
                    Array1::zeros(spec.layout().dim()).view(),
                    cfg.draws_per_block / 2,
                    &mut rng,
                );
                let mut both = ndarray::concatenate![ndarray::Axis(1), half, -&half];
                both += &spec.mean(a).insert_axis(ndarray::Axis(1));
                both
            } else {
                sample_gaussian(spec.mean(a), cfg.draws_per_block, &mut rng)
            };
            let projected = w.t().dot(&draws);
            for (i, row) in projected.rows().into_iter().enumerate() {
                let values = row.to_vec();
                per_set[i].push(mean_and_stderr(&values).0);
                per_block[i].extend(values);
            }
        }
    }

    let mut means = Array2::zeros((blocks, components));
    let mut variances = Array2::zeros((blocks, components));
    let mut mean_stderr = Array2::zeros((blocks, components));
    for (a, per_block) in scores.iter().enumerate() {
        for (i, values) in per_block.iter().enumerate() {
            let (m, se) = mean_and_stderr(values);
            means[[a, i]] = m;
            variances[[a, i]] = se * se * values.len() as f64;
            mean_stderr[[a, i]] = mean_and_stderr(&set_means[a][i]).1;
        }
    }
    Ok(EmpiricalLaw {
        means,
        variances,
        mean_stderr,
        trials: cfg.trials(),
    })
}

/// `M D_c^{1/2} ū_i` for the top eigenvectors `ū_i` of the population `𝓜`.
fn spike_directions(spec: &MixtureSpec, components: usize) -> Result<Array2<f64>, HarnessError> {
    let stats = SufficientStats::from_population(spec.layout(), spec.gram())?;
    let eig = sym_eig(&stats.calm)?;
    let roots = Array1::from_iter(stats.proportions.iter().map(|c| c.sqrt()));
    let mut out = Array2::zeros((spec.layout().dim(), components));
    for i in 0..components {
        let weights = &eig.vectors.column(i) * &roots;
        out.column_mut(i).assign(&spec.means().dot(&weights));
    }
    Ok(out)
}
