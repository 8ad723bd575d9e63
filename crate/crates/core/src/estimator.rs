//! Plug-in estimates of the class proportions and of the normalized Gram
//! matrix of the class means.

use ndarray::{Array1, Array2, Axis};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::datamodel::{TaskDataset, TaskLayout};
use crate::smalldense::{psd_clip, LinalgError, SymMatrix};

#[derive(Debug, Error)]
pub enum EstimateError {
    #[error("block {block} has {count} samples; the split-half estimate needs at least 2")]
    TooFewSamples { block: usize, count: usize },
    #[error("proportions and Gram matrix disagree: {0}")]
    Shape(String),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// How each class is cut in two for the diagonal of the Gram estimate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SplitRule {
    /// First `⌊n_a/2⌋` columns against the next `⌊n_a/2⌋`.
    #[default]
    Positional,
    /// Same sizes, after a per-class shuffle drawn from this seed.
    Shuffled(u64),
}

/// Everything the asymptotic formulas need about a dataset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SufficientStats {
    /// `ĉ_a = n_a / n`, one per block.
    pub proportions: Vec<f64>,
    /// `p / n`.
    pub c0: f64,
    /// Estimate of `MᵀM`.
    pub gram: Array2<f64>,
    /// `(1/c0) D_ĉ^{1/2} gram D_ĉ^{1/2}` with negative eigenvalues clipped.
    pub calm: SymMatrix,
    /// Total magnitude of the eigenvalues removed by clipping.
    pub clipped: f64,
}

impl SufficientStats {
    /// Statistics of a known mixture (no estimation noise).
    pub fn from_population(layout: &TaskLayout, gram: Array2<f64>) -> Result<Self, EstimateError> {
        let (c, c0) = estimate_proportions(layout);
        Self::from_gram(c, c0, gram)
    }

    /// Normalizes and clips a Gram matrix.
    pub fn from_gram(
        proportions: Vec<f64>,
        c0: f64,
        gram: Array2<f64>,
    ) -> Result<Self, EstimateError> {
        if gram.dim() != (proportions.len(), proportions.len()) {
            return Err(EstimateError::Shape(format!(
                "{} proportions for a {:?} Gram matrix",
                proportions.len(),
                gram.dim()
            )));
        }
        let sym = SymMatrix::new(gram.clone())?;
        let roots: Vec<f64> = proportions.iter().map(|c| c.sqrt()).collect();
        let raw = SymMatrix::symmetrize(sym.congruence_diag(&roots).into_inner() / c0);
        let (calm, clipped) = psd_clip(&raw)?;
        Ok(Self {
            proportions,
            c0,
            gram,
            calm,
            clipped,
        })
    }
}

/// `(ĉ, c0)` with `ĉ_a = n_a / n` and `c0 = p / n`.
pub fn estimate_proportions(layout: &TaskLayout) -> (Vec<f64>, f64) {
    (layout.proportions(), layout.ratio())
}

/// Estimate of `MᵀM` with the positional split.
pub fn estimate_gram(x: &TaskDataset) -> Result<Array2<f64>, EstimateError> {
    estimate_gram_with(x, SplitRule::Positional)
}

/// Estimate of `MᵀM`.
///
/// Off-diagonal entries are inner products of class sample means. A
/// diagonal entry is the inner product of the means of two disjoint halves
/// of the class, each of size `h = ⌊n_a/2⌋`, which removes the `p/n_a`
/// noise bias; an odd class leaves its last sample out of that entry.
pub fn estimate_gram_with(x: &TaskDataset, rule: SplitRule) -> Result<Array2<f64>, EstimateError> {
    Ok(gram_and_sums(x, rule)?.0)
}

/// The Gram estimate together with the block sums `XJ`, read in one pass
/// over the samples for the positional rule.
fn gram_and_sums(
    x: &TaskDataset,
    rule: SplitRule,
) -> Result<(Array2<f64>, Array2<f64>), EstimateError> {
    let layout = x.layout();
    let counts = layout.block_counts();
    if let Some((block, &count)) = counts.iter().enumerate().find(|(_, &c)| c < 2) {
        return Err(EstimateError::TooFewSamples { block, count });
    }

    let p = layout.dim();
    let mut sums = Array2::zeros((p, counts.len()));
    let mut diag = Array1::zeros(counts.len());
    let mut rng = match rule {
        SplitRule::Positional => None,
        SplitRule::Shuffled(seed) => Some(ChaCha8Rng::seed_from_u64(seed)),
    };
    for (a, &count) in counts.iter().enumerate() {
        let h = count / 2;
        let block = x.block(a);
        let mut order: Vec<usize> = (0..count).collect();
        if let Some(rng) = rng.as_mut() {
            order.shuffle(rng);
        }
        let first = half_sum(&block, &order[..h]);
        let second = half_sum(&block, &order[h..2 * h]);
        diag[a] = first.dot(&second) / (h * h) as f64;
        let mut total = first + second;
        for &c in &order[2 * h..] {
            total += &block.column(c);
        }
        sums.column_mut(a).assign(&total);
    }

    let mut means = sums.clone();
    for (mut col, &count) in means.axis_iter_mut(Axis(1)).zip(counts) {
        col /= count as f64;
    }
    let mut gram = means.t().dot(&means);
    for (a, &d) in diag.iter().enumerate() {
        gram[[a, a]] = d;
    }
    Ok((SymMatrix::symmetrize(gram).into_inner(), sums))
}

fn half_sum(block: &ndarray::ArrayView2<'_, f64>, cols: &[usize]) -> Array1<f64> {
    let mut acc = Array1::zeros(block.nrows());
    for &c in cols {
        acc += &block.column(c);
    }
    acc
}

/// Proportions, ratio, Gram estimate and the clipped normalized matrix.
pub fn build_stats(x: &TaskDataset) -> Result<SufficientStats, EstimateError> {
    build_stats_with(x, SplitRule::Positional)
}

pub fn build_stats_with(
    x: &TaskDataset,
    rule: SplitRule,
) -> Result<SufficientStats, EstimateError> {
    Ok(stats_and_sums(x, rule)?.0)
}

/// [`build_stats_with`] plus the block sums it read along the way.
pub(crate) fn stats_and_sums(
    x: &TaskDataset,
    rule: SplitRule,
) -> Result<(SufficientStats, Array2<f64>), EstimateError> {
    let (c, c0) = estimate_proportions(x.layout());
    let (gram, sums) = gram_and_sums(x, rule)?;
    Ok((SufficientStats::from_gram(c, c0, gram)?, sums))
}
