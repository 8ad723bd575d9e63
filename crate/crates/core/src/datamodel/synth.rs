use ndarray::{Array1, Array2, ArrayView1, Axis, ShapeBuilder};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::{DataError, TaskDataset, TaskLayout};

/// Isotropic Gaussian mixture: block `a` is `N(means[:, a], I_p)`.
#[derive(Debug, Clone, PartialEq)]
pub struct MixtureSpec {
    layout: TaskLayout,
    means: Array2<f64>,
}

impl MixtureSpec {
    /// `means` is `p x mk`, one column per block in layout order.
    pub fn new(layout: TaskLayout, means: Array2<f64>) -> Result<Self, DataError> {
        if means.dim() != (layout.dim(), layout.blocks()) {
            return Err(DataError::Shape(format!(
                "means are {:?}, layout expects {} x {}",
                means.dim(),
                layout.dim(),
                layout.blocks()
            )));
        }
        if means.iter().any(|x| !x.is_finite()) {
            return Err(DataError::NonFinite);
        }
        Ok(Self { layout, means })
    }

    pub fn layout(&self) -> &TaskLayout {
        &self.layout
    }

    pub fn means(&self) -> &Array2<f64> {
        &self.means
    }

    pub fn mean(&self, block: usize) -> ArrayView1<'_, f64> {
        self.means.column(block)
    }

    /// Population `MᵀM`.
    pub fn gram(&self) -> Array2<f64> {
        self.means.t().dot(&self.means)
    }

    /// Same means, different sample counts.
    pub fn with_layout(&self, layout: TaskLayout) -> Result<Self, DataError> {
        Self::new(layout, self.means.clone())
    }
}

/// Draws a dataset from `spec`, deterministically for a given seed.
pub fn synth_gaussian(spec: &MixtureSpec, seed: u64) -> TaskDataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    synth_gaussian_with(spec, &mut rng)
}

/// Draws a dataset from `spec` using the caller's generator. Standard
/// normals come from the ziggurat sampler of `rand_distr`.
pub fn synth_gaussian_with<R: Rng + ?Sized>(spec: &MixtureSpec, rng: &mut R) -> TaskDataset {
    let layout = spec.layout.clone();
    let p = layout.dim();
    let mut data = Vec::with_capacity(p * layout.n());
    for (a, &count) in layout.block_counts().iter().enumerate() {
        let mean = spec.means.column(a);
        for _ in 0..count {
            data.extend(mean.iter().map(|&m| {
                m + {
                    let z: f64 = StandardNormal.sample(rng);
                    z
                }
            }));
        }
    }
    let samples = Array2::from_shape_vec((p, layout.n()).f(), data).expect("sized above");
    TaskDataset::new(layout, samples).expect("finite by construction")
}

/// `count` draws of `N(mean, I)` as a `p x count` column-major matrix.
pub fn sample_gaussian<R: Rng + ?Sized>(
    mean: ArrayView1<'_, f64>,
    count: usize,
    rng: &mut R,
) -> Array2<f64> {
    let p = mean.len();
    let mut data = Vec::with_capacity(p * count);
    for _ in 0..count {
        data.extend(mean.iter().map(|&m| {
            m + {
                let z: f64 = StandardNormal.sample(rng);
                z
            }
        }));
    }
    Array2::from_shape_vec((p, count).f(), data).expect("sized above")
}

/// Two-class transfer family: task `t` has mean direction
/// `β_t μ + sqrt(1 - β_t²) μ⊥`, class 1 is centred at minus that direction
/// and class 2 at plus it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticConfig {
    pub base: Vec<f64>,
    pub orthogonal: Vec<f64>,
    pub betas: Vec<f64>,
    pub seed: u64,
}

impl SyntheticConfig {
    /// `μ = e_1`, `μ⊥ = e_p`.
    pub fn canonical(dim: usize, betas: Vec<f64>, seed: u64) -> Self {
        let mut base = vec![0.0; dim];
        let mut orthogonal = vec![0.0; dim];
        base[0] = 1.0;
        orthogonal[dim - 1] = 1.0;
        Self {
            base,
            orthogonal,
            betas,
            seed,
        }
    }

    pub fn validate(&self) -> Result<(), DataError> {
        if self.base.len() != self.orthogonal.len() || self.base.is_empty() {
            return Err(DataError::Shape(
                "μ and μ⊥ must share a positive dimension".into(),
            ));
        }
        let dot: f64 = self
            .base
            .iter()
            .zip(&self.orthogonal)
            .map(|(a, b)| a * b)
            .sum();
        if dot.abs() > 1e-10 {
            return Err(DataError::InvalidConfig(format!(
                "μᵀμ⊥ = {dot:e} is not zero"
            )));
        }
        if let Some(b) = self.betas.iter().find(|b| !(0.0..=1.0).contains(*b)) {
            return Err(DataError::InvalidConfig(format!(
                "relatedness {b} outside [0, 1]"
            )));
        }
        Ok(())
    }

    pub fn task_direction(&self, task: usize) -> Array1<f64> {
        let beta = self.betas[task];
        let ortho = (1.0 - beta * beta).max(0.0).sqrt();
        self.base
            .iter()
            .zip(&self.orthogonal)
            .map(|(&m, &o)| beta * m + ortho * o)
            .collect()
    }

    /// Mixture with `counts[t] = [n_t1, n_t2]`.
    pub fn mixture(&self, counts: &[[usize; 2]]) -> Result<MixtureSpec, DataError> {
        self.validate()?;
        if counts.len() != self.betas.len() {
            return Err(DataError::Shape(format!(
                "{} count pairs for {} tasks",
                counts.len(),
                self.betas.len()
            )));
        }
        let p = self.base.len();
        let layout = TaskLayout::new(counts.iter().map(|c| c.to_vec()).collect(), p)?;
        let mut means = Array2::zeros((p, 2 * counts.len()));
        for t in 0..counts.len() {
            let dir = self.task_direction(t);
            means.column_mut(2 * t).assign(&(-&dir));
            means.column_mut(2 * t + 1).assign(&dir);
        }
        MixtureSpec::new(layout, means)
    }
}

/// Column-wise mean of a `p x n` matrix.
pub fn column_mean(x: ndarray::ArrayView2<'_, f64>) -> Array1<f64> {
    x.mean_axis(Axis(1))
        .unwrap_or_else(|| Array1::zeros(x.nrows()))
}
