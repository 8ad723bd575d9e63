#![allow(dead_code)]

use mtlspca::classify::{predict_classes, FittedModel};
use mtlspca::datamodel::{sample_gaussian, MixtureSpec, SyntheticConfig};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Fraction of misclassified fresh points of task `target`, `per_class`
/// points drawn from each class.
pub fn test_error(
    model: &FittedModel,
    spec: &MixtureSpec,
    target: usize,
    per_class: usize,
    seed: u64,
) -> f64 {
    let layout = spec.layout();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut wrong = 0;
    for j in 0..layout.classes() {
        let x = sample_gaussian(spec.mean(layout.block(target, j)), per_class, &mut rng);
        wrong += predict_classes(model, x.view())
            .unwrap()
            .iter()
            .filter(|&&c| c != j)
            .count();
    }
    wrong as f64 / (per_class * layout.classes()) as f64
}

/// Two classes at `∓e_1` in dimension `p`, 500 samples each.
pub fn balanced_pair(p: usize) -> MixtureSpec {
    SyntheticConfig::canonical(p, vec![1.0], 0)
        .mixture(&[[500, 500]])
        .unwrap()
}

/// Source task (1000 per class) and target task (50 per class) in p = 100.
pub fn transfer_pair(beta: f64) -> MixtureSpec {
    SyntheticConfig::canonical(100, vec![1.0, beta], 0)
        .mixture(&[[1000, 1000], [50, 50]])
        .unwrap()
}

pub fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

/// Two orthonormal directions spread evenly over all coordinates (`p` even).
/// Per-feature standardization barely changes data built on them.
pub fn dense_directions(p: usize) -> (ndarray::Array1<f64>, ndarray::Array1<f64>) {
    let s = 1.0 / (p as f64).sqrt();
    let u = ndarray::Array1::from_elem(p, s);
    let v = ndarray::Array1::from_shape_fn(p, |i| if i % 2 == 0 { s } else { -s });
    (u, v)
}

/// Three classes on a circle of radius `norms[j]` in the dense plane,
/// identical for `tasks` tasks with `counts` samples per class.
pub fn three_class_dense(
    p: usize,
    tasks: usize,
    counts: Vec<usize>,
    norms: [f64; 3],
) -> MixtureSpec {
    let layout = mtlspca::datamodel::TaskLayout::new(vec![counts; tasks], p).unwrap();
    let (u, v) = dense_directions(p);
    let mut means = ndarray::Array2::zeros((p, 3 * tasks));
    for t in 0..tasks {
        for (j, &norm) in norms.iter().enumerate() {
            let angle = 2.0 * std::f64::consts::PI * j as f64 / 3.0;
            means
                .column_mut(3 * t + j)
                .assign(&((&u * angle.cos() + &v * angle.sin()) * norm));
        }
    }
    MixtureSpec::new(layout, means).unwrap()
}

/// Two-task transfer pair along dense directions: source `∓u`, target
/// `∓(βu + √(1−β²)v)`.
pub fn dense_transfer_pair(p: usize, source: usize, target: usize, beta: f64) -> MixtureSpec {
    let layout =
        mtlspca::datamodel::TaskLayout::new(vec![vec![source; 2], vec![target; 2]], p).unwrap();
    let (u, v) = dense_directions(p);
    let t = &u * beta + &v * (1.0 - beta * beta).sqrt();
    let mut means = ndarray::Array2::zeros((p, 4));
    means.column_mut(0).assign(&(-&u));
    means.column_mut(1).assign(&u);
    means.column_mut(2).assign(&(-&t));
    means.column_mut(3).assign(&t);
    MixtureSpec::new(layout, means).unwrap()
}
