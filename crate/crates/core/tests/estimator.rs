use mtlspca::datamodel::{synth_gaussian, MixtureSpec, SyntheticConfig, TaskDataset, TaskLayout};
use mtlspca::estimator::{
    build_stats, estimate_gram, estimate_gram_with, estimate_proportions, SplitRule,
    SufficientStats,
};
use mtlspca::smalldense::sym_eig;
use ndarray::{array, Array2, Axis};
use proptest::prelude::*;

fn two_class(p: usize, n_per_class: usize) -> MixtureSpec {
    SyntheticConfig::canonical(p, vec![1.0], 0)
        .mixture(&[[n_per_class, n_per_class]])
        .unwrap()
}

#[test]
fn proportion_examples() {
    let (c, c0) = estimate_proportions(&TaskLayout::single_task(vec![500, 500], 100).unwrap());
    assert_eq!(c, vec![0.5, 0.5]);
    assert!((c0 - 0.1).abs() < 1e-15);

    let (c, _) = estimate_proportions(&TaskLayout::single_task(vec![7], 3).unwrap());
    assert_eq!(c, vec![1.0]);

    let layout = TaskLayout::new(vec![vec![1000, 1000], vec![50, 50]], 100).unwrap();
    let (c, c0) = estimate_proportions(&layout);
    assert!((c0 - 100.0 / 2100.0).abs() < 1e-15);
    assert!((c.iter().sum::<f64>() - 1.0).abs() < 1e-15);
}

#[test]
fn noiseless_data_gives_exact_gram() {
    let layout = TaskLayout::new(vec![vec![3, 4], vec![5, 2]], 3).unwrap();
    let means = array![
        [1.0, -2.0, 0.5, 0.0],
        [0.0, 1.0, 3.0, -1.0],
        [2.0, 0.0, 1.0, 4.0]
    ];
    let mut blocks = Vec::new();
    for (a, &count) in layout.block_counts().iter().enumerate() {
        let col = means.column(a).insert_axis(Axis(1));
        blocks.push(ndarray::concatenate(Axis(1), &vec![col; count]).unwrap());
    }
    let x = TaskDataset::from_blocks(layout, &blocks).unwrap();
    let expected = means.t().dot(&means);
    let got = estimate_gram(&x).unwrap();
    assert!((&got - &expected).iter().all(|d| d.abs() < 1e-12), "{got}");
}

#[test]
fn cross_entry_on_two_class_setup() {
    let spec = two_class(100, 500);
    for seed in 0..20 {
        let g = estimate_gram(&synth_gaussian(&spec, seed)).unwrap();
        assert!((g[[0, 1]] + 1.0).abs() < 0.15, "seed {seed}: {}", g[[0, 1]]);
    }
}

fn rms_error(p: usize, n_per_class: usize, seeds: u64) -> f64 {
    let spec = two_class(p, n_per_class);
    let truth = spec.gram();
    let mut total = 0.0;
    for seed in 0..seeds {
        let g = estimate_gram(&synth_gaussian(&spec, 1000 + seed)).unwrap();
        total += (&g - &truth).mapv(|d| d * d).sum();
    }
    (total / (seeds as f64 * truth.len() as f64)).sqrt()
}

#[test]
fn rms_error_halves_when_n_quadruples() {
    let small = rms_error(200, 500, 30);
    let large = rms_error(200, 2000, 30);
    let ratio = small / large;
    assert!(large < 0.1, "rms {large}");
    assert!((ratio / 2.0) < 1.5 && (2.0 / ratio) < 1.5, "ratio {ratio}");
}

#[test]
fn population_statistics_of_two_class_setup() {
    let spec = two_class(100, 500);
    let stats = SufficientStats::from_population(spec.layout(), spec.gram()).unwrap();
    let expected = array![[5.0, -5.0], [-5.0, 5.0]];
    assert!((stats.calm.as_array() - &expected)
        .iter()
        .all(|d| d.abs() < 1e-12));
    let eig = sym_eig(&stats.calm).unwrap();
    assert!((eig.values[0] - 10.0).abs() < 1e-12 && eig.values[1].abs() < 1e-12);
    assert_eq!(stats.clipped, 0.0);
}

#[test]
fn zero_mean_data_has_small_statistics() {
    let layout = TaskLayout::single_task(vec![2000, 2000], 50).unwrap();
    let spec = MixtureSpec::new(layout, Array2::zeros((50, 2))).unwrap();
    let stats = build_stats(&synth_gaussian(&spec, 4)).unwrap();
    assert!(
        stats.calm.as_array().iter().all(|v| v.abs() < 0.2),
        "{:?}",
        stats.calm
    );
}

#[test]
fn off_diagonal_invariant_to_within_class_permutation() {
    let spec = two_class(20, 9);
    let x = synth_gaussian(&spec, 2);
    let mut cols: Vec<usize> = (0..18).collect();
    cols[..9].reverse();
    cols[9..].rotate_left(4);
    let permuted =
        TaskDataset::new(x.layout().clone(), x.samples().select(Axis(1), &cols)).unwrap();
    let g1 = estimate_gram(&x).unwrap();
    let g2 = estimate_gram(&permuted).unwrap();
    assert!((g1[[0, 1]] - g2[[0, 1]]).abs() < 1e-12);
}

#[test]
fn shuffled_split_changes_only_the_diagonal() {
    let x = synth_gaussian(&two_class(20, 9), 3);
    let a = estimate_gram_with(&x, SplitRule::Positional).unwrap();
    let b = estimate_gram_with(&x, SplitRule::Shuffled(7)).unwrap();
    let c = estimate_gram_with(&x, SplitRule::Shuffled(7)).unwrap();
    assert_eq!(b, c);
    assert_eq!(a[[0, 1]], b[[0, 1]]);
    assert_ne!(a[[0, 0]], b[[0, 0]]);
}

#[test]
fn odd_counts_stay_unbiased() {
    // Pure noise: the diagonal must average to zero even with odd class sizes.
    let layout = TaskLayout::single_task(vec![5, 7], 10).unwrap();
    let spec = MixtureSpec::new(layout, Array2::zeros((10, 2))).unwrap();
    let mut mean = 0.0;
    let trials = 4000;
    for seed in 0..trials {
        mean += estimate_gram(&synth_gaussian(&spec, seed)).unwrap()[[0, 0]];
    }
    mean /= trials as f64;
    // Standard deviation of one draw is sqrt(p)/h = sqrt(10)/2.
    assert!(
        mean.abs() < 4.0 * 10f64.sqrt() / 2.0 / (trials as f64).sqrt(),
        "{mean}"
    );
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]
    #[test]
    fn statistics_are_always_psd_and_finite(seed in any::<u64>(), n1 in 2usize..8, n2 in 2usize..8, p in 1usize..12) {
        let layout = TaskLayout::new(vec![vec![n1, n2], vec![n2, n1]], p).unwrap();
        let spec = MixtureSpec::new(layout, Array2::from_elem((p, 4), 0.3)).unwrap();
        let stats = build_stats(&synth_gaussian(&spec, seed)).unwrap();
        prop_assert!((stats.proportions.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        let eig = sym_eig(&stats.calm).unwrap();
        let scale = eig.values[0].abs().max(1.0);
        prop_assert!(eig.values.iter().all(|&l| l >= -1e-10 * scale));
        prop_assert!(stats.calm.as_array().iter().all(|v| v.is_finite()));
    }
}
