use ndarray::{array, Array2, Axis};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::*;

fn random_dataset(counts: Vec<Vec<usize>>, dim: usize, seed: u64) -> TaskDataset {
    let layout = TaskLayout::new(counts, dim).unwrap();
    let means = Array2::zeros((dim, layout.blocks()));
    synth_gaussian(&MixtureSpec::new(layout, means).unwrap(), seed)
}

#[test]
fn layout_rejects_tiny_classes() {
    assert!(matches!(
        TaskLayout::new(vec![vec![3, 1]], 4),
        Err(DataError::InvalidLayout(_))
    ));
    assert!(TaskLayout::new(vec![vec![3, 2], vec![2]], 4).is_err());
    assert!(TaskLayout::new(vec![], 4).is_err());
    assert!(TaskLayout::new(vec![vec![2, 2]], 0).is_err());
}

#[test]
fn layout_index_arithmetic() {
    let l = TaskLayout::new(vec![vec![2, 3, 4], vec![5, 6, 7]], 3).unwrap();
    assert_eq!(l.blocks(), 6);
    assert_eq!(l.n(), 27);
    assert_eq!(l.block(1, 2), 5);
    assert_eq!(l.block_range(4), 14..20);
    assert_eq!(l.task_range(1), 9..27);
    assert_eq!(l.locate(0), Some((0, 0)));
    assert_eq!(l.locate(9), Some((1, 0)));
    assert_eq!(l.locate(26), Some((1, 2)));
    assert_eq!(l.locate(27), None);
    assert!((l.proportions().iter().sum::<f64>() - 1.0).abs() < 1e-15);
}

#[test]
fn synth_is_deterministic_per_seed() {
    let a = random_dataset(vec![vec![4, 5]], 6, 11);
    let b = random_dataset(vec![vec![4, 5]], 6, 11);
    let c = random_dataset(vec![vec![4, 5]], 6, 12);
    assert_eq!(a, b);
    assert_ne!(a, c);
}

#[test]
fn synth_zero_means_average_out() {
    let x = random_dataset(vec![vec![20_000, 20_000]], 3, 5);
    for a in 0..2 {
        let m = column_mean(x.block(a));
        assert!(m.iter().all(|v| v.abs() < 0.03), "{m}");
    }
}

#[test]
fn synth_class_means_concentrate() {
    let p = 40;
    let mut means = Array2::zeros((p, 2));
    means[[0, 0]] = -2.0;
    means[[0, 1]] = 2.0;
    means[[5, 1]] = 1.0;
    let layout = TaskLayout::single_task(vec![60, 90], p).unwrap();
    let spec = MixtureSpec::new(layout.clone(), means.clone()).unwrap();
    for seed in 0..20 {
        let x = synth_gaussian(&spec, seed);
        for a in 0..2 {
            let diff = column_mean(x.block(a)) - means.column(a);
            let bound = 4.0 * (p as f64 / layout.block_counts()[a] as f64).sqrt();
            assert!(diff.dot(&diff).sqrt() < bound);
        }
    }
}

#[test]
fn full_relatedness_gives_equal_task_means() {
    let cfg = SyntheticConfig::canonical(10, vec![1.0, 1.0], 0);
    let spec = cfg.mixture(&[[3, 3], [4, 4]]).unwrap();
    assert_eq!(spec.mean(0), spec.mean(2));
    assert_eq!(spec.mean(1), spec.mean(3));
}

#[test]
fn synthetic_config_validation() {
    let mut cfg = SyntheticConfig::canonical(5, vec![0.5, 1.2], 0);
    assert!(matches!(cfg.validate(), Err(DataError::InvalidConfig(_))));
    cfg.betas = vec![0.5, 0.2];
    assert!(cfg.validate().is_ok());
    cfg.orthogonal[0] = 0.1;
    assert!(cfg.validate().is_err());
    let dir = SyntheticConfig::canonical(3, vec![0.6], 0).task_direction(0);
    assert!((dir[0] - 0.6).abs() < 1e-15 && (dir[2] - 0.8).abs() < 1e-15);
}

#[test]
fn zscore_moments_per_task() {
    let x = random_dataset(vec![vec![7, 9], vec![5, 4]], 5, 3);
    let shifted = x.samples().mapv(|v| 3.0 * v + 1.5);
    let x = TaskDataset::new(x.layout().clone(), shifted).unwrap();
    let (z, map) = zscore_per_task(&x);
    assert!(!map.has_warnings());
    for t in 0..2 {
        for row in z.task(t).axis_iter(Axis(0)) {
            let n = row.len() as f64;
            let mean = row.sum() / n;
            let var = row.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
            assert!(mean.abs() < 1e-12);
            assert!((var - 1.0).abs() < 1e-12);
        }
    }
    // The stored map reproduces the training transform.
    let again = map.apply_columns(1, x.task(1)).unwrap();
    assert!((&again - &z.task(1)).iter().all(|d| d.abs() < 1e-12));
}

#[test]
fn zscore_is_idempotent() {
    let x = random_dataset(vec![vec![6, 8]], 4, 9);
    let (z, _) = zscore_per_task(&x);
    let (zz, _) = zscore_per_task(&z);
    assert!((z.samples().to_owned() - zz.samples())
        .iter()
        .all(|d| d.abs() < 1e-12));
}

#[test]
fn zscore_constant_feature_is_flagged() {
    let layout = TaskLayout::single_task(vec![2, 2], 2).unwrap();
    let x = TaskDataset::new(layout, array![[1.0, 2.0, 3.0, 4.0], [7.0, 7.0, 7.0, 7.0]]).unwrap();
    let (z, map) = zscore_per_task(&x);
    assert!(map.has_warnings());
    assert_eq!(map.constant_features[0], vec![1]);
    assert!(z.samples().row(1).iter().all(|&v| v == 0.0));
}

#[test]
fn expand_labels_examples() {
    let layout = TaskLayout::single_task(vec![2, 2], 3).unwrap();
    let y = LabelAssignment::binary(array![1.0, -1.0])
        .expand(&layout)
        .unwrap();
    assert_eq!(y.column(0).to_vec(), vec![1.0, 1.0, -1.0, -1.0]);
    let zero = expand_labels(&layout, &Array2::zeros((2, 1))).unwrap();
    assert!(zero.iter().all(|&v| v == 0.0));
    assert!(matches!(
        expand_labels(&layout, &Array2::zeros((3, 1))),
        Err(DataError::Shape(_))
    ));
}

#[test]
fn expand_labels_block_audit() {
    let layout = TaskLayout::new(vec![vec![3, 2, 4], vec![2, 5, 2]], 2).unwrap();
    let scores = Array2::from_shape_fn((6, 3), |(a, j)| (a * 10 + j) as f64);
    let y = expand_labels(&layout, &scores).unwrap();
    for i in 0..layout.n() {
        let (t, j) = layout.locate(i).unwrap();
        assert_eq!(y.row(i), scores.row(layout.block(t, j)));
    }
}

#[test]
fn project_labels_matches_expanded_product() {
    let x = random_dataset(vec![vec![3, 4], vec![2, 5]], 6, 21);
    let scores = array![0.3, -1.0, 2.0, 0.5];
    let y = LabelAssignment::binary(scores.clone())
        .expand(x.layout())
        .unwrap();
    let direct = x.samples().dot(&y.column(0));
    let fast = project_labels(&x, scores.view()).unwrap();
    assert!((direct - fast).iter().all(|d| d.abs() < 1e-12));
}

#[test]
fn one_vs_all_examples() {
    let x = random_dataset(vec![vec![3, 4]], 2, 0);
    let same = one_vs_all_view(&x, 0).unwrap();
    assert_eq!(same, x);

    let x = random_dataset(vec![vec![10, 20, 30]], 2, 0);
    let v = one_vs_all_view(&x, 1).unwrap();
    assert_eq!(v.layout().counts_by_task(), vec![vec![20, 40]]);
    assert!(matches!(
        one_vs_all_view(&x, 3),
        Err(DataError::OutOfRange(_))
    ));
}

#[test]
fn one_vs_all_keeps_columns_and_task_ids() {
    let x = random_dataset(vec![vec![3, 4, 2], vec![5, 2, 3]], 3, 8);
    for target in 0..3 {
        let v = one_vs_all_view(&x, target).unwrap();
        let cols = one_vs_all_columns(x.layout(), target).unwrap();
        let mut sorted = cols.clone();
        sorted.sort_unstable();
        assert_eq!(sorted, (0..x.layout().n()).collect::<Vec<_>>());
        for (new, &old) in cols.iter().enumerate() {
            assert_eq!(v.samples().column(new), x.samples().column(old));
            let (t_new, j_new) = v.layout().locate(new).unwrap();
            let (t_old, j_old) = x.layout().locate(old).unwrap();
            assert_eq!(t_new, t_old);
            assert_eq!(j_new == 0, j_old == target);
        }
    }
}

#[test]
fn select_tasks_subsets() {
    let x = random_dataset(vec![vec![3, 4], vec![2, 5], vec![6, 2]], 2, 4);
    let s = x.select_tasks(&[2, 0]).unwrap();
    assert_eq!(s.layout().counts_by_task(), vec![vec![6, 2], vec![3, 4]]);
    assert_eq!(s.task(0), x.task(2));
    assert!(x.select_tasks(&[3]).is_err());
}

#[test]
fn csv_round_trip_is_exact() {
    let x = random_dataset(vec![vec![3, 4], vec![2, 5]], 5, 31);
    let scaled = x.samples().mapv(|v| v * 1e-7 + 1.0 / 3.0);
    let x = TaskDataset::new(x.layout().clone(), scaled).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("data.csv");
    save_csv(&x, &path).unwrap();
    assert_eq!(load_csv(&path).unwrap(), x);
}

#[test]
fn csv_rows_may_come_in_any_order() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("d.csv");
    std::fs::write(
        &path,
        "task,class,f0,f1\n1,2,5,6\n1,1,1,2\n1,2,7,8\n1,1,3,4\n",
    )
    .unwrap();
    let x = load_csv(&path).unwrap();
    assert_eq!(x.layout().counts_by_task(), vec![vec![2, 2]]);
    assert_eq!(
        x.samples(),
        array![[1.0, 3.0, 5.0, 7.0], [2.0, 4.0, 6.0, 8.0]]
    );
}

#[test]
fn csv_errors_carry_line_numbers() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        ("task,class,f0\n1,1,0.5\n1,1,abc\n", 3),
        ("task,class,f0\n1,1,0.5\n0,1,1\n", 3),
        ("task,class,f0,f1\n1,1,0.5,1\n1,2,1\n", 3),
        ("task,label,f0\n1,1,1\n", 1),
        ("task,class,f0\n1,1,0.5\n1,1,NaN\n", 3),
    ];
    for (i, (text, line)) in cases.iter().enumerate() {
        let path = dir.path().join(format!("bad{i}.csv"));
        std::fs::write(&path, text).unwrap();
        match read_samples(&path) {
            Err(DataError::Parse { line: got, .. }) => assert_eq!(got, *line, "case {i}"),
            other => panic!("case {i}: {other:?}"),
        }
    }
}

proptest! {
    #[test]
    fn one_vs_all_counts_are_preserved(
        counts in prop::collection::vec(prop::collection::vec(2usize..6, 3), 1..4),
        target in 0usize..3,
    ) {
        let layout = TaskLayout::new(counts.clone(), 2).unwrap();
        let x = TaskDataset::new(layout.clone(), Array2::zeros((2, layout.n()))).unwrap();
        let v = one_vs_all_view(&x, target).unwrap();
        for (t, row) in counts.iter().enumerate() {
            prop_assert_eq!(v.layout().count(t, 0), row[target]);
            prop_assert_eq!(v.layout().task_size(t), row.iter().sum::<usize>());
        }
    }

    #[test]
    fn synth_seed_determinism(seed in any::<u64>()) {
        let layout = TaskLayout::single_task(vec![2, 3], 3).unwrap();
        let spec = MixtureSpec::new(layout, Array2::ones((3, 2))).unwrap();
        let mut r1 = ChaCha8Rng::seed_from_u64(seed);
        let mut r2 = ChaCha8Rng::seed_from_u64(seed);
        prop_assert_eq!(synth_gaussian_with(&spec, &mut r1), synth_gaussian_with(&spec, &mut r2));
    }
}
