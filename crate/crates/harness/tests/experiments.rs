use mtlspca::datamodel::{LabelAssignment, SyntheticConfig};
use mtlspca_harness::config::{config_hash, load_config};
use mtlspca_harness::experiments::{fig4_mixture, scaling_exponent};
use mtlspca_harness::{
    mean_and_stderr, monte_carlo_oracle, run_fig1, run_fig2, run_fig3_synth, run_fig4_synth,
    run_runtime_bench, stream_rng, ExperimentReport, Fig1Config, Fig2Config, Fig3Config,
    Fig4Config, HarnessError, OracleConfig, OracleProjector, RuntimeConfig,
};
use rand::Rng;

fn small_fig2() -> Fig2Config {
    Fig2Config {
        betas: vec![0.0, 0.5, 1.0],
        seeds: 2,
        test_per_class: 200,
        ..Fig2Config::default()
    }
}

fn without_timing(report: &ExperimentReport) -> ExperimentReport {
    let mut r = report.clone();
    r.rows.iter_mut().for_each(|row| row.seconds = 0.0);
    r
}

#[test]
fn fig1_theory_curve_values() {
    let report = run_fig1(&Fig1Config::default(), None).unwrap();
    let th = |m: &str, p: f64| report.point(m, p).unwrap().theory_error.unwrap();
    assert!((th("pca", 100.0) - 0.18286).abs() < 5e-5);
    assert!((th("spca", 100.0) - 0.17018).abs() < 5e-5);
    assert_eq!(th("pca", 1000.0), 0.5);
    assert!((th("spca", 1000.0) - 0.23975).abs() < 5e-5);
    for p in 1..=10 {
        let p = 100.0 * p as f64;
        assert!(
            th("spca", p) <= th("pca", p),
            "supervised projection dominates at p = {p}"
        );
    }
    assert!(report.rows.iter().all(|r| r.empirical_error.is_none()));
}

#[test]
fn fig2_theory_curve_values() {
    let cfg = Fig2Config::default();
    let report = run_fig2(&cfg, None).unwrap();
    let th = |m: &str, b: f64| report.point(m, b).unwrap().theory_error.unwrap();
    assert!((th("n-spca", 0.0) - 0.48059).abs() < 5e-5);
    assert!((th("mtl-spca", 4.0 / 9.0) - 0.22877).abs() < 5e-5);
    for &b in &cfg.betas {
        assert!(th("mtl-spca", b) <= th("st-spca", b) + 1e-12);
        assert!((th("st-spca", b) - 0.23975).abs() < 5e-5);
    }
}

#[test]
fn runs_are_bit_reproducible_and_theory_ignores_the_seed() {
    let cfg = small_fig2();
    let a = run_fig2(&cfg, Some(5)).unwrap();
    let b = run_fig2(&cfg, Some(5)).unwrap();
    let c = run_fig2(&cfg, Some(6)).unwrap();
    assert_eq!(without_timing(&a), without_timing(&b));
    assert_ne!(without_timing(&a).rows, without_timing(&c).rows);
    let theory = |r: &ExperimentReport| {
        r.rows
            .iter()
            .map(|row| row.theory_error)
            .collect::<Vec<_>>()
    };
    assert_eq!(theory(&a), theory(&c));
    assert_eq!(theory(&a), theory(&run_fig2(&cfg, None).unwrap()));
    assert_eq!(a.meta.seed, Some(5));
    assert_eq!(a.meta.config_hash, config_hash(&cfg));
}

#[test]
fn fig3_curves_are_nested_and_single_task_is_flat() {
    let cfg = Fig3Config {
        task_counts: vec![2, 4, 8],
        seeds: 2,
        test_samples: 1000,
        ..Fig3Config::default()
    };
    let report = run_fig3_synth(&cfg, 3).unwrap();
    let st = report.curve("st-spca");
    assert_eq!(st.len(), 3);
    assert!(st
        .iter()
        .all(|r| r.empirical_error == st[0].empirical_error));
    for m in ["mtl-spca", "n-spca", "mtl-spca-population"] {
        assert_eq!(report.curve(m).len(), 3);
    }
    assert_eq!(
        without_timing(&report),
        without_timing(&run_fig3_synth(&cfg, 3).unwrap())
    );
}

#[test]
fn fig4_mixture_matches_the_listed_means() {
    let cfg = Fig4Config::default();
    let spec = fig4_mixture(&cfg).unwrap();
    let layout = spec.layout();
    assert_eq!((layout.tasks(), layout.classes()), (3, 10));
    assert_eq!(layout.count(2, 0), 50);
    let m = spec.mean(layout.block(1, 3));
    assert!((m[3] - 0.8).abs() < 1e-15);
    assert!((m[cfg.dim - 4] - 2.0 * (1.0f64 - 0.16).sqrt()).abs() < 1e-15);
    assert!((m.dot(&m) - 4.0).abs() < 1e-12);

    let small = Fig4Config {
        seeds: 1,
        test_per_class: 50,
        ..cfg
    };
    let report = run_fig4_synth(&small, 1).unwrap();
    assert_eq!(report.methods(), vec!["mtl-spca", "st-spca"]);
}

#[test]
fn runtime_grows_with_dimension() {
    let cfg = RuntimeConfig {
        dims: vec![256, 1024, 2048],
        repeats: 2,
        beta: 0.5,
    };
    let report = run_runtime_bench(&cfg, 1).unwrap();
    let times: Vec<f64> = report.rows.iter().map(|r| r.seconds).collect();
    assert!(times.windows(2).all(|w| w[0] <= w[1]), "{times:?}");
    assert!(times[2] < 60.0);
    assert!(scaling_exponent(&report, "mtl-spca", 256.0, 2048.0).unwrap() > 1.0);
}

#[test]
fn invalid_configurations_are_input_errors() {
    let bad = Fig1Config {
        dims: vec![],
        ..Fig1Config::default()
    };
    assert!(matches!(
        run_fig1(&bad, Some(1)),
        Err(HarnessError::Input(_))
    ));
    let bad = Fig3Config {
        task_counts: vec![4, 2],
        ..Fig3Config::default()
    };
    assert_eq!(run_fig3_synth(&bad, 1).unwrap_err().exit_code(), 1);
    let bad = Fig4Config {
        per_class: vec![100, 100],
        ..Fig4Config::default()
    };
    assert!(run_fig4_synth(&bad, 1).is_err());
    let bad = RuntimeConfig {
        dims: vec![512, 256],
        ..RuntimeConfig::default()
    };
    assert!(run_runtime_bench(&bad, 1).is_err());
}

#[test]
fn configs_load_from_toml_with_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("c.toml");
    std::fs::write(&path, "seeds = 3\nbetas = [0.0, 1.0]\n").unwrap();
    let cfg: Fig2Config = load_config(Some(&path)).unwrap();
    assert_eq!(cfg.seeds, 3);
    assert_eq!(cfg.betas, vec![0.0, 1.0]);
    assert_eq!(cfg.dim, 100);

    std::fs::write(&path, "seedz = 3\n").unwrap();
    assert!(matches!(
        load_config::<Fig2Config>(Some(&path)),
        Err(HarnessError::Input(_))
    ));
    assert_eq!(
        load_config::<Fig1Config>(None).unwrap(),
        Fig1Config::default()
    );
    assert_ne!(config_hash(&Fig2Config::default()), config_hash(&cfg));
}

#[test]
fn streams_are_independent_and_repeatable() {
    let draw = |seed, stream| stream_rng(seed, stream).random::<u64>();
    assert_eq!(draw(1, 0), draw(1, 0));
    assert_ne!(draw(1, 0), draw(1, 1));
    assert_ne!(draw(1, 0), draw(2, 0));
}

#[test]
fn mean_and_stderr_examples() {
    let (m, se) = mean_and_stderr(&[1.0, 2.0, 3.0, 4.0]);
    assert_eq!(m, 2.5);
    assert!((se - (5.0f64 / 12.0).sqrt()).abs() < 1e-15);
    assert_eq!(mean_and_stderr(&[7.0]), (7.0, 0.0));
    let many: Vec<f64> = (0..1001).map(|i| i as f64).collect();
    assert_eq!(mean_and_stderr(&many).0, 500.0);
}

#[test]
fn oracle_checks_its_inputs_and_repeats() {
    let spec = SyntheticConfig::canonical(20, vec![1.0], 0)
        .mixture(&[[50, 50]])
        .unwrap();
    let labels = OracleProjector::Labels(LabelAssignment::plus_minus(1));
    let few = OracleConfig {
        training_sets: 2,
        draws_per_block: 100,
        antithetic: false,
    };
    assert!(matches!(
        monte_carlo_oracle(&spec, &labels, few, 1),
        Err(HarnessError::Input(_))
    ));
    let odd = OracleConfig {
        training_sets: 10,
        draws_per_block: 101,
        antithetic: true,
    };
    assert!(monte_carlo_oracle(&spec, &labels, odd, 1).is_err());
    let wrong = OracleProjector::Labels(LabelAssignment::plus_minus(2));
    let cfg = OracleConfig {
        training_sets: 10,
        draws_per_block: 100,
        antithetic: false,
    };
    assert!(monte_carlo_oracle(&spec, &wrong, cfg, 1).is_err());
    assert!(monte_carlo_oracle(&spec, &OracleProjector::Pca { components: 3 }, cfg, 1).is_err());

    let a = monte_carlo_oracle(&spec, &labels, cfg, 9).unwrap();
    assert_eq!(a, monte_carlo_oracle(&spec, &labels, cfg, 9).unwrap());
    assert_eq!(a.trials, 1000);
    // Class 1 sits at −e_1 with label +1, so the matched filter points
    // towards it.
    assert!(a.means[[0, 0]] > 0.0 && a.means[[1, 0]] < 0.0);
}

#[test]
fn antithetic_means_are_training_set_averages() {
    let spec = SyntheticConfig::canonical(30, vec![1.0], 0)
        .mixture(&[[40, 40]])
        .unwrap();
    let cfg = OracleConfig {
        training_sets: 20,
        draws_per_block: 50,
        antithetic: true,
    };
    let law = monte_carlo_oracle(&spec, &OracleProjector::Pca { components: 2 }, cfg, 4).unwrap();
    // Both blocks see the same training sets: with the noise cancelled the
    // two means of a component are exact negatives.
    for i in 0..2 {
        assert!((law.means[[0, i]] + law.means[[1, i]]).abs() < 1e-12);
    }
    assert!(law.variances.iter().all(|&v| v > 0.5 && v < 1.5));
}
