//! Synthetic reproduction sweeps. Seed `s` of a sweep always draws from
//! stream `s` of the master seed, so every grid point sees the same noise
//! realizations and a rerun with the same seed is bit-identical.

use std::time::Instant;

use mtlspca::classify::{
    fit_algorithm1, fit_mtl_spca_binary, fit_naive_spca, fit_pca, fit_spca_binary, predict_classes,
    FittedModel,
};
use mtlspca::datamodel::{
    sample_gaussian, synth_gaussian_with, LabelAssignment, MixtureSpec, SyntheticConfig, TaskLayout,
};
use mtlspca::estimator::SufficientStats;
use mtlspca::theory::{
    mtl_score_law_binary, optimal_error, optimal_labels, pca_score_law, spca_score_law,
};
use ndarray::Array2;
use rand::Rng;

use crate::config::{
    config_hash, require, Fig1Config, Fig2Config, Fig3Config, Fig4Config, RuntimeConfig,
};
use crate::report::{ExperimentReport, ReportMeta, ReportRow};
use crate::{mean_and_stderr, stream_rng, HarnessError};

/// Misclassification rate on `per_class` fresh points of every class of
/// task `target`.
pub fn test_error<R: Rng + ?Sized>(
    model: &FittedModel,
    spec: &MixtureSpec,
    target: usize,
    per_class: usize,
    rng: &mut R,
) -> Result<f64, HarnessError> {
    let layout = spec.layout();
    let mut wrong = 0usize;
    for j in 0..layout.classes() {
        let x = sample_gaussian(spec.mean(layout.block(target, j)), per_class, rng);
        wrong += predict_classes(model, x.view())?
            .iter()
            .filter(|&&c| c != j)
            .count();
    }
    Ok(wrong as f64 / (per_class * layout.classes()) as f64)
}

/// Population statistics of a mixture.
pub fn population_stats(spec: &MixtureSpec) -> Result<SufficientStats, HarnessError> {
    Ok(SufficientStats::from_population(
        spec.layout(),
        spec.gram(),
    )?)
}

/// Error of a binary label assignment on `target` under the population law.
pub fn theory_binary_error(
    spec: &MixtureSpec,
    labels: &LabelAssignment,
    target: usize,
) -> Result<f64, HarnessError> {
    let s = population_stats(spec)?;
    Ok(mtl_score_law_binary(&s.calm, &s.proportions, s.c0, &labels.vector())?.binary_error(target))
}

/// Error of the error-minimizing labels on `target` under the population law.
pub fn theory_optimal_error(spec: &MixtureSpec, target: usize) -> Result<f64, HarnessError> {
    let s = population_stats(spec)?;
    Ok(optimal_error(&s.calm, &s.proportions, s.c0, target)?)
}

/// Per-method accumulator of seed errors and time.
struct Tally {
    errors: Vec<f64>,
    seconds: f64,
}

impl Tally {
    fn new() -> Self {
        Self {
            errors: Vec::new(),
            seconds: 0.0,
        }
    }

    /// Fits, evaluates and records one seed.
    fn run<R: Rng + ?Sized>(
        &mut self,
        fit: impl FnOnce() -> Result<FittedModel, HarnessError>,
        spec: &MixtureSpec,
        target: usize,
        per_class: usize,
        rng: &mut R,
    ) -> Result<(), HarnessError> {
        let start = Instant::now();
        let model = fit()?;
        self.seconds += start.elapsed().as_secs_f64();
        self.errors
            .push(test_error(&model, spec, target, per_class, rng)?);
        Ok(())
    }

    fn row(&self, sweep_value: f64, method: &str, theory: Option<f64>) -> ReportRow {
        let (mean, se) = mean_and_stderr(&self.errors);
        ReportRow {
            sweep_value,
            method: method.to_string(),
            theory_error: theory,
            empirical_error: Some(mean),
            stderr: Some(se),
            seconds: self.seconds,
        }
    }
}

fn meta<T: serde::Serialize>(
    experiment: &str,
    sweep: &str,
    seed: Option<u64>,
    seeds: usize,
    layout: String,
    config: &T,
) -> ReportMeta {
    ReportMeta {
        experiment: experiment.to_string(),
        sweep: sweep.to_string(),
        seed,
        seeds,
        layout,
        config_hash: config_hash(config),
    }
}

fn finish(report: ExperimentReport) -> Result<ExperimentReport, HarnessError> {
    report.validate()?;
    Ok(report)
}

/// PCA against supervised PCA on one balanced two-class task, swept over
/// the dimension. `seed = None` computes the theory curves only.
pub fn run_fig1(cfg: &Fig1Config, seed: Option<u64>) -> Result<ExperimentReport, HarnessError> {
    require(
        !cfg.dims.is_empty() && cfg.dims.iter().all(|&p| p >= 1),
        "fig1: dims must be positive",
    )?;
    require(cfg.per_class >= 2, "fig1: per_class must be at least 2")?;
    require(
        cfg.norm.is_finite() && cfg.norm > 0.0,
        "fig1: norm must be positive",
    )?;
    require(
        seed.is_none() || (cfg.seeds >= 1 && cfg.test_per_class >= 1),
        "fig1: seeds and test_per_class must be positive",
    )?;

    let mut rows = Vec::new();
    for &p in &cfg.dims {
        let mut synth = SyntheticConfig::canonical(p, vec![1.0], 0);
        synth.base[0] = cfg.norm;
        synth.orthogonal[p - 1] = cfg.norm;
        let spec = synth.mixture(&[[cfg.per_class, cfg.per_class]])?;
        let s = population_stats(&spec)?;
        let pca_theory = pca_score_law(&s.calm, &s.proportions, s.c0, 1)?.binary_error(0);
        let spca_theory = spca_score_law(&s.calm, &s.proportions, s.c0)?.binary_error(0);

        let Some(seed) = seed else {
            rows.push(theory_row(p as f64, "pca", pca_theory));
            rows.push(theory_row(p as f64, "spca", spca_theory));
            continue;
        };
        let (mut pca, mut spca) = (Tally::new(), Tally::new());
        let labels = LabelAssignment::plus_minus(1).vector();
        for s in 0..cfg.seeds as u64 {
            let mut rng = stream_rng(seed, s);
            let x = synth_gaussian_with(&spec, &mut rng);
            let mut test_rng = stream_rng(seed, (1 << 32) | s);
            pca.run(
                || Ok(fit_pca(&x, 1)?.into()),
                &spec,
                0,
                cfg.test_per_class,
                &mut test_rng,
            )?;
            let mut test_rng = stream_rng(seed, (1 << 32) | s);
            spca.run(
                || Ok(fit_spca_binary(&x, &labels, 0)?.into()),
                &spec,
                0,
                cfg.test_per_class,
                &mut test_rng,
            )?;
        }
        rows.push(pca.row(p as f64, "pca", Some(pca_theory)));
        rows.push(spca.row(p as f64, "spca", Some(spca_theory)));
    }
    finish(ExperimentReport {
        meta: meta(
            "fig1",
            "dimension",
            seed,
            if seed.is_some() { cfg.seeds } else { 0 },
            format!("1 task, 2 classes x {}", cfg.per_class),
            cfg,
        ),
        rows,
    })
}

fn theory_row(sweep_value: f64, method: &str, theory: f64) -> ReportRow {
    ReportRow {
        sweep_value,
        method: method.to_string(),
        theory_error: Some(theory),
        empirical_error: None,
        stderr: None,
        seconds: 0.0,
    }
}

/// Two-task transfer swept over the relatedness `β` of the target (second)
/// task: single-task, naive multi-task and optimal-label multi-task SPCA.
pub fn run_fig2(cfg: &Fig2Config, seed: Option<u64>) -> Result<ExperimentReport, HarnessError> {
    require(cfg.dim >= 2, "fig2: dim must be at least 2")?;
    require(
        cfg.source_per_class >= 2 && cfg.target_per_class >= 2,
        "fig2: every class needs 2 samples",
    )?;
    require(!cfg.betas.is_empty(), "fig2: betas must not be empty")?;
    require(
        seed.is_none() || (cfg.seeds >= 1 && cfg.test_per_class >= 1),
        "fig2: seeds and test_per_class must be positive",
    )?;

    let counts = [[cfg.source_per_class; 2], [cfg.target_per_class; 2]];
    let single = SyntheticConfig::canonical(cfg.dim, vec![1.0], 0).mixture(&[counts[1]])?;
    let st_theory = theory_binary_error(&single, &LabelAssignment::plus_minus(1), 0)?;
    let mut rows = Vec::new();
    for &beta in &cfg.betas {
        let spec = SyntheticConfig::canonical(cfg.dim, vec![1.0, beta], 0).mixture(&counts)?;
        let target_spec =
            SyntheticConfig::canonical(cfg.dim, vec![beta], 0).mixture(&[counts[1]])?;
        let n_theory = theory_binary_error(&spec, &LabelAssignment::plus_minus(2), 1)?;
        let mtl_theory = theory_optimal_error(&spec, 1)?;

        let Some(seed) = seed else {
            rows.push(theory_row(beta, "st-spca", st_theory));
            rows.push(theory_row(beta, "n-spca", n_theory));
            rows.push(theory_row(beta, "mtl-spca", mtl_theory));
            continue;
        };
        let (mut st, mut naive, mut mtl) = (Tally::new(), Tally::new(), Tally::new());
        let single_labels = LabelAssignment::plus_minus(1).vector();
        for s in 0..cfg.seeds as u64 {
            let mut rng = stream_rng(seed, s);
            let x = synth_gaussian_with(&spec, &mut rng);
            let target_only = x.select_tasks(&[1])?;
            let test_stream = (1 << 32) | s;
            st.run(
                || Ok(fit_spca_binary(&target_only, &single_labels, 0)?.into()),
                &target_spec,
                0,
                cfg.test_per_class,
                &mut stream_rng(seed, test_stream),
            )?;
            naive.run(
                || Ok(fit_naive_spca(&x, 1)?.into()),
                &spec,
                1,
                cfg.test_per_class,
                &mut stream_rng(seed, test_stream),
            )?;
            mtl.run(
                || Ok(fit_mtl_spca_binary(&x, 1)?.into()),
                &spec,
                1,
                cfg.test_per_class,
                &mut stream_rng(seed, test_stream),
            )?;
        }
        rows.push(st.row(beta, "st-spca", Some(st_theory)));
        rows.push(naive.row(beta, "n-spca", Some(n_theory)));
        rows.push(mtl.row(beta, "mtl-spca", Some(mtl_theory)));
    }
    finish(ExperimentReport {
        meta: meta(
            "fig2",
            "beta",
            seed,
            if seed.is_some() { cfg.seeds } else { 0 },
            format!(
                "2 tasks, 2 classes, source {} / target {} per class",
                cfg.source_per_class, cfg.target_per_class
            ),
            cfg,
        ),
        rows,
    })
}

/// Error on the first task as more tasks with random relatedness are added.
/// Per seed one family of the largest size is drawn; smaller task counts
/// use its leading tasks, so the curves are nested.
///
/// Besides the three methods, the `mtl-spca-population` curve fits the
/// matched filter with the optimal labels of the true mixture statistics,
/// which isolates the cost of estimating them from few samples per class.
pub fn run_fig3_synth(cfg: &Fig3Config, seed: u64) -> Result<ExperimentReport, HarnessError> {
    require(cfg.dim >= 2, "fig3: dim must be at least 2")?;
    require(
        cfg.target_per_class >= 2 && cfg.other_per_class >= 2,
        "fig3: every class needs 2 samples",
    )?;
    require(
        !cfg.task_counts.is_empty()
            && cfg.task_counts.windows(2).all(|w| w[0] < w[1])
            && cfg.task_counts[0] >= 2,
        "fig3: task_counts must be increasing and start at 2 or more",
    )?;
    require(
        cfg.seeds >= 1 && cfg.test_samples >= 2,
        "fig3: seeds and test_samples must be positive",
    )?;

    let max_tasks = *cfg.task_counts.last().expect("checked non-empty");
    let test_per_class = cfg.test_samples / 2;
    let mut tallies: Vec<[Tally; 4]> = cfg
        .task_counts
        .iter()
        .map(|_| [Tally::new(), Tally::new(), Tally::new(), Tally::new()])
        .collect();
    for s in 0..cfg.seeds as u64 {
        let mut rng = stream_rng(seed, s);
        let betas: Vec<f64> = (0..max_tasks).map(|_| rng.random::<f64>()).collect();
        let mut counts = vec![[cfg.other_per_class; 2]; max_tasks];
        counts[0] = [cfg.target_per_class; 2];
        let spec = SyntheticConfig::canonical(cfg.dim, betas, 0).mixture(&counts)?;
        let x = synth_gaussian_with(&spec, &mut rng);
        let test_stream = (1 << 32) | s;

        let target_only = x.select_tasks(&[0])?;
        let labels = LabelAssignment::plus_minus(1).vector();
        let start = Instant::now();
        let st_model: FittedModel = fit_spca_binary(&target_only, &labels, 0)?.into();
        let st_seconds = start.elapsed().as_secs_f64();
        let st_error = test_error(
            &st_model,
            &spec,
            0,
            test_per_class,
            &mut stream_rng(seed, test_stream),
        )?;

        for (k, tally) in cfg.task_counts.iter().zip(&mut tallies) {
            let tasks: Vec<usize> = (0..*k).collect();
            let sub = x.select_tasks(&tasks)?;
            tally[0].run(
                || Ok(fit_mtl_spca_binary(&sub, 0)?.into()),
                &spec,
                0,
                test_per_class,
                &mut stream_rng(seed, test_stream),
            )?;
            tally[1].run(
                || Ok(fit_naive_spca(&sub, 0)?.into()),
                &spec,
                0,
                test_per_class,
                &mut stream_rng(seed, test_stream),
            )?;
            tally[2].errors.push(st_error);
            tally[2].seconds += st_seconds;
            let sub_spec = MixtureSpec::new(
                sub.layout().clone(),
                spec.means().slice(ndarray::s![.., ..2 * k]).to_owned(),
            )?;
            let truth = population_stats(&sub_spec)?;
            let labels = optimal_labels(&truth.calm, &truth.proportions, 0)?;
            tally[3].run(
                || Ok(fit_spca_binary(&sub, &labels, 0)?.into()),
                &spec,
                0,
                test_per_class,
                &mut stream_rng(seed, test_stream),
            )?;
        }
    }
    let mut rows = Vec::new();
    for (k, tally) in cfg.task_counts.iter().zip(&tallies) {
        let k = *k as f64;
        rows.push(tally[0].row(k, "mtl-spca", None));
        rows.push(tally[1].row(k, "n-spca", None));
        rows.push(tally[2].row(k, "st-spca", None));
        rows.push(tally[3].row(k, "mtl-spca-population", None));
    }
    finish(ExperimentReport {
        meta: meta(
            "fig3",
            "tasks",
            Some(seed),
            cfg.seeds,
            format!(
                "up to {max_tasks} tasks, 2 classes, target {} / others {} per class",
                cfg.target_per_class, cfg.other_per_class
            ),
            cfg,
        ),
        rows,
    })
}

/// Means of the multi-class transfer family in [`Fig4Config`].
pub fn fig4_mixture(cfg: &Fig4Config) -> Result<MixtureSpec, HarnessError> {
    require(
        cfg.betas.len() == cfg.per_class.len() && !cfg.betas.is_empty(),
        "fig4: one count per task",
    )?;
    require(
        cfg.classes >= 2 && 2 * cfg.classes <= cfg.dim,
        "fig4: need 2 <= classes <= dim / 2",
    )?;
    require(
        cfg.betas.iter().all(|b| (0.0..=1.0).contains(b)),
        "fig4: betas must lie in [0, 1]",
    )?;
    let tasks = cfg.betas.len();
    let layout = TaskLayout::new(
        cfg.per_class
            .iter()
            .map(|&n| vec![n; cfg.classes])
            .collect(),
        cfg.dim,
    )?;
    let mut means = Array2::zeros((cfg.dim, tasks * cfg.classes));
    for (t, &beta) in cfg.betas.iter().enumerate() {
        for j in 0..cfg.classes {
            let col = layout.block(t, j);
            means[[j, col]] = beta * cfg.scale;
            means[[cfg.dim - 1 - j, col]] = (1.0 - beta * beta).sqrt() * cfg.scale;
        }
    }
    Ok(MixtureSpec::new(layout, means)?)
}

/// Multi-class transfer on the last task: the one-vs-all multi-task
/// classifier on every task against the same classifier on the target only.
pub fn run_fig4_synth(cfg: &Fig4Config, seed: u64) -> Result<ExperimentReport, HarnessError> {
    require(
        cfg.seeds >= 1 && cfg.test_per_class >= 1,
        "fig4: seeds and test_per_class must be positive",
    )?;
    let spec = fig4_mixture(cfg)?;
    let target = cfg.betas.len() - 1;
    let target_spec = MixtureSpec::new(
        TaskLayout::new(vec![vec![cfg.per_class[target]; cfg.classes]], cfg.dim)?,
        spec.means()
            .slice(ndarray::s![.., target * cfg.classes..])
            .to_owned(),
    )?;
    let (mut multi, mut single) = (Tally::new(), Tally::new());
    for s in 0..cfg.seeds as u64 {
        let mut rng = stream_rng(seed, s);
        let x = synth_gaussian_with(&spec, &mut rng);
        let target_only = x.select_tasks(&[target])?;
        let test_stream = (1 << 32) | s;
        multi.run(
            || Ok(fit_algorithm1(&x, target)?.into()),
            &spec,
            target,
            cfg.test_per_class,
            &mut stream_rng(seed, test_stream),
        )?;
        single.run(
            || Ok(fit_algorithm1(&target_only, 0)?.into()),
            &target_spec,
            0,
            cfg.test_per_class,
            &mut stream_rng(seed, test_stream),
        )?;
    }
    let k = cfg.betas.len() as f64;
    finish(ExperimentReport {
        meta: meta(
            "fig4",
            "tasks",
            Some(seed),
            cfg.seeds,
            format!(
                "{} tasks, {} classes, per class {:?}",
                cfg.betas.len(),
                cfg.classes,
                cfg.per_class
            ),
            cfg,
        ),
        rows: vec![
            multi.row(k, "mtl-spca", None),
            single.row(k, "st-spca", None),
        ],
    })
}

/// Wall clock of fitting the two-task multi-task classifier on `n = 2p`
/// samples and classifying `n` fresh target points; the minimum over
/// repeats is reported.
pub fn run_runtime_bench(cfg: &RuntimeConfig, seed: u64) -> Result<ExperimentReport, HarnessError> {
    require(
        !cfg.dims.is_empty() && cfg.dims.windows(2).all(|w| w[0] < w[1]),
        "runtime: dims must be increasing",
    )?;
    require(cfg.dims[0] >= 4, "runtime: dims must be at least 4")?;
    require(cfg.repeats >= 1, "runtime: repeats must be positive")?;
    require(
        (0.0..=1.0).contains(&cfg.beta),
        "runtime: beta must lie in [0, 1]",
    )?;

    let mut rows = Vec::new();
    for (i, &p) in cfg.dims.iter().enumerate() {
        let half = p / 2;
        let spec = SyntheticConfig::canonical(p, vec![1.0, cfg.beta], 0)
            .mixture(&[[half, half], [half, half]])?;
        let theory = theory_optimal_error(&spec, 1)?;
        let mut rng = stream_rng(seed, i as u64);
        let x = synth_gaussian_with(&spec, &mut rng);
        let test: Vec<Array2<f64>> = (0..2)
            .map(|j| sample_gaussian(spec.mean(spec.layout().block(1, j)), p, &mut rng))
            .collect();

        let mut best = f64::INFINITY;
        let mut error = 0.0;
        for _ in 0..cfg.repeats {
            let start = Instant::now();
            let model: FittedModel = fit_mtl_spca_binary(&x, 1)?.into();
            let mut wrong = 0usize;
            for (j, t) in test.iter().enumerate() {
                wrong += predict_classes(&model, t.view())?
                    .iter()
                    .filter(|&&c| c != j)
                    .count();
            }
            best = best.min(start.elapsed().as_secs_f64());
            error = wrong as f64 / (2 * p) as f64;
        }
        rows.push(ReportRow {
            sweep_value: p as f64,
            method: "mtl-spca".to_string(),
            theory_error: Some(theory),
            empirical_error: Some(error),
            stderr: None,
            seconds: best,
        });
    }
    finish(ExperimentReport {
        meta: meta(
            "runtime",
            "dimension",
            Some(seed),
            1,
            "2 tasks, 2 classes, n = 2p split evenly".to_string(),
            cfg,
        ),
        rows,
    })
}

/// Least-squares slope of `log seconds` against `log p` over the rows of
/// `method` with `p` in `[from, to]`.
pub fn scaling_exponent(
    report: &ExperimentReport,
    method: &str,
    from: f64,
    to: f64,
) -> Option<f64> {
    let pts: Vec<(f64, f64)> = report
        .rows
        .iter()
        .filter(|r| {
            r.method == method && r.sweep_value >= from && r.sweep_value <= to && r.seconds > 0.0
        })
        .map(|r| (r.sweep_value.ln(), r.seconds.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    Some(sxy / sxx)
}
