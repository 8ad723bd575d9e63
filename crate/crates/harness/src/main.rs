use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use mtlspca::classify::{
    fit_algorithm1, fit_mtl_spca_binary, fit_naive_spca, fit_pca, fit_spca_binary, load_model,
    predict_batch, save_model, FittedModel,
};
use mtlspca::datamodel::{
    read_samples, save_csv, synth_gaussian_with, LabelAssignment, MixtureSpec, SyntheticConfig,
};
use mtlspca::theory::{mtl_score_law_binary, optimal_error, pca_score_law, spca_score_law};
use mtlspca_harness::config::load_config;
use mtlspca_harness::experiments::population_stats;
use mtlspca_harness::{
    monte_carlo_oracle, run_fig1, run_fig2, run_fig3_synth, run_fig4_synth, run_runtime_bench,
    save_report, stream_rng, ExperimentReport, HarnessError, OracleConfig, OracleProjector,
};
use ndarray::Array1;

/// Multi-task supervised PCA classification: synthetic data, asymptotic
/// error predictions, training, prediction and experiment reproduction.
///
/// Dataset files are CSV with header `task,class,f0,...,f{p-1}` and 1-based
/// task and class ids. Exit status: 0 on success, 1 on bad input, 2 on a
/// numerical failure.
#[derive(Parser, Debug)]
#[command(name = "mtl-spca", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Draw a two-class transfer mixture and write it as a dataset CSV.
    Synth {
        #[command(flatten)]
        mixture: MixtureArgs,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Asymptotic test errors of every method on a two-class transfer mixture.
    Theory {
        #[command(flatten)]
        mixture: MixtureArgs,
        /// Target task (1-based).
        #[arg(long, default_value_t = 1)]
        target: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Train a classifier on a dataset CSV and save it as a model file.
    Fit {
        #[arg(long)]
        data: PathBuf,
        #[arg(long, value_enum)]
        method: Method,
        /// Target task (1-based).
        #[arg(long, default_value_t = 1)]
        target: usize,
        /// One label score per (task, class) block for `--method spca`;
        /// defaults to +1/-1 on every task.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        labels: Option<Vec<f64>>,
        /// Number of principal components for `--method pca`.
        #[arg(long, default_value_t = 1)]
        components: usize,
        #[arg(long)]
        model: PathBuf,
    },
    /// Classify the rows of a dataset CSV; writes one prediction per row.
    Predict {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Rerun a synthetic experiment and write its report CSV (plus a
    /// `.meta.toml` sidecar).
    Reproduce {
        #[arg(value_enum)]
        experiment: Experiment,
        /// TOML file overriding the experiment defaults.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        /// Theory curves only (fig1 and fig2); no seed needed.
        #[arg(long)]
        theory_only: bool,
        #[arg(long)]
        out: PathBuf,
    },
    /// Monte-Carlo moments of the projected scores next to the theory.
    Oracle {
        #[command(flatten)]
        mixture: MixtureArgs,
        /// Label score per block; defaults to +1/-1 on every task.
        #[arg(
            long,
            value_delimiter = ',',
            allow_hyphen_values = true,
            conflicts_with = "pca"
        )]
        labels: Option<Vec<f64>>,
        /// Use this many principal components instead of labels.
        #[arg(long)]
        pca: Option<usize>,
        #[arg(long, default_value_t = 10)]
        training_sets: usize,
        #[arg(long, default_value_t = 1000)]
        draws: usize,
        /// Draw test noise in +/- pairs so it cancels in the means.
        #[arg(long)]
        antithetic: bool,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: PathBuf,
    },
}

/// A family of two-class tasks with means `∓(β_t e_1 + √(1−β_t²) e_p)`.
#[derive(Args, Debug)]
struct MixtureArgs {
    #[arg(long)]
    dim: usize,
    /// Relatedness of each task, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    betas: Vec<f64>,
    /// Two sample counts per task, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    counts: Vec<usize>,
}

impl MixtureArgs {
    fn spec(&self) -> Result<MixtureSpec, HarnessError> {
        if self.counts.len() != 2 * self.betas.len() {
            return Err(HarnessError::Input(format!(
                "{} counts for {} tasks; give two per task",
                self.counts.len(),
                self.betas.len()
            )));
        }
        if self.dim < 2 {
            return Err(HarnessError::Input("dim must be at least 2".into()));
        }
        let counts: Vec<[usize; 2]> = self.counts.chunks(2).map(|c| [c[0], c[1]]).collect();
        Ok(SyntheticConfig::canonical(self.dim, self.betas.clone(), 0).mixture(&counts)?)
    }
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum Method {
    Pca,
    Spca,
    NSpca,
    MtlSpca,
    Multiclass,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum Experiment {
    Fig1,
    Fig2,
    Fig3,
    Fig4,
    Runtime,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli.command) {
        Ok(summary) => {
            print!("{summary}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn need_seed(seed: Option<u64>) -> Result<u64, HarnessError> {
    seed.ok_or_else(|| HarnessError::Input("this command is stochastic; pass --seed".into()))
}

fn one_based(value: usize, what: &str) -> Result<usize, HarnessError> {
    value
        .checked_sub(1)
        .ok_or_else(|| HarnessError::Input(format!("{what} ids are 1-based")))
}

fn run(command: Command) -> Result<String, HarnessError> {
    match command {
        Command::Synth { mixture, seed, out } => {
            let spec = mixture.spec()?;
            let x = synth_gaussian_with(&spec, &mut stream_rng(need_seed(seed)?, 0));
            save_csv(&x, &out)?;
            Ok(format!(
                "wrote {} samples of dimension {} ({} tasks) to {}\n",
                x.layout().n(),
                x.layout().dim(),
                x.layout().tasks(),
                out.display()
            ))
        }
        Command::Theory {
            mixture,
            target,
            out,
        } => theory(&mixture.spec()?, one_based(target, "task")?, &out),
        Command::Fit {
            data,
            method,
            target,
            labels,
            components,
            model,
        } => fit(
            &data,
            method,
            one_based(target, "task")?,
            labels,
            components,
            &model,
        ),
        Command::Predict { model, data, out } => predict(&model, &data, &out),
        Command::Reproduce {
            experiment,
            config,
            seed,
            theory_only,
            out,
        } => {
            let config = config.as_deref();
            let report = match (experiment, theory_only) {
                (Experiment::Fig1, true) => run_fig1(&load_config(config)?, None)?,
                (Experiment::Fig2, true) => run_fig2(&load_config(config)?, None)?,
                (_, true) => {
                    return Err(HarnessError::Input(
                        "--theory-only applies to fig1 and fig2".into(),
                    ))
                }
                (Experiment::Fig1, false) => {
                    run_fig1(&load_config(config)?, Some(need_seed(seed)?))?
                }
                (Experiment::Fig2, false) => {
                    run_fig2(&load_config(config)?, Some(need_seed(seed)?))?
                }
                (Experiment::Fig3, false) => {
                    run_fig3_synth(&load_config(config)?, need_seed(seed)?)?
                }
                (Experiment::Fig4, false) => {
                    run_fig4_synth(&load_config(config)?, need_seed(seed)?)?
                }
                (Experiment::Runtime, false) => {
                    run_runtime_bench(&load_config(config)?, need_seed(seed)?)?
                }
            };
            save_report(&report, &out)?;
            Ok(format!("{}wrote {}\n", report.summary(), out.display()))
        }
        Command::Oracle {
            mixture,
            labels,
            pca,
            training_sets,
            draws,
            antithetic,
            seed,
            out,
        } => {
            let cfg = OracleConfig {
                training_sets,
                draws_per_block: draws,
                antithetic,
            };
            oracle(&mixture, labels, pca, cfg, need_seed(seed)?, &out)
        }
    }
}

fn theory(spec: &MixtureSpec, target: usize, out: &Path) -> Result<String, HarnessError> {
    let tasks = spec.layout().tasks();
    if target >= tasks {
        return Err(HarnessError::Input(format!(
            "target task {} of {tasks}",
            target + 1
        )));
    }
    let s = population_stats(spec)?;
    let single = spec.layout().counts_by_task()[target].clone();
    let single_spec = MixtureSpec::new(
        mtlspca::datamodel::TaskLayout::new(vec![single], spec.layout().dim())?,
        spec.means()
            .slice(ndarray::s![.., 2 * target..2 * target + 2])
            .to_owned(),
    )?;
    let st = population_stats(&single_spec)?;
    let pm = LabelAssignment::plus_minus(1).vector();
    let mut rows = vec![
        (
            "st-pca",
            pca_score_law(&st.calm, &st.proportions, st.c0, 1)?.binary_error(0),
        ),
        (
            "st-spca",
            mtl_score_law_binary(&st.calm, &st.proportions, st.c0, &pm)?.binary_error(0),
        ),
    ];
    if tasks > 1 {
        rows.push((
            "spca-one-hot",
            spca_score_law(&s.calm, &s.proportions, s.c0)?.binary_error(target),
        ));
        rows.push((
            "n-spca",
            mtl_score_law_binary(
                &s.calm,
                &s.proportions,
                s.c0,
                &LabelAssignment::plus_minus(tasks).vector(),
            )?
            .binary_error(target),
        ));
        rows.push((
            "mtl-spca",
            optimal_error(&s.calm, &s.proportions, s.c0, target)?,
        ));
    }
    let report = ExperimentReport {
        meta: mtlspca_harness::ReportMeta {
            experiment: "theory".into(),
            sweep: "target task".into(),
            seed: None,
            seeds: 0,
            layout: format!("{:?}", spec.layout().counts_by_task()),
            config_hash: mtlspca_harness::short_hash(&format!("{:?}", spec.means())),
        },
        rows: rows
            .into_iter()
            .map(|(m, e)| mtlspca_harness::ReportRow {
                sweep_value: (target + 1) as f64,
                method: m.into(),
                theory_error: Some(e),
                empirical_error: None,
                stderr: None,
                seconds: 0.0,
            })
            .collect(),
    };
    save_report(&report, out)?;
    Ok(format!("{}wrote {}\n", report.summary(), out.display()))
}

fn fit(
    data: &Path,
    method: Method,
    target: usize,
    labels: Option<Vec<f64>>,
    components: usize,
    out: &Path,
) -> Result<String, HarnessError> {
    let x = read_samples(data)?.into_dataset()?;
    let tasks = x.layout().tasks();
    if target >= tasks {
        return Err(HarnessError::Input(format!(
            "target task {} of {tasks}",
            target + 1
        )));
    }
    let model: FittedModel = match method {
        Method::Pca => {
            if tasks != 1 {
                return Err(HarnessError::Input("pca fits a single-task dataset".into()));
            }
            fit_pca(&x, components)?.into()
        }
        Method::Spca => {
            let labels = labels
                .map(Array1::from)
                .unwrap_or_else(|| LabelAssignment::plus_minus(tasks).vector());
            fit_spca_binary(&x, &labels, target)?.into()
        }
        Method::NSpca => fit_naive_spca(&x, target)?.into(),
        Method::MtlSpca => fit_mtl_spca_binary(&x, target)?.into(),
        Method::Multiclass => fit_algorithm1(&x, target)?.into(),
    };
    save_model(&model, out)?;
    let mut summary = format!(
        "trained {method:?} on {} samples ({} tasks, {} classes, dimension {})\n",
        x.layout().n(),
        tasks,
        x.layout().classes(),
        x.layout().dim()
    );
    if let Some(e) = model.predicted_error() {
        summary.push_str(&format!("predicted target error: {e:.5}\n"));
    }
    if let FittedModel::Pca(m) = &model {
        if let Some(w) = &m.warning {
            summary.push_str(&format!("warning: {w}\n"));
        }
    }
    summary.push_str(&format!("wrote {}\n", out.display()));
    Ok(summary)
}

fn predict(model_path: &Path, data: &Path, out: &Path) -> Result<String, HarnessError> {
    let model = load_model(model_path)?;
    let samples = read_samples(data)?;
    let predictions = predict_batch(&model, samples.features.view())?;
    let mut w = BufWriter::new(File::create(out)?);
    let width = predictions.first().map_or(0, |p| p.scores.len());
    write!(w, "row,task,class,predicted")?;
    for i in 0..width {
        write!(w, ",score{i}")?;
    }
    writeln!(w)?;
    let (mut seen, mut right) = (0usize, 0usize);
    for (i, p) in predictions.iter().enumerate() {
        write!(
            w,
            "{},{},{},{}",
            i + 1,
            samples.tasks[i] + 1,
            samples.classes[i] + 1,
            p.class + 1
        )?;
        for s in &p.scores {
            write!(w, ",{s:.16e}")?;
        }
        writeln!(w)?;
        if samples.tasks[i] == model.target() {
            seen += 1;
            right += usize::from(samples.classes[i] == p.class);
        }
    }
    w.flush()?;
    let mut summary = format!("classified {} rows\n", predictions.len());
    if seen > 0 {
        summary.push_str(&format!(
            "accuracy on target task {}: {:.5} ({right}/{seen})\n",
            model.target() + 1,
            right as f64 / seen as f64
        ));
    }
    summary.push_str(&format!("wrote {}\n", out.display()));
    Ok(summary)
}

fn oracle(
    mixture: &MixtureArgs,
    labels: Option<Vec<f64>>,
    pca: Option<usize>,
    cfg: OracleConfig,
    seed: u64,
    out: &Path,
) -> Result<String, HarnessError> {
    let spec = mixture.spec()?;
    let s = population_stats(&spec)?;
    let (projector, theory) = match pca {
        Some(components) => (
            OracleProjector::Pca { components },
            pca_score_law(&s.calm, &s.proportions, s.c0, components)?,
        ),
        None => {
            let y = labels
                .map(Array1::from)
                .unwrap_or_else(|| LabelAssignment::plus_minus(spec.layout().tasks()).vector());
            let law = mtl_score_law_binary(&s.calm, &s.proportions, s.c0, &y)?;
            (OracleProjector::Labels(LabelAssignment::binary(y)), law)
        }
    };
    let law = monte_carlo_oracle(&spec, &projector, cfg, seed)?;
    let mut w = BufWriter::new(File::create(out)?);
    writeln!(
        w,
        "block,component,theory_mean,empirical_mean,mean_stderr,variance"
    )?;
    let mut summary = format!("{} scores per block\n", law.trials);
    for ((a, i), m) in law.means.indexed_iter() {
        let t = theory.means[[a, i]];
        writeln!(
            w,
            "{},{},{t:.16e},{m:.16e},{:.16e},{:.16e}",
            a + 1,
            i + 1,
            law.mean_stderr[[a, i]],
            law.variances[[a, i]]
        )?;
        summary.push_str(&format!(
            "block {} component {}: theory {t:+.4}, empirical {m:+.4} ± {:.4}, variance {:.4}\n",
            a + 1,
            i + 1,
            law.mean_stderr[[a, i]],
            law.variances[[a, i]]
        ));
    }
    w.flush()?;
    summary.push_str(&format!("wrote {}\n", out.display()));
    Ok(summary)
}
