//! `hsvm` command-line tool.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use hsvm::benchmark::{run_benchmark, BenchmarkConfig};
use hsvm::eval::{evaluate_with_seed, DEFAULT_TIE_SEED};
use hsvm::io::{
    read_dataset, read_json, read_model, write_dataset, write_json, ModelFile, PredictionsFile,
    ReportFile, PREDICTIONS_FORMAT,
};
use hsvm::multiclass::{ova_train, Geometry};
use hsvm::synth::{
    gen_gaussian_mixture, gen_ps_labeled, GaussianMixtureSpec, LabelSpec, PsDistance, PsSpec,
};
use hsvm::{Error, LabeledDataset, Result, TrainConfig};
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "hsvm", version, about = "Hyperbolic and Euclidean linear SVMs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic dataset.
    #[command(subcommand)]
    Gen(GenCommand),
    /// Train a one-vs-all model on a dataset file.
    Train(TrainArgs),
    /// Write calibrated class probabilities for every point.
    Predict(PredictArgs),
    /// Score a model on a labeled dataset.
    Eval(EvalArgs),
    /// Run nested cross-validation for one or both methods.
    Benchmark(BenchmarkArgs),
}

#[derive(Subcommand)]
enum GenCommand {
    /// Mixture of hyperbolic Gaussians in the plane.
    Gaussian(GaussianArgs),
    /// Popularity-similarity network with propagated labels.
    Ps(PsArgs),
}

#[derive(Args)]
struct GaussianArgs {
    #[arg(long, default_value_t = 4)]
    classes: usize,
    #[arg(long, default_value_t = 100)]
    per_class: usize,
    #[arg(long, default_value_t = 1.5)]
    centroid_var: f64,
    #[arg(long, default_value_t = 1.0)]
    component_var: f64,
    #[arg(long, default_value_t = 2)]
    dim: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct PsArgs {
    #[arg(long, default_value_t = 500)]
    nodes: usize,
    #[arg(long, default_value_t = 4.0)]
    avg_degree: f64,
    #[arg(long, default_value_t = 2.25)]
    gamma: f64,
    #[arg(long, default_value_t = 0.0)]
    temperature: f64,
    /// Rank candidate neighbours by exact hyperbolic distance.
    #[arg(long)]
    exact_distance: bool,
    #[arg(long, default_value_t = 10)]
    labels: usize,
    /// Label size bounds as `MIN,MAX`.
    #[arg(long, default_value = "20,50", value_parser = parse_range)]
    size_range: (usize, usize),
    #[arg(long, default_value_t = 0.8)]
    prop: f64,
    #[arg(long, default_value_t = 1000)]
    max_attempts: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
    /// Also write the network and label sets here.
    #[arg(long)]
    network_out: Option<PathBuf>,
}

#[derive(Args)]
struct TrainArgs {
    /// Dataset file.
    data: PathBuf,
    #[arg(long, default_value = "hyperbolic", value_parser = parse_geometry)]
    method: Geometry,
    /// Base training configuration as JSON; flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    c: Option<f64>,
    #[arg(long)]
    max_iters: Option<usize>,
    #[arg(long)]
    step_size: Option<f64>,
    #[arg(long)]
    step_decay: Option<f64>,
    #[arg(long, conflicts_with = "no_clip")]
    clip_norm: Option<f64>,
    #[arg(long)]
    no_clip: bool,
    #[arg(long)]
    clip_floor: Option<f64>,
    #[arg(long)]
    feas_eps: Option<f64>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct PredictArgs {
    model: PathBuf,
    data: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct EvalArgs {
    model: PathBuf,
    data: PathBuf,
    /// Seed for shuffling tied scores.
    #[arg(long, default_value_t = DEFAULT_TIE_SEED)]
    tie_seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct BenchmarkArgs {
    /// Benchmark configuration as JSON.
    config: PathBuf,
    /// Summary path; defaults to the config's `output`, else stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_range(s: &str) -> std::result::Result<(usize, usize), String> {
    let (lo, hi) = s
        .split_once(',')
        .ok_or_else(|| format!("expected MIN,MAX, got {s:?}"))?;
    let parse = |v: &str| v.trim().parse::<usize>().map_err(|e| format!("{v:?}: {e}"));
    Ok((parse(lo)?, parse(hi)?))
}

fn parse_geometry(s: &str) -> std::result::Result<Geometry, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Gen(GenCommand::Gaussian(a)) => gen_gaussian(a),
        Command::Gen(GenCommand::Ps(a)) => gen_ps(a),
        Command::Train(a) => train(a),
        Command::Predict(a) => predict(a),
        Command::Eval(a) => eval(a),
        Command::Benchmark(a) => benchmark(a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn gen_gaussian(a: GaussianArgs) -> Result<()> {
    let spec = GaussianMixtureSpec {
        num_classes: a.classes,
        points_per_class: a.per_class,
        centroid_variance: a.centroid_var,
        component_variance: a.component_var,
        dim: a.dim,
        seed: a.seed,
    };
    let data = gen_gaussian_mixture(&spec)?;
    let meta = json!({ "generator": "gaussian", "spec": spec });
    write_dataset(&a.out, &data, meta)?;
    eprintln!(
        "wrote {} points in {} classes to {}",
        data.len(),
        data.num_classes(),
        a.out.display()
    );
    Ok(())
}

fn gen_ps(a: PsArgs) -> Result<()> {
    let spec = PsSpec {
        nodes: a.nodes,
        avg_degree: a.avg_degree,
        gamma: a.gamma,
        temperature: a.temperature,
        distance: if a.exact_distance {
            PsDistance::Exact
        } else {
            PsDistance::Approximate
        },
    };
    let labels = LabelSpec {
        num_labels: a.labels,
        size_min: a.size_range.0,
        size_max: a.size_range.1,
        propagate_prob: a.prop,
        max_attempts: a.max_attempts,
    };
    let (net, assignment, data) = gen_ps_labeled(&spec, &labels, a.seed)?;
    let meta = json!({ "generator": "ps", "spec": spec, "labels": labels, "seed": a.seed });
    write_dataset(&a.out, &data, meta.clone())?;
    if let Some(path) = &a.network_out {
        let file = json!({
            "format": "hsvm-ps-network/1",
            "network": net,
            "labels": assignment,
            "metadata": meta,
        });
        write_json(path, &file)?;
    }
    eprintln!(
        "wrote {} nodes, {} edges, {} labels to {}",
        net.nodes.len(),
        net.edges.len(),
        assignment.sets.len(),
        a.out.display()
    );
    Ok(())
}

fn train_config(a: &TrainArgs) -> Result<TrainConfig> {
    let mut config: TrainConfig = match &a.config {
        Some(path) => read_json(path)?,
        None => TrainConfig::default(),
    };
    if let Some(v) = a.c {
        config.c = v;
    }
    if let Some(v) = a.max_iters {
        config.max_iters = v;
    }
    if let Some(v) = a.step_size {
        config.step_size = v;
    }
    if let Some(v) = a.step_decay {
        config.step_decay = v;
    }
    if let Some(v) = a.clip_norm {
        config.clip_norm = Some(v);
    }
    if a.no_clip {
        config.clip_norm = None;
    }
    if let Some(v) = a.clip_floor {
        config.clip_floor = v;
    }
    if let Some(v) = a.feas_eps {
        config.feas_eps = v;
    }
    if let Some(v) = a.tol {
        config.tol = v;
    }
    if let Some(v) = a.seed {
        config.seed = v;
    }
    config.validate()?;
    Ok(config)
}

fn train(a: TrainArgs) -> Result<()> {
    let config = train_config(&a)?;
    let (data, data_meta) = read_dataset(&a.data)?;
    let model = ova_train(&data, &config, a.method)?;
    let meta = json!({
        "command": "train",
        "data": a.data,
        "data_metadata": data_meta,
        "method": a.method,
        "train": config,
    });
    let file = ModelFile::new(model, data.model(), data.dim(), meta);
    for w in &file.warnings {
        eprintln!("warning: {w}");
    }
    write_json(&a.out, &file)
}

fn load_for_model(
    model_path: &Path,
    data_path: &Path,
) -> Result<(ModelFile, LabeledDataset, Value)> {
    let model = read_model(model_path)?;
    let (data, meta) = read_dataset(data_path)?;
    if data.dim() != model.dim {
        return Err(Error::Invalid(format!(
            "{} has dimension {} but the model expects {}",
            data_path.display(),
            data.dim(),
            model.dim
        )));
    }
    Ok((model, data, meta))
}

fn predict(a: PredictArgs) -> Result<()> {
    let (model, data, data_meta) = load_for_model(&a.model, &a.data)?;
    let probabilities = model.model.predict_dataset(&data)?;
    let file = PredictionsFile {
        format: PREDICTIONS_FORMAT.into(),
        class_ids: model
            .model
            .class_ids()
            .into_iter()
            .map(String::from)
            .collect(),
        probabilities,
        metadata: json!({
            "command": "predict",
            "model": a.model,
            "data": a.data,
            "data_metadata": data_meta,
        }),
    };
    write_json(&a.out, &file)
}

fn eval(a: EvalArgs) -> Result<()> {
    let (model, data, data_meta) = load_for_model(&a.model, &a.data)?;
    let report = evaluate_with_seed(&model.model, &data, a.tie_seed)?;
    eprintln!(
        "macro AUPR {:.4}, micro AUPR {:.4}",
        report.macro_aupr, report.micro_aupr
    );
    let meta = json!({
        "command": "eval",
        "model": a.model,
        "data": a.data,
        "data_metadata": data_meta,
        "tie_seed": a.tie_seed,
    });
    write_json(&a.out, &ReportFile::new(report, meta))
}

fn benchmark(a: BenchmarkArgs) -> Result<()> {
    let config: BenchmarkConfig = read_json(&a.config)?;
    let out = a.out.clone().or_else(|| config.output.clone());
    let summary = run_benchmark(&config)?;
    for (method, mean) in &summary.method_means {
        eprintln!("{}: mean macro AUPR {mean:.4}", method.method_name());
    }
    if let Some(t) = summary.comparison.as_ref().and_then(|c| c.t_test.as_ref()) {
        eprintln!("paired t = {:.4}, one-sided p = {:.3e}", t.t, t.p_value);
    }
    match out {
        Some(path) => write_json(&path, &summary),
        None => {
            print!("{}", hsvm::io::to_json_string(&summary)?);
            Ok(())
        }
    }
}
