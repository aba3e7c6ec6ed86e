//! `nnpc` command-line tool.

mod config;
mod input;
mod mocap;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use nnpc::distances::distance_matrix;
use nnpc::experiment::run_bench;
use nnpc::km::km_from_distances;
use nnpc::metrics::{score, ClusteringScores};
use nnpc::nnpc::{nnpc_from_distances, ClusterCount, EigengapEstimate, NnpcConfig};
use nnpc::numerics::RngStream;
use nnpc::spectra::{estimate_psds, PsdConfig, WindowKind};
use nnpc::theory::check_condition;
use nnpc::Execution;

use config::ExperimentConfig;
use input::{read_dataset, Dataset, ReadOptions};

#[derive(Parser)]
#[command(name = "nnpc", version, about = "Cluster time series by their estimated power spectra")]
struct Cli {
    /// Run everything on the calling thread.
    #[arg(long, global = true)]
    sequential: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Cluster the observations of a CSV file.
    Cluster(ClusterArgs),
    /// Monte Carlo clustering error of NNPC and KM on simulated data.
    SynthBench {
        #[arg(long)]
        config: PathBuf,
        /// Output CSV (stdout if omitted).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate the sufficient condition for exact clustering.
    CheckCondition {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        m: Option<usize>,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        sigma2: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Estimate the number of clusters from the Laplacian eigengap.
    EstimateL(EstimateArgs),
    /// Build a cluster input file from per-sequence trajectory CSVs.
    ConvertMocap {
        /// Directory holding one CSV (with header) per sequence.
        #[arg(long)]
        input_dir: PathBuf,
        /// Column header, or 0-based column index.
        #[arg(long)]
        column: String,
        /// `file,label` CSV; adds a leading label column.
        #[arg(long)]
        labels: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct DataArgs {
    /// Observation CSV: one row per observation, no header.
    input: PathBuf,
    /// Zero-pad shorter rows to the longest one.
    #[arg(long)]
    pad_zeros: bool,
    /// The first column holds ground-truth labels.
    #[arg(long)]
    truth: bool,
    /// Subtract each row's mean before padding.
    #[arg(long)]
    remove_mean: bool,
    /// Rescale every PSD estimate to unit power.
    #[arg(long)]
    normalize_power: bool,
    #[arg(long, value_enum, default_value_t = WindowArg::Gaussian)]
    window: WindowArg,
    /// Standard deviation of the gaussian lag window.
    #[arg(long, default_value_t = 50.0)]
    window_std: f64,
    /// PSD grid size as a multiple of the observation length.
    #[arg(long, default_value_t = 4)]
    grid_factor: usize,
    /// Neighbors per observation.
    #[arg(long, default_value_t = 10)]
    q: usize,
    /// Largest cluster count the eigengap heuristic may return.
    #[arg(long, default_value_t = 10)]
    l_max: usize,
}

#[derive(Args)]
struct ClusterArgs {
    #[command(flatten)]
    data: DataArgs,
    #[arg(long, value_enum, default_value_t = AlgorithmArg::Nnpc)]
    algorithm: AlgorithmArg,
    /// Number of clusters, or `auto` for the eigengap estimate (NNPC only).
    #[arg(long, default_value = "auto")]
    clusters: Clusters,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// `id,label` CSV (stdout if omitted).
    #[arg(long)]
    labels_out: Option<PathBuf>,
    /// JSON report with parameters, scores and eigengap estimate.
    #[arg(long)]
    report_out: Option<PathBuf>,
}

#[derive(Args)]
struct EstimateArgs {
    #[command(flatten)]
    data: DataArgs,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum WindowArg {
    Gaussian,
    Bartlett,
    Rectangular,
}

#[derive(Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum AlgorithmArg {
    Nnpc,
    Km,
}

#[derive(Clone, Copy, Debug)]
enum Clusters {
    Auto,
    Known(usize),
}

impl std::str::FromStr for Clusters {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s == "auto" {
            return Ok(Clusters::Auto);
        }
        match s.parse::<usize>() {
            Ok(n) if n > 0 => Ok(Clusters::Known(n)),
            _ => Err(format!("expected a positive integer or `auto`, got {s:?}")),
        }
    }
}

impl Serialize for Clusters {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Clusters::Auto => s.serialize_str("auto"),
            Clusters::Known(n) => s.serialize_u64(*n as u64),
        }
    }
}

impl DataArgs {
    fn window(&self) -> WindowKind {
        match self.window {
            WindowArg::Gaussian => WindowKind::Gaussian { std: self.window_std },
            WindowArg::Bartlett => WindowKind::Bartlett,
            WindowArg::Rectangular => WindowKind::Rectangular,
        }
    }

    fn psd_config(&self) -> Result<PsdConfig> {
        if self.grid_factor < 2 {
            bail!("--grid-factor must be at least 2, got {}", self.grid_factor);
        }
        Ok(PsdConfig { window: self.window(), grid_factor: self.grid_factor, unit_power: self.normalize_power })
    }

    fn load(&self) -> Result<Dataset> {
        let file = fs::File::open(&self.input).with_context(|| format!("opening {}", self.input.display()))?;
        let options = ReadOptions { truth: self.truth, pad_zeros: self.pad_zeros, remove_mean: self.remove_mean };
        read_dataset(std::io::BufReader::new(file), options).with_context(|| self.input.display().to_string())
    }
}

#[derive(Serialize)]
struct Parameters {
    algorithm: AlgorithmArg,
    clusters: Clusters,
    q: usize,
    l_max: usize,
    window: WindowKind,
    grid_factor: usize,
    grid_size: usize,
    normalize_power: bool,
    remove_mean: bool,
    pad_zeros: bool,
    seed: u64,
}

#[derive(Serialize)]
struct ClusterReport {
    n_observations: usize,
    #[serde(rename = "M")]
    len: usize,
    /// Rows shorter than `M` before zero-padding.
    padded_rows: usize,
    parameters: Parameters,
    n_clusters: usize,
    cluster_sizes: Vec<usize>,
    isolated: Vec<usize>,
    eigengap: Option<EigengapEstimate>,
    scores: Option<ClusteringScores>,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let exec = if cli.sequential { Execution::Sequential } else { Execution::default() };
    match run(cli.command, exec) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            // Filesystem failures exit 1; everything else is a bad parameter
            // or bad input content.
            if err.chain().any(|e| e.is::<std::io::Error>()) {
                ExitCode::from(1)
            } else {
                ExitCode::from(2)
            }
        }
    }
}

fn run(command: Command, exec: Execution) -> Result<()> {
    match command {
        Command::Cluster(args) => cluster(&args, exec),
        Command::SynthBench { config, out } => {
            let config = load_config(&config)?.bench_config()?;
            let rows = run_bench(&config, exec)?;
            let mut w = csv::Writer::from_writer(Vec::new());
            for row in &rows {
                w.serialize(row)?;
            }
            emit(out.as_deref(), &w.into_inner().context("flushing CSV")?)
        }
        Command::CheckCondition { config, m, n, sigma2, out } => {
            let mut config = load_config(&config)?;
            config.m = m.or(config.m);
            config.n = n.or(config.n);
            config.sigma2 = sigma2.or(config.sigma2);
            let models = config.resolve_models()?;
            let (m, n, sigma2) = config.condition_point(models.len())?;
            let report = check_condition(&models, config.window, m, n, sigma2)?;
            emit(out.as_deref(), &pretty_json(&report)?)
        }
        Command::EstimateL(args) => estimate_l(&args, exec),
        Command::ConvertMocap { input_dir, column, labels, out } => {
            let labels = match labels {
                Some(path) => Some(mocap::read_labels(&read_text(&path)?)?),
                None => None,
            };
            let text = mocap::convert(&input_dir, &mocap::ColumnSelector(column), labels.as_ref())?;
            emit(out.as_deref(), text.as_bytes())
        }
    }
}

fn cluster(args: &ClusterArgs, exec: Execution) -> Result<()> {
    let data = args.data.load()?;
    let n = data.observations.len();
    let psd = args.data.psd_config()?;
    if let Clusters::Known(l) = args.clusters {
        if l > n {
            bail!("cannot form {l} clusters from {n} observations");
        }
    }
    let psds = estimate_psds(&data.observations, &psd, exec)?;
    let d = distance_matrix(&psds, exec)?;

    let (labeling, eigengap, isolated) = match (args.algorithm, args.clusters) {
        (AlgorithmArg::Km, Clusters::Auto) => bail!("--algorithm km needs an explicit --clusters count"),
        (AlgorithmArg::Km, Clusters::Known(l)) => (km_from_distances(&d, l)?, None, Vec::new()),
        (AlgorithmArg::Nnpc, clusters) => {
            let count = match clusters {
                Clusters::Auto => ClusterCount::Auto { max: args.data.l_max },
                Clusters::Known(l) => ClusterCount::Known(l),
            };
            let outcome = nnpc_from_distances(&d, &NnpcConfig::new(args.data.q, count), &RngStream::new(args.seed, 0))?;
            (outcome.labeling, outcome.eigengap, outcome.isolated)
        }
    };
    let labels = labeling.labels();

    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["id", "label"])?;
    for (id, label) in labels.iter().enumerate() {
        w.write_record([id.to_string(), label.to_string()])?;
    }
    emit(args.labels_out.as_deref(), &w.into_inner().context("flushing CSV")?)?;

    if let Some(path) = &args.report_out {
        let report = ClusterReport {
            n_observations: n,
            len: data.observations[0].len(),
            padded_rows: data.lengths.iter().filter(|&&l| l < data.observations[0].len()).count(),
            parameters: Parameters {
                algorithm: args.algorithm,
                clusters: args.clusters,
                q: args.data.q,
                l_max: args.data.l_max,
                window: psd.window,
                grid_factor: psd.grid_factor,
                grid_size: psd.grid_size(data.observations[0].len()),
                normalize_power: psd.unit_power,
                remove_mean: args.data.remove_mean,
                pad_zeros: args.data.pad_zeros,
                seed: args.seed,
            },
            n_clusters: labeling.n_clusters(),
            cluster_sizes: labeling.clusters().iter().map(Vec::len).collect(),
            isolated,
            eigengap,
            scores: data.truth.as_deref().map(|t| score(labels, t)).transpose()?,
        };
        emit(Some(path), &pretty_json(&report)?)?;
    }
    Ok(())
}

fn estimate_l(args: &EstimateArgs, exec: Execution) -> Result<()> {
    let data = args.data.load()?;
    let psds = estimate_psds(&data.observations, &args.data.psd_config()?, exec)?;
    let d = distance_matrix(&psds, exec)?;
    let config = NnpcConfig::new(args.data.q, ClusterCount::Auto { max: args.data.l_max });
    let outcome = nnpc_from_distances(&d, &config, &RngStream::new(0, 0))?;
    let estimate = outcome.eigengap.expect("eigengap is computed for an automatic cluster count");
    emit(args.out.as_deref(), &pretty_json(&estimate)?)
}

fn load_config(path: &Path) -> Result<ExperimentConfig> {
    ExperimentConfig::parse(&read_text(path)?).with_context(|| path.display().to_string())
}

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn pretty_json<T: Serialize>(value: &T) -> Result<Vec<u8>> {
    let mut bytes = serde_json::to_vec_pretty(value)?;
    bytes.push(b'\n');
    Ok(bytes)
}

/// Writes `bytes` to `path`, or to stdout without one.
fn emit(path: Option<&Path>, bytes: &[u8]) -> Result<()> {
    match path {
        Some(path) => fs::write(path, bytes).with_context(|| format!("writing {}", path.display())),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(bytes).and_then(|()| stdout.flush()).context("writing to stdout")
        }
    }
}
