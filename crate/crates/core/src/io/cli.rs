//! Command-line front end shared by the `emfbeam` binary and the tests.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use log::info;

use crate::error::Error;
use crate::experiments::{run_monte_carlo, run_snapshot, ExperimentConfig};
use crate::io::config::load_experiment_config;
use crate::io::csv::{cdf_csv, exposure_csv, samples_csv};
use crate::io::heatmap::render_ppm;
use crate::io::manifest::{write_run, RunManifest};
use crate::schemes::Scheme;

/// Output directory used when neither `--out-dir` nor the config sets one.
pub const OUT_DIR_ENV: &str = "EMFBEAM_OUT_DIR";
pub const DEFAULT_OUT_DIR: &str = "out";

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_RUNTIME: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "emfbeam", version, about = "Exposure-aware MRT beamforming simulator")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate one channel realisation and write exposure maps for each scheme.
    Snapshot(SnapshotArgs),
    /// Run a Monte-Carlo campaign and write per-sample metrics and CDFs.
    Mc(McArgs),
}

#[derive(Debug, Args)]
pub struct SnapshotArgs {
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
    /// Comma separated subset of mrt,reduced,truncated,boosted.
    #[arg(long, value_delimiter = ',')]
    pub schemes: Option<Vec<Scheme>>,
}

#[derive(Debug, Args)]
pub struct McArgs {
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
    /// Worker threads; defaults to the available parallelism.
    #[arg(long)]
    pub workers: Option<usize>,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(Error),
    #[error("runtime error: {0}")]
    Runtime(Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Runtime(_) => EXIT_RUNTIME,
        }
    }
}

fn load(path: &Path) -> Result<ExperimentConfig, CliError> {
    load_experiment_config(path).map_err(CliError::Config)
}

fn out_dir(arg: Option<PathBuf>, config: &ExperimentConfig) -> PathBuf {
    arg.or_else(|| config.out_dir.clone())
        .or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT_DIR))
}

pub fn snapshot(args: SnapshotArgs) -> Result<RunManifest, CliError> {
    let mut config = load(&args.config)?;
    if let Some(schemes) = args.schemes {
        config.schemes = schemes;
    }
    let seed = args.seed.unwrap_or(config.scenario.seed);
    config.scenario.seed = seed;
    config.validate().map_err(CliError::Config)?;
    let dir = out_dir(args.out_dir, &config);

    let snap = run_snapshot(&config, seed).map_err(CliError::Runtime)?;
    let mut files = vec![
        ("scenario.json".to_string(), snap.scenario.to_json().map_err(CliError::Runtime)?.into_bytes()),
        ("report.txt".to_string(), snap.report.clone().into_bytes()),
    ];
    for row in &snap.rows {
        let title = format!("{} exposure, seed {seed}", row.scheme.label());
        files.push((format!("exposure_{}.csv", row.scheme), exposure_csv(&row.map).into_bytes()));
        files.push((format!("heatmap_{}.ppm", row.scheme), render_ppm(&row.map, &title)));
    }
    info!("writing {} files to {}", files.len(), dir.display());
    let manifest = RunManifest::new("snapshot", seed, &config);
    write_run(&dir, manifest, &files).map_err(CliError::Runtime)
}

pub fn monte_carlo(args: McArgs) -> Result<RunManifest, CliError> {
    let mut config = load(&args.config)?;
    if let Some(n) = args.samples {
        config.n_samples = n;
    }
    if let Some(seed) = args.seed {
        config.scenario.seed = seed;
    }
    config.validate().map_err(CliError::Config)?;
    let workers = args
        .workers
        .unwrap_or_else(|| std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1));
    if workers == 0 {
        return Err(CliError::Config(Error::InvalidConfig("workers must be at least 1".into())));
    }
    let dir = out_dir(args.out_dir, &config);

    info!("running {} samples on {workers} workers", config.n_samples);
    let result = run_monte_carlo(&config, workers).map_err(CliError::Runtime)?;
    let mut files = vec![("samples.csv".to_string(), samples_csv(&result.samples, &config.schemes).into_bytes())];
    for (metric, scheme, series) in &result.cdfs {
        files.push((format!("cdf_{}_{}.csv", metric.name(), scheme), cdf_csv(series).into_bytes()));
    }
    let manifest = RunManifest::new("mc", config.scenario.seed, &config);
    write_run(&dir, manifest, &files).map_err(CliError::Runtime)
}

/// Parses `args`, runs the command and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    let outcome = match cli.command {
        Command::Snapshot(a) => snapshot(a),
        Command::Mc(a) => monte_carlo(a),
    };
    match outcome {
        Ok(m) => {
            for f in &m.files {
                println!("{}  {}", f.sha256, f.name);
            }
            EXIT_OK
        }
        Err(e) => {
            eprintln!("emfbeam: {e}");
            e.exit_code()
        }
    }
}
