use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use rena_cli::commands::{self, MatrixFormat};
use rena_cli::config::{
    parse_dims, parse_dims_grid, parse_fracs, require, resolve, resolve_with, Config,
};
use rena_cli::methods::{parse_methods, Method};
use rena_cli::{CliError, CliResult};

/// Benchmark harness for graph-constrained feature clustering reducers.
#[derive(Parser)]
#[command(name = "rena", version, about)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate a smooth synthetic dataset (clean and noisy matrices).
    Synth(SynthCli),
    /// Cluster features of a data matrix and write the partition.
    Cluster(ClusterCli),
    /// Relative-distortion benchmark over methods and reduction fractions.
    BenchDistortion(BenchDistortionCli),
    /// Largest-cluster (percolation) benchmark over methods and fractions.
    BenchPercolation(BenchPercolationCli),
    /// Fit-time scaling benchmark over a grid of lattice sizes.
    BenchTime(BenchTimeCli),
}

#[derive(Args)]
struct SynthCli {
    /// Lattice dims, e.g. 20,20,20
    #[arg(long)]
    dims: Option<String>,
    /// Smoothing kernel FWHM in voxels [default: 8]
    #[arg(long)]
    fwhm: Option<f64>,
    /// Number of samples [default: 100]
    #[arg(long)]
    n: Option<usize>,
    /// Target SNR in dB [default: 2.06]
    #[arg(long = "snr-db")]
    snr_db: Option<f64>,
    /// RNG seed [default: 0]
    #[arg(long)]
    seed: Option<u64>,
    /// Output path for the clean matrix
    #[arg(long = "out-clean")]
    out_clean: Option<PathBuf>,
    /// Output path for the noisy matrix
    #[arg(long = "out-noisy")]
    out_noisy: Option<PathBuf>,
    /// Matrix format: fgm (binary) or csv [default: fgm]
    #[arg(long)]
    format: Option<String>,
    /// key=value config file (flags take precedence)
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct ClusterCli {
    /// rena, single, ward, or downsample
    #[arg(long)]
    method: Option<String>,
    /// Input data matrix (FGM1 binary or CSV)
    #[arg(long)]
    data: Option<PathBuf>,
    /// Lattice dims defining the structure graph
    #[arg(long)]
    dims: Option<String>,
    /// Explicit edge-list graph file (overrides --dims)
    #[arg(long)]
    graph: Option<PathBuf>,
    /// Number of clusters
    #[arg(long)]
    k: Option<usize>,
    /// RNG seed [default: 0]
    #[arg(long)]
    seed: Option<u64>,
    /// Output partition file
    #[arg(long)]
    out: Option<PathBuf>,
    /// Optional JSON trace output
    #[arg(long)]
    trace: Option<PathBuf>,
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct BenchDistortionCli {
    /// Comma-separated methods, e.g. rena,single,ward,downsample,nystrom,rp
    #[arg(long)]
    methods: Option<String>,
    /// Comma-separated reduction fractions, e.g. 0.05,0.1 [default: 0.05]
    #[arg(long = "k-fracs")]
    k_fracs: Option<String>,
    /// Clean matrix path
    #[arg(long)]
    clean: Option<PathBuf>,
    /// Noisy matrix path
    #[arg(long)]
    noisy: Option<PathBuf>,
    #[arg(long)]
    dims: Option<String>,
    #[arg(long)]
    graph: Option<PathBuf>,
    /// Split repeats [default: 1]
    #[arg(long)]
    repeats: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output CSV (appended if it exists)
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct BenchPercolationCli {
    #[arg(long)]
    methods: Option<String>,
    #[arg(long = "k-fracs")]
    k_fracs: Option<String>,
    /// Data matrix to cluster
    #[arg(long)]
    data: Option<PathBuf>,
    #[arg(long)]
    dims: Option<String>,
    #[arg(long)]
    graph: Option<PathBuf>,
    #[arg(long)]
    repeats: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct BenchTimeCli {
    /// Semicolon-separated dims grid [default: 8,8,8;16,16,16;32,32,32]
    #[arg(long = "dims-grid")]
    dims_grid: Option<String>,
    /// Methods to time [default: rena]
    #[arg(long)]
    methods: Option<String>,
    /// Timing repeats per point [default: 10]
    #[arg(long)]
    repeats: Option<usize>,
    /// Samples per synthetic cube [default: 10]
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    fwhm: Option<f64>,
    #[arg(long = "snr-db")]
    snr_db: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    config: Option<PathBuf>,
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.cmd {
        Cmd::Synth(a) => {
            let cfg = Config::load(a.config.as_deref())?;
            let args = commands::SynthArgs {
                dims: require(
                    resolve_with(
                        a.dims.as_deref().map(parse_dims).transpose().map_err(CliError::Usage)?,
                        &cfg,
                        "dims",
                        parse_dims,
                    )?,
                    "dims",
                )?,
                fwhm: resolve(a.fwhm, &cfg, "fwhm")?.unwrap_or(8.0),
                n: resolve(a.n, &cfg, "n")?.unwrap_or(100),
                snr_db: resolve(a.snr_db, &cfg, "snr-db")?.unwrap_or(2.06),
                seed: resolve(a.seed, &cfg, "seed")?.unwrap_or(0),
                out_clean: require(resolve(a.out_clean, &cfg, "out-clean")?, "out-clean")?,
                out_noisy: require(resolve(a.out_noisy, &cfg, "out-noisy")?, "out-noisy")?,
                format: resolve_with(
                    a.format
                        .as_deref()
                        .map(MatrixFormat::parse)
                        .transpose()
                        .map_err(CliError::Usage)?,
                    &cfg,
                    "format",
                    MatrixFormat::parse,
                )?
                .unwrap_or(MatrixFormat::Fgm),
            };
            commands::run_synth(&args)
        }
        Cmd::Cluster(a) => {
            let cfg = Config::load(a.config.as_deref())?;
            let args = commands::ClusterArgs {
                method: require(
                    resolve_with(
                        a.method
                            .as_deref()
                            .map(Method::parse)
                            .transpose()
                            .map_err(CliError::Usage)?,
                        &cfg,
                        "method",
                        Method::parse,
                    )?,
                    "method",
                )?,
                data: require(resolve(a.data, &cfg, "data")?, "data")?,
                dims: resolve_with(
                    a.dims.as_deref().map(parse_dims).transpose().map_err(CliError::Usage)?,
                    &cfg,
                    "dims",
                    parse_dims,
                )?,
                graph: resolve(a.graph, &cfg, "graph")?,
                k: require(resolve(a.k, &cfg, "k")?, "k")?,
                seed: resolve(a.seed, &cfg, "seed")?.unwrap_or(0),
                out: require(resolve(a.out, &cfg, "out")?, "out")?,
                trace: resolve(a.trace, &cfg, "trace")?,
            };
            commands::run_cluster(&args)
        }
        Cmd::BenchDistortion(a) => {
            let cfg = Config::load(a.config.as_deref())?;
            let args = commands::BenchDistortionArgs {
                methods: require(
                    resolve_with(
                        a.methods
                            .as_deref()
                            .map(parse_methods)
                            .transpose()
                            .map_err(CliError::Usage)?,
                        &cfg,
                        "methods",
                        parse_methods,
                    )?,
                    "methods",
                )?,
                k_fracs: resolve_with(
                    a.k_fracs
                        .as_deref()
                        .map(parse_fracs)
                        .transpose()
                        .map_err(CliError::Usage)?,
                    &cfg,
                    "k-fracs",
                    parse_fracs,
                )?
                .unwrap_or_else(|| vec![0.05]),
                clean: require(resolve(a.clean, &cfg, "clean")?, "clean")?,
                noisy: require(resolve(a.noisy, &cfg, "noisy")?, "noisy")?,
                dims: resolve_with(
                    a.dims.as_deref().map(parse_dims).transpose().map_err(CliError::Usage)?,
                    &cfg,
                    "dims",
                    parse_dims,
                )?,
                graph: resolve(a.graph, &cfg, "graph")?,
                repeats: resolve(a.repeats, &cfg, "repeats")?.unwrap_or(1),
                seed: resolve(a.seed, &cfg, "seed")?.unwrap_or(0),
                out: require(resolve(a.out, &cfg, "out")?, "out")?,
            };
            commands::run_bench_distortion(&args)
        }
        Cmd::BenchPercolation(a) => {
            let cfg = Config::load(a.config.as_deref())?;
            let args = commands::BenchPercolationArgs {
                methods: require(
                    resolve_with(
                        a.methods
                            .as_deref()
                            .map(parse_methods)
                            .transpose()
                            .map_err(CliError::Usage)?,
                        &cfg,
                        "methods",
                        parse_methods,
                    )?,
                    "methods",
                )?,
                k_fracs: resolve_with(
                    a.k_fracs
                        .as_deref()
                        .map(parse_fracs)
                        .transpose()
                        .map_err(CliError::Usage)?,
                    &cfg,
                    "k-fracs",
                    parse_fracs,
                )?
                .unwrap_or_else(|| vec![0.05]),
                data: require(resolve(a.data, &cfg, "data")?, "data")?,
                dims: resolve_with(
                    a.dims.as_deref().map(parse_dims).transpose().map_err(CliError::Usage)?,
                    &cfg,
                    "dims",
                    parse_dims,
                )?,
                graph: resolve(a.graph, &cfg, "graph")?,
                repeats: resolve(a.repeats, &cfg, "repeats")?.unwrap_or(1),
                seed: resolve(a.seed, &cfg, "seed")?.unwrap_or(0),
                out: require(resolve(a.out, &cfg, "out")?, "out")?,
            };
            commands::run_bench_percolation(&args)
        }
        Cmd::BenchTime(a) => {
            let cfg = Config::load(a.config.as_deref())?;
            let args = commands::BenchTimeArgs {
                dims_grid: resolve_with(
                    a.dims_grid
                        .as_deref()
                        .map(parse_dims_grid)
                        .transpose()
                        .map_err(CliError::Usage)?,
                    &cfg,
                    "dims-grid",
                    parse_dims_grid,
                )?
                .unwrap_or_else(|| vec![vec![8, 8, 8], vec![16, 16, 16], vec![32, 32, 32]]),
                methods: resolve_with(
                    a.methods
                        .as_deref()
                        .map(parse_methods)
                        .transpose()
                        .map_err(CliError::Usage)?,
                    &cfg,
                    "methods",
                    parse_methods,
                )?
                .unwrap_or_else(|| vec![Method::Rena]),
                repeats: resolve(a.repeats, &cfg, "repeats")?.unwrap_or(10),
                n: resolve(a.n, &cfg, "n")?.unwrap_or(10),
                fwhm: resolve(a.fwhm, &cfg, "fwhm")?.unwrap_or(8.0),
                snr_db: resolve(a.snr_db, &cfg, "snr-db")?.unwrap_or(2.06),
                seed: resolve(a.seed, &cfg, "seed")?.unwrap_or(0),
                out: require(resolve(a.out, &cfg, "out")?, "out")?,
            };
            commands::run_bench_time(&args)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Run(err)) => {
            eprintln!("error: {err}");
            ExitCode::from(1)
        }
    }
}
