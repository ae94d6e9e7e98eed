//! Command implementations. Each takes fully-resolved arguments and returns
//! a [`CliResult`]; the binary maps errors to exit codes.

use std::fs::OpenOptions;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rena_core::graph::{build_lattice_graph, StructureGraph};
use rena_core::io;
use rena_core::matrix::DataMatrix;
use rena_core::metrics::{distortion_protocol, percolation_stats};
use rena_core::rena::rena;
use rena_core::synthdata::{measured_snr, synthetic_set};

use crate::methods::{fit_partition, fit_reducer, Method};
use crate::{CliError, CliResult};

/// Thread CPU clock: immune to scheduler steal, but coarse (jiffy
/// resolution on older kernels), so it is only read across batches that run
/// long enough to swamp the granularity.
pub fn thread_cpu_seconds() -> f64 {
    let mut ts = libc::timespec {
        tv_sec: 0,
        tv_nsec: 0,
    };
    // SAFETY: clock_gettime writes the passed timespec and nothing else.
    unsafe {
        libc::clock_gettime(libc::CLOCK_THREAD_CPUTIME_ID, &mut ts);
    }
    ts.tv_sec as f64 + ts.tv_nsec as f64 * 1e-9
}

/// Minimum CPU time one timing batch must accumulate before the per-fit
/// average is trusted.
const TIMING_BATCH_CPU_SECONDS: f64 = 0.1;
const TIMING_BATCH_MAX_FITS: usize = 1000;

pub const DISTORTION_CSV_HEADER: &str = "method,k_fraction,repeat,rd_db,fit_seconds";
pub const PERCOLATION_CSV_HEADER: &str =
    "method,k_fraction,repeat,k,largest_cluster_size,largest_fraction";
pub const TIME_CSV_HEADER: &str = "method,p,k,repeat,fit_seconds";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatrixFormat {
    Fgm,
    Csv,
}

impl MatrixFormat {
    pub fn parse(s: &str) -> Result<MatrixFormat, String> {
        match s {
            "fgm" => Ok(MatrixFormat::Fgm),
            "csv" => Ok(MatrixFormat::Csv),
            other => Err(format!("unknown matrix format `{other}` (fgm or csv)")),
        }
    }
}

/// Read a matrix in either format, sniffing the binary magic.
pub fn read_matrix_auto(path: &Path) -> CliResult<DataMatrix> {
    let bytes = std::fs::read(path)?;
    if bytes.starts_with(io::MATRIX_MAGIC) {
        Ok(io::decode_matrix(&bytes)?)
    } else {
        let text = String::from_utf8(bytes).map_err(|_| {
            CliError::Run(rena_core::Error::InvalidArgument(format!(
                "{} is neither a FGM1 file nor text CSV",
                path.display()
            )))
        })?;
        Ok(io::decode_matrix_csv(&text)?)
    }
}

/// Structure graph from either an explicit edge-list file or lattice dims.
pub fn load_graph(
    graph_path: Option<&Path>,
    dims: Option<&[usize]>,
) -> CliResult<StructureGraph> {
    match (graph_path, dims) {
        (Some(path), _) => Ok(io::read_graph(path)?),
        (None, Some(dims)) => Ok(build_lattice_graph(dims)?),
        (None, None) => Err(CliError::Usage(
            "need either --graph or --dims to define the structure".into(),
        )),
    }
}

/// Append rows to a CSV file, writing the header only when the file is new
/// or empty.
fn append_csv(path: &Path, header: &str, rows: &[String]) -> CliResult<()> {
    let needs_header = match std::fs::metadata(path) {
        Ok(meta) => meta.len() == 0,
        Err(_) => true,
    };
    let mut file = OpenOptions::new().create(true).append(true).open(path)?;
    if needs_header {
        writeln!(file, "{header}")?;
    }
    for row in rows {
        writeln!(file, "{row}")?;
    }
    Ok(())
}

// ---------------------------------------------------------------- synth

#[derive(Debug, Clone)]
pub struct SynthArgs {
    pub dims: Vec<usize>,
    pub fwhm: f64,
    pub n: usize,
    pub snr_db: f64,
    pub seed: u64,
    pub out_clean: PathBuf,
    pub out_noisy: PathBuf,
    pub format: MatrixFormat,
}

pub fn run_synth(args: &SynthArgs) -> CliResult<()> {
    let set = synthetic_set(&args.dims, args.fwhm, args.n, args.snr_db, args.seed)?;
    match args.format {
        MatrixFormat::Fgm => {
            io::write_matrix(&set.clean, &args.out_clean)?;
            io::write_matrix(&set.noisy, &args.out_noisy)?;
        }
        MatrixFormat::Csv => {
            io::write_matrix_csv(&set.clean, &args.out_clean)?;
            io::write_matrix_csv(&set.noisy, &args.out_noisy)?;
        }
    }
    let diff: Vec<f64> = set
        .noisy
        .values()
        .iter()
        .zip(set.clean.values())
        .map(|(x, s)| x - s)
        .collect();
    let noise = DataMatrix::from_vec(set.clean.p(), set.clean.n(), diff)?;
    let snr = measured_snr(&set.clean, &noise)?;
    println!(
        "p={} n={} sigma={:.6} measured_snr_db={:.4}",
        set.clean.p(),
        set.clean.n(),
        set.noise.sigma,
        snr
    );
    Ok(())
}

// -------------------------------------------------------------- cluster

#[derive(Debug, Clone)]
pub struct ClusterArgs {
    pub method: Method,
    pub data: PathBuf,
    pub dims: Option<Vec<usize>>,
    pub graph: Option<PathBuf>,
    pub k: usize,
    pub seed: u64,
    pub out: PathBuf,
    pub trace: Option<PathBuf>,
}

pub fn run_cluster(args: &ClusterArgs) -> CliResult<()> {
    if !args.method.is_clustering() {
        return Err(CliError::Usage(format!(
            "method {} does not produce a partition; use a bench command",
            args.method.name()
        )));
    }
    let x = read_matrix_auto(&args.data)?;
    let g = load_graph(args.graph.as_deref(), args.dims.as_deref())?;
    if g.p() != x.p() {
        return Err(CliError::Run(rena_core::Error::DimensionMismatch(format!(
            "data has p={} but structure has p={}",
            x.p(),
            g.p()
        ))));
    }

    let started = Instant::now();
    let (partition, trace_json) = match args.method {
        Method::Rena => {
            let (part, trace) = rena(&x, &g, args.k)?;
            let json = serde_json::json!({
                "method": "rena",
                "p": part.p(),
                "k": part.k(),
                "iterations": trace.iterations,
                "cluster_counts": trace.cluster_counts,
                "pruned_edges": trace.pruned_edges,
            });
            (part, json)
        }
        method => {
            let part = fit_partition(method, &x, &g, args.dims.as_deref(), args.k)?;
            let json = serde_json::json!({
                "method": method.name(),
                "p": part.p(),
                "k": part.k(),
            });
            (part, json)
        }
    };
    let fit_seconds = started.elapsed().as_secs_f64();

    io::write_partition(&partition, &args.out)?;
    if let Some(trace_path) = &args.trace {
        std::fs::write(trace_path, format!("{:#}\n", trace_json))?;
    }
    println!(
        "method={} p={} k={}",
        args.method.name(),
        partition.p(),
        partition.k()
    );
    eprintln!("fit_seconds={fit_seconds:.6}");
    Ok(())
}

// ------------------------------------------------------ bench-distortion

#[derive(Debug, Clone)]
pub struct BenchDistortionArgs {
    pub methods: Vec<Method>,
    pub k_fracs: Vec<f64>,
    pub clean: PathBuf,
    pub noisy: PathBuf,
    pub dims: Option<Vec<usize>>,
    pub graph: Option<PathBuf>,
    pub repeats: usize,
    pub seed: u64,
    pub out: PathBuf,
}

pub fn run_bench_distortion(args: &BenchDistortionArgs) -> CliResult<()> {
    let clean = read_matrix_auto(&args.clean)?;
    let noisy = read_matrix_auto(&args.noisy)?;
    let g = load_graph(args.graph.as_deref(), args.dims.as_deref())?;
    let n_train = noisy.n() - noisy.n() / 2;

    let mut rows = Vec::new();
    for &method in &args.methods {
        for &frac in &args.k_fracs {
            let k = method.k_from_fraction(frac, g.p(), n_train);
            for repeat in 0..args.repeats {
                let split_seed = args.seed.wrapping_add(repeat as u64);
                let fit_seed = args.seed.wrapping_add(repeat as u64);
                let fit_time = std::cell::Cell::new(0.0f64);
                let dims = args.dims.as_deref();
                let fitter = |x_train: &DataMatrix| {
                    let t0 = Instant::now();
                    let model = fit_reducer(method, x_train, &g, dims, k, fit_seed)
                        .map_err(cli_to_core)?;
                    fit_time.set(t0.elapsed().as_secs_f64());
                    Ok(model)
                };
                let report = distortion_protocol(&clean, &noisy, fitter, split_seed)?;
                rows.push(format!(
                    "{},{},{},{:.6},{:.6}",
                    method.name(),
                    frac,
                    repeat,
                    report.rd_db,
                    fit_time.get()
                ));
            }
        }
    }
    append_csv(&args.out, DISTORTION_CSV_HEADER, &rows)?;
    println!("wrote {} rows to {}", rows.len(), args.out.display());
    Ok(())
}

/// Fitters inside the protocol return core errors; usage problems at this
/// point are morphed into invalid-argument runtime errors.
fn cli_to_core(err: CliError) -> rena_core::Error {
    match err {
        CliError::Run(e) => e,
        CliError::Usage(msg) => rena_core::Error::InvalidArgument(msg),
    }
}

// ----------------------------------------------------- bench-percolation

#[derive(Debug, Clone)]
pub struct BenchPercolationArgs {
    pub methods: Vec<Method>,
    pub k_fracs: Vec<f64>,
    pub data: PathBuf,
    pub dims: Option<Vec<usize>>,
    pub graph: Option<PathBuf>,
    pub repeats: usize,
    pub seed: u64,
    pub out: PathBuf,
}

pub fn run_bench_percolation(args: &BenchPercolationArgs) -> CliResult<()> {
    if let Some(m) = args.methods.iter().find(|m| !m.is_clustering()) {
        return Err(CliError::Usage(format!(
            "method {} does not produce a partition, so it has no percolation curve",
            m.name()
        )));
    }
    let x = read_matrix_auto(&args.data)?;
    let g = load_graph(args.graph.as_deref(), args.dims.as_deref())?;

    let mut rows = Vec::new();
    for &method in &args.methods {
        for &frac in &args.k_fracs {
            let k = method.k_from_fraction(frac, g.p(), x.n());
            for repeat in 0..args.repeats {
                let part = fit_partition(method, &x, &g, args.dims.as_deref(), k)?;
                let report = percolation_stats(&part);
                rows.push(format!(
                    "{},{},{},{},{},{:.6}",
                    method.name(),
                    frac,
                    repeat,
                    report.k,
                    report.largest_cluster_size,
                    report.largest_fraction
                ));
            }
        }
    }
    append_csv(&args.out, PERCOLATION_CSV_HEADER, &rows)?;
    println!("wrote {} rows to {}", rows.len(), args.out.display());
    Ok(())
}

// ------------------------------------------------------------ bench-time

#[derive(Debug, Clone)]
pub struct BenchTimeArgs {
    pub dims_grid: Vec<Vec<usize>>,
    pub methods: Vec<Method>,
    pub repeats: usize,
    pub n: usize,
    pub fwhm: f64,
    pub snr_db: f64,
    pub seed: u64,
    pub out: PathBuf,
}

pub fn run_bench_time(args: &BenchTimeArgs) -> CliResult<()> {
    // generate all datasets up front; only fits are timed
    let mut prepared = Vec::with_capacity(args.dims_grid.len());
    for dims in &args.dims_grid {
        let set = synthetic_set(dims, args.fwhm, args.n, args.snr_db, args.seed)?;
        let g = build_lattice_graph(dims)?;
        prepared.push((dims.clone(), set, g));
    }

    // Repeats on the OUTER loop so every (size, method) pair is sampled
    // across the whole run. Each row reports CPU seconds per fit, averaged
    // over an inner batch that runs long enough to swamp both the CPU-clock
    // granularity and scheduler steal; the fit is re-run from scratch each
    // inner iteration.
    let mut rows = Vec::new();
    for repeat in 0..args.repeats {
        for (dims, set, g) in &prepared {
            let p = g.p();
            for &method in &args.methods {
                let k = if method == Method::Nystrom {
                    (args.n / 10).max(1)
                } else {
                    (p / 20).max(1)
                };
                let t0 = thread_cpu_seconds();
                let mut fits = 0usize;
                let fit_seconds = loop {
                    let model = fit_reducer(method, &set.noisy, g, Some(dims), k, args.seed)?;
                    let _ = model;
                    fits += 1;
                    let elapsed = thread_cpu_seconds() - t0;
                    if elapsed >= TIMING_BATCH_CPU_SECONDS || fits >= TIMING_BATCH_MAX_FITS {
                        break elapsed / fits as f64;
                    }
                };
                rows.push(format!(
                    "{},{},{},{},{:.9}",
                    method.name(),
                    p,
                    k,
                    repeat,
                    fit_seconds
                ));
            }
        }
    }
    append_csv(&args.out, TIME_CSV_HEADER, &rows)?;
    println!("wrote {} rows to {}", rows.len(), args.out.display());
    Ok(())
}
