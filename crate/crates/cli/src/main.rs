//! Command-line harness for dicore: counting, sampling, connectivity
//! checks, peeling, thresholds, and reproducible Monte Carlo experiments.
//!
//! Exit codes: 0 success, 1 usage error, 2 precondition/domain error,
//! 3 brute-force guard refusal.

use std::fs;
use std::io::{BufReader, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use dicore::asymptotics::{
    bound_diagnostics, dicore_count_asymptotic_with_eps, scan_negativity,
    scc_core_count_11_with_guard, BoundDiagnostics, NegativityReport, DEFAULT_C11_GUARD_COEFF,
    DEFAULT_DENSITY_EPS,
};
use dicore::core_threshold::{c_star, peel_core, peel_core_traced, threshold_experiment};
use dicore::exact_enumeration::{
    brute_force_sequence_count, sequence_count, sequence_count_ln, SequencePredicate,
};
use dicore::experiments::{
    connectivity_experiment, connectivity_rows_csv, experiment_records_csv, ConnectivityConfig,
    ExperimentRecord, THREADS_ENV,
};
use dicore::graph_analysis::is_k_strongly_connected;
use dicore::sampler::{replica_rng, sample_simple_dicore, DEFAULT_SIMPLE_ATTEMPTS};
use dicore::LabeledMultiDigraph;

const EXIT_USAGE: i32 = 1;
const EXIT_PRECONDITION: i32 = 2;
const EXIT_GUARD: i32 = 3;

struct CliError {
    code: i32,
    message: String,
}

impl CliError {
    fn usage(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }
}

impl From<dicore::Error> for CliError {
    fn from(e: dicore::Error) -> Self {
        let code = match e {
            dicore::Error::Guard { .. } => EXIT_GUARD,
            _ => EXIT_PRECONDITION,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        Self {
            code: EXIT_PRECONDITION,
            message: e.to_string(),
        }
    }
}

type CliResult<T> = Result<T, CliError>;

#[derive(Parser)]
#[command(
    name = "dicore",
    version,
    about = "Count, sample, and analyze (k1,k2)-directed cores"
)]
struct Cli {
    /// JSON config file supplying defaults; explicit flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Worker-pool cap for experiments (also honored via DICORE_THREADS).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Exact number of admissible sequences (sequence-model count).
    CountExact(CountExactArgs),
    /// Asymptotic dicore count in log scale with component breakdown.
    CountAsym(CountAsymArgs),
    /// Asymptotic count of strongly connected (1,1)-cores.
    C11(C11Args),
    /// Sample a uniform simple (k1,k2)-dicore and emit its edge list.
    Sample(SampleArgs),
    /// Strong/k-strong connectivity verdict for an edge-list file.
    Check(CheckArgs),
    /// Peel an edge-list file down to its (k1,k2)-core.
    Peel(PeelArgs),
    /// Core-emergence threshold c*(k1,k2).
    Cstar(CstarArgs),
    /// Monte Carlo connectivity fractions of uniform simple dicores.
    ConnectivityExperiment(ConnectivityArgs),
    /// Peeling experiments on random multi-digraphs over a density list.
    ThresholdExperiment(ThresholdArgs),
    /// Bound diagnostics H, K, rho*, u_min and negativity scans.
    Diagnostics(DiagnosticsArgs),
}

/// Optional values shared with the JSON config file; any flag left unset
/// falls back to the file, then to the command's default (if one exists).
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    command: Option<String>,
    k1: Option<usize>,
    k2: Option<usize>,
    k: Option<usize>,
    n: Option<usize>,
    m: Option<usize>,
    n_list: Option<Vec<usize>>,
    c_list: Option<Vec<f64>>,
    density: Option<f64>,
    reps: Option<usize>,
    seed: Option<u64>,
    threads: Option<usize>,
    eps: Option<f64>,
    guard_coeff: Option<f64>,
    sigma: Option<f64>,
    rho: Option<f64>,
    step: Option<f64>,
    max_attempts: Option<u64>,
    check_connectivity: Option<bool>,
    trace: Option<bool>,
    input: Option<PathBuf>,
    out: Option<PathBuf>,
    out_csv: Option<PathBuf>,
    out_json: Option<PathBuf>,
}

fn load_config(path: &Option<PathBuf>) -> CliResult<FileConfig> {
    match path {
        None => Ok(FileConfig::default()),
        Some(p) => {
            let text = fs::read_to_string(p)
                .map_err(|e| CliError::usage(format!("cannot read config {}: {e}", p.display())))?;
            serde_json::from_str(&text)
                .map_err(|e| CliError::usage(format!("bad config {}: {e}", p.display())))
        }
    }
}

fn require<T>(flag: Option<T>, file: Option<T>, name: &str) -> CliResult<T> {
    flag.or(file)
        .ok_or_else(|| CliError::usage(format!("missing required value `{name}` (flag or config)")))
}

fn pick<T>(flag: Option<T>, file: Option<T>, default: T) -> T {
    flag.or(file).unwrap_or(default)
}

fn write_or_stdout(path: &Option<PathBuf>, contents: &str) -> CliResult<()> {
    match path {
        Some(p) => {
            fs::write(p, contents)?;
            Ok(())
        }
        None => {
            print!("{contents}");
            std::io::stdout().flush()?;
            Ok(())
        }
    }
}

fn write_json<T: Serialize>(path: &Option<PathBuf>, value: &T) -> CliResult<()> {
    if let Some(p) = path {
        fs::write(
            p,
            serde_json::to_string_pretty(value).expect("serializable"),
        )?;
    }
    Ok(())
}

fn read_graph(path: &Path) -> CliResult<(LabeledMultiDigraph, usize, usize)> {
    let file = fs::File::open(path)?;
    Ok(LabeledMultiDigraph::read_edge_list(BufReader::new(file))?)
}

#[derive(Args)]
struct CountExactArgs {
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    k1: Option<usize>,
    #[arg(long)]
    k2: Option<usize>,
    /// Print the natural log via the floating-point fast path instead of
    /// the exact integer.
    #[arg(long)]
    ln: bool,
    /// Cross-check by exhaustive enumeration (guarded; tiny sizes only).
    #[arg(long)]
    brute: bool,
}

fn run_count_exact(a: CountExactArgs, file: FileConfig) -> CliResult<()> {
    let n = require(a.n, file.n, "n")?;
    let m = require(a.m, file.m, "m")?;
    let k1 = require(a.k1, file.k1, "k1")?;
    let k2 = require(a.k2, file.k2, "k2")?;
    if a.brute {
        let count = brute_force_sequence_count(n, m, k1, k2, SequencePredicate::All)?;
        println!("{count}");
    } else if a.ln {
        println!("{}", sequence_count_ln(n, m, k1, k2));
    } else {
        println!("{}", sequence_count(n, m, k1, k2));
    }
    Ok(())
}

#[derive(Args)]
struct CountAsymArgs {
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    k1: Option<usize>,
    #[arg(long)]
    k2: Option<usize>,
    /// Density slack for the M/N >= max(k1,k2) + eps guard.
    #[arg(long)]
    eps: Option<f64>,
}

fn run_count_asym(a: CountAsymArgs, file: FileConfig) -> CliResult<()> {
    let n = require(a.n, file.n, "n")?;
    let m = require(a.m, file.m, "m")?;
    let k1 = require(a.k1, file.k1, "k1")?;
    let k2 = require(a.k2, file.k2, "k2")?;
    let eps = pick(a.eps, file.eps, DEFAULT_DENSITY_EPS);
    let count = dicore_count_asymptotic_with_eps(n, m, k1, k2, eps)?;
    println!(
        "{}",
        serde_json::to_string_pretty(&count).expect("serializable")
    );
    Ok(())
}

#[derive(Args)]
struct C11Args {
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    m: Option<usize>,
    /// Coefficient c in the guard M - N >= c * N^(2/3).
    #[arg(long)]
    guard_coeff: Option<f64>,
}

fn run_c11(a: C11Args, file: FileConfig) -> CliResult<()> {
    let n = require(a.n, file.n, "n")?;
    let m = require(a.m, file.m, "m")?;
    let coeff = pick(a.guard_coeff, file.guard_coeff, DEFAULT_C11_GUARD_COEFF);
    let count = scc_core_count_11_with_guard(n, m, coeff)?;
    println!(
        "{}",
        serde_json::to_string_pretty(&count).expect("serializable")
    );
    Ok(())
}

#[derive(Args)]
struct SampleArgs {
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    k1: Option<usize>,
    #[arg(long)]
    k2: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    max_attempts: Option<u64>,
    /// Write the edge list here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn run_sample(a: SampleArgs, file: FileConfig) -> CliResult<()> {
    let n = require(a.n, file.n, "n")?;
    let m = require(a.m, file.m, "m")?;
    let k1 = require(a.k1, file.k1, "k1")?;
    let k2 = require(a.k2, file.k2, "k2")?;
    let seed = require(a.seed, file.seed, "seed")?;
    let max_attempts = pick(a.max_attempts, file.max_attempts, DEFAULT_SIMPLE_ATTEMPTS);
    let mut rng = replica_rng(seed, 0);
    let (g, attempts) = sample_simple_dicore(n, m, k1, k2, &mut rng, max_attempts)?;
    let mut buf = Vec::new();
    g.write_edge_list(&mut buf, k1, k2)?;
    let text = String::from_utf8(buf).expect("ascii edge list");
    write_or_stdout(&a.out.or(file.out), &text)?;
    eprintln!("accepted after {attempts} sequence draws");
    Ok(())
}

#[derive(Args)]
struct CheckArgs {
    /// Edge-list file (header `dicore N M k1 k2`).
    #[arg(long)]
    input: Option<PathBuf>,
    /// Connectivity order to test; defaults to max(1, min(k1,k2)) from the
    /// file header.
    #[arg(long)]
    k: Option<usize>,
}

fn run_check(a: CheckArgs, file: FileConfig) -> CliResult<()> {
    let input = require(a.input, file.input, "input")?;
    let (g, k1, k2) = read_graph(&input)?;
    let k = pick(a.k, file.k, k1.min(k2).max(1));
    let verdict = is_k_strongly_connected(&g, k)?;
    println!(
        "{}",
        serde_json::to_string_pretty(&verdict).expect("serializable")
    );
    Ok(())
}

#[derive(Args)]
struct PeelArgs {
    #[arg(long)]
    input: Option<PathBuf>,
    /// Cutoffs; default to the file header's k1, k2.
    #[arg(long)]
    k1: Option<usize>,
    #[arg(long)]
    k2: Option<usize>,
    /// Delete uniformly random light vertices and record a trace
    /// (requires --seed).
    #[arg(long)]
    trace: bool,
    #[arg(long)]
    seed: Option<u64>,
    /// Write the relabeled core as an edge list here.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Serialize)]
struct PeelSummary {
    k1: usize,
    k2: usize,
    core_vertices: Vec<usize>,
    core_size: usize,
    core_edges: usize,
    rounds: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    trace: Option<Vec<(usize, dicore::core_threshold::LightReason)>>,
}

fn run_peel(a: PeelArgs, file: FileConfig) -> CliResult<()> {
    let input = require(a.input, file.input, "input")?;
    let (g, header_k1, header_k2) = read_graph(&input)?;
    let k1 = pick(a.k1, file.k1, header_k1);
    let k2 = pick(a.k2, file.k2, header_k2);
    let trace = a.trace || file.trace.unwrap_or(false);
    let result = if trace {
        let seed = require(a.seed, file.seed, "seed")?;
        let mut rng = replica_rng(seed, 0);
        peel_core_traced(&g, k1, k2, &mut rng)
    } else {
        peel_core(&g, k1, k2)
    };
    if let Some(out) = a.out.or(file.out) {
        let (core, _) = g.induced_subgraph(&result.core_vertices);
        let f = fs::File::create(out)?;
        core.write_edge_list(f, k1, k2)?;
    }
    let summary = PeelSummary {
        k1,
        k2,
        core_size: result.core_vertices.len(),
        core_vertices: result.core_vertices,
        core_edges: result.core_edges,
        rounds: result.rounds,
        trace: result.trace,
    };
    println!(
        "{}",
        serde_json::to_string_pretty(&summary).expect("serializable")
    );
    Ok(())
}

#[derive(Args)]
struct CstarArgs {
    #[arg(long)]
    k1: Option<usize>,
    #[arg(long)]
    k2: Option<usize>,
}

fn run_cstar(a: CstarArgs, file: FileConfig) -> CliResult<()> {
    let k1 = require(a.k1, file.k1, "k1")?;
    let k2 = require(a.k2, file.k2, "k2")?;
    let result = c_star(k1, k2)?;
    println!(
        "{}",
        serde_json::to_string_pretty(&result).expect("serializable")
    );
    Ok(())
}

#[derive(Args)]
struct ConnectivityArgs {
    #[arg(long)]
    k1: Option<usize>,
    #[arg(long)]
    k2: Option<usize>,
    /// Comma-separated list of vertex counts.
    #[arg(long, value_delimiter = ',')]
    n_list: Option<Vec<usize>>,
    /// Edge density: M = ceil(density * N).
    #[arg(long)]
    density: Option<f64>,
    #[arg(long)]
    reps: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    max_attempts: Option<u64>,
    #[arg(long)]
    out_csv: Option<PathBuf>,
    #[arg(long)]
    out_json: Option<PathBuf>,
}

fn run_connectivity(a: ConnectivityArgs, file: FileConfig) -> CliResult<()> {
    let mut config = ConnectivityConfig::new(
        require(a.k1, file.k1, "k1")?,
        require(a.k2, file.k2, "k2")?,
        require(a.n_list, file.n_list, "n_list")?,
        require(a.density, file.density, "density")?,
        require(a.reps, file.reps, "reps")?,
        require(a.seed, file.seed, "seed")?,
    );
    config.max_attempts = pick(a.max_attempts, file.max_attempts, config.max_attempts);
    let report = connectivity_experiment(&config)?;
    write_or_stdout(&a.out_csv.or(file.out_csv), &connectivity_rows_csv(&report))?;
    write_json(&a.out_json.or(file.out_json), &report)?;
    match report.non_sc_slope {
        Some(slope) => eprintln!("fitted non-SC log-log slope: {slope:.4}"),
        None => {
            eprintln!("fitted non-SC log-log slope: undefined (fewer than two positive fractions)")
        }
    }
    Ok(())
}

#[derive(Args)]
struct ThresholdArgs {
    #[arg(long)]
    k1: Option<usize>,
    #[arg(long)]
    k2: Option<usize>,
    /// Comma-separated densities c; each replica uses m = floor(c * n).
    #[arg(long, value_delimiter = ',')]
    c_list: Option<Vec<f64>>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    reps: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Also run strong / min(k1,k2)-strong checks on nonempty cores.
    #[arg(long)]
    check_connectivity: bool,
    #[arg(long)]
    out_csv: Option<PathBuf>,
    #[arg(long)]
    out_json: Option<PathBuf>,
}

#[derive(Serialize)]
struct ThresholdSummary {
    k1: usize,
    k2: usize,
    n: usize,
    reps: usize,
    seed: u64,
    per_c: Vec<ThresholdAggregate>,
    records: Vec<ExperimentRecord>,
}

#[derive(Serialize)]
struct ThresholdAggregate {
    c: f64,
    empty_fraction: f64,
    mean_core_vertices: f64,
    mean_core_edges: f64,
    strongly_connected_fraction: Option<f64>,
    k_strong_fraction: Option<f64>,
}

fn aggregate(records: &[ExperimentRecord], c: f64) -> ThresholdAggregate {
    let block: Vec<&ExperimentRecord> = records.iter().filter(|r| r.c == c).collect();
    let len = block.len() as f64;
    let frac_of = |f: &dyn Fn(&ExperimentRecord) -> Option<bool>| {
        let checked: Vec<bool> = block.iter().filter_map(|r| f(r)).collect();
        if checked.is_empty() {
            None
        } else {
            Some(checked.iter().filter(|&&b| b).count() as f64 / checked.len() as f64)
        }
    };
    ThresholdAggregate {
        c,
        empty_fraction: block.iter().filter(|r| r.core_vertices == 0).count() as f64 / len,
        mean_core_vertices: block.iter().map(|r| r.core_vertices as f64).sum::<f64>() / len,
        mean_core_edges: block.iter().map(|r| r.core_edges as f64).sum::<f64>() / len,
        strongly_connected_fraction: frac_of(&|r| r.strongly_connected),
        k_strong_fraction: frac_of(&|r| r.k_strong),
    }
}

fn run_threshold(a: ThresholdArgs, file: FileConfig) -> CliResult<()> {
    let k1 = require(a.k1, file.k1, "k1")?;
    let k2 = require(a.k2, file.k2, "k2")?;
    let c_list = require(a.c_list, file.c_list, "c_list")?;
    let n = require(a.n, file.n, "n")?;
    let reps = require(a.reps, file.reps, "reps")?;
    let seed = require(a.seed, file.seed, "seed")?;
    let check = a.check_connectivity || file.check_connectivity.unwrap_or(false);
    let records = threshold_experiment(k1, k2, &c_list, n, reps, seed, check)?;
    write_or_stdout(
        &a.out_csv.or(file.out_csv),
        &experiment_records_csv(&records),
    )?;
    let summary = ThresholdSummary {
        k1,
        k2,
        n,
        reps,
        seed,
        per_c: c_list.iter().map(|&c| aggregate(&records, c)).collect(),
        records,
    };
    write_json(&a.out_json.or(file.out_json), &summary)?;
    Ok(())
}

#[derive(Args)]
struct DiagnosticsArgs {
    /// Edge density sigma = M/N.
    #[arg(long)]
    sigma: Option<f64>,
    #[arg(long)]
    k1: Option<usize>,
    /// Evaluate H, K, rho*, u_min at this rho as well.
    #[arg(long)]
    rho: Option<f64>,
    /// Negativity-scan grid step (at most 1e-3).
    #[arg(long)]
    step: Option<f64>,
}

#[derive(Serialize)]
struct DiagnosticsOutput {
    #[serde(skip_serializing_if = "Option::is_none")]
    point: Option<BoundDiagnostics>,
    scan: NegativityReport,
}

fn run_diagnostics(a: DiagnosticsArgs, file: FileConfig) -> CliResult<()> {
    let sigma = require(a.sigma, file.sigma, "sigma")?;
    let k1 = require(a.k1, file.k1, "k1")?;
    let step = pick(a.step, file.step, 1e-3);
    let point = match a.rho.or(file.rho) {
        Some(rho) => Some(bound_diagnostics(rho, sigma, k1)?),
        None => None,
    };
    let scan = scan_negativity(sigma, k1, step)?;
    let out = DiagnosticsOutput { point, scan };
    println!(
        "{}",
        serde_json::to_string_pretty(&out).expect("serializable")
    );
    Ok(())
}

fn dispatch(cli: Cli) -> CliResult<()> {
    let file = load_config(&cli.config)?;
    if let Some(threads) = cli.threads.or(file.threads) {
        std::env::set_var(THREADS_ENV, threads.to_string());
    }
    if let Some(expected) = &file.command {
        let actual = match &cli.command {
            Command::CountExact(_) => "count-exact",
            Command::CountAsym(_) => "count-asym",
            Command::C11(_) => "c11",
            Command::Sample(_) => "sample",
            Command::Check(_) => "check",
            Command::Peel(_) => "peel",
            Command::Cstar(_) => "cstar",
            Command::ConnectivityExperiment(_) => "connectivity-experiment",
            Command::ThresholdExperiment(_) => "threshold-experiment",
            Command::Diagnostics(_) => "diagnostics",
        };
        if expected != actual {
            return Err(CliError::usage(format!(
                "config names command `{expected}` but `{actual}` was invoked"
            )));
        }
    }
    match cli.command {
        Command::CountExact(a) => run_count_exact(a, file),
        Command::CountAsym(a) => run_count_asym(a, file),
        Command::C11(a) => run_c11(a, file),
        Command::Sample(a) => run_sample(a, file),
        Command::Check(a) => run_check(a, file),
        Command::Peel(a) => run_peel(a, file),
        Command::Cstar(a) => run_cstar(a, file),
        Command::ConnectivityExperiment(a) => run_connectivity(a, file),
        Command::ThresholdExperiment(a) => run_threshold(a, file),
        Command::Diagnostics(a) => run_diagnostics(a, file),
    }
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // --help and --version are not errors
            if matches!(
                e.kind(),
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion
            ) {
                print!("{e}");
                std::process::exit(0);
            }
            eprint!("{e}");
            std::process::exit(EXIT_USAGE);
        }
    };
    if let Err(e) = dispatch(cli) {
        eprintln!("error: {}", e.message);
        std::process::exit(e.code);
    }
}
