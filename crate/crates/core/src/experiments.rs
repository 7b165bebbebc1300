//! Monte Carlo experiment records, reproducible seeding, CSV encoding, and
//! the connectivity experiment over uniform simple dicores.
//!
//! Reproducibility contract: replica `rep` always draws from the ChaCha
//! stream `(master seed, rep)`, so re-running any CSV row in isolation and
//! re-running the whole experiment at any parallelism degree produce
//! byte-identical data.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph_analysis::{is_k_strongly_connected, strongly_connected_components};
use crate::sampler::{replica_rng, sample_simple_dicore, DEFAULT_SIMPLE_ATTEMPTS};

/// Environment variable capping the worker-pool size for experiments.
pub const THREADS_ENV: &str = "DICORE_THREADS";

/// Runs `f` inside a rayon pool sized by `DICORE_THREADS` when the variable
/// is set; otherwise uses the global pool.
pub fn run_with_configured_threads<T: Send>(f: impl FnOnce() -> T + Send) -> T {
    match std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|&v| v > 0)
    {
        Some(threads) => rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .expect("thread pool construction")
            .install(f),
        None => f(),
    }
}

/// One Monte Carlo replica of a peeling experiment.
#[derive(Debug, Clone, Serialize)]
pub struct ExperimentRecord {
    pub k1: usize,
    pub k2: usize,
    pub c: f64,
    pub n: usize,
    pub rep: usize,
    /// Master seed; the replica stream is `(seed, rep)`.
    pub seed: u64,
    pub core_vertices: usize,
    pub core_edges: usize,
    pub strongly_connected: Option<bool>,
    pub k_strong: Option<bool>,
    /// Not part of the CSV schema; reported in JSON summaries only.
    pub wall_time_ms: f64,
}

fn opt_bool(v: Option<bool>) -> &'static str {
    match v {
        Some(true) => "true",
        Some(false) => "false",
        None => "",
    }
}

/// Fixed, versioned CSV encoding of peeling records.
pub fn experiment_records_csv(records: &[ExperimentRecord]) -> String {
    let mut out = String::from("# schema=1\n");
    out.push_str("k1,k2,c,n,rep,seed,core_vertices,core_edges,strongly_connected,k_strong\n");
    for r in records {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{}\n",
            r.k1,
            r.k2,
            r.c,
            r.n,
            r.rep,
            r.seed,
            r.core_vertices,
            r.core_edges,
            opt_bool(r.strongly_connected),
            opt_bool(r.k_strong)
        ));
    }
    out
}

/// Configuration of the connectivity experiment: for each N in `n_list`,
/// sample `reps` uniform simple dicores with `m = ceil(density * n)` edges.
#[derive(Debug, Clone, Serialize)]
pub struct ConnectivityConfig {
    pub k1: usize,
    pub k2: usize,
    pub n_list: Vec<usize>,
    pub density: f64,
    pub reps: usize,
    pub seed: u64,
    pub max_attempts: u64,
}

impl ConnectivityConfig {
    pub fn new(
        k1: usize,
        k2: usize,
        n_list: Vec<usize>,
        density: f64,
        reps: usize,
        seed: u64,
    ) -> Self {
        Self {
            k1,
            k2,
            n_list,
            density,
            reps,
            seed,
            max_attempts: DEFAULT_SIMPLE_ATTEMPTS,
        }
    }
}

/// Per-N measurements of the connectivity experiment.
#[derive(Debug, Clone, Serialize)]
pub struct ConnectivityRow {
    pub k1: usize,
    pub k2: usize,
    pub n: usize,
    pub m: usize,
    pub reps: usize,
    pub seed: u64,
    pub non_sc_count: usize,
    pub non_kstrong_count: usize,
    /// Among strongly connected samples, how many failed the k-strong test.
    pub kstrong_failures_among_sc: usize,
    /// Mean sequence draws per accepted simple dicore (rejection cost).
    pub mean_sample_attempts: f64,
}

impl ConnectivityRow {
    pub fn non_sc_fraction(&self) -> f64 {
        self.non_sc_count as f64 / self.reps as f64
    }

    pub fn non_kstrong_fraction(&self) -> f64 {
        self.non_kstrong_count as f64 / self.reps as f64
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ConnectivityReport {
    pub config: ConnectivityConfig,
    /// The k used for k-strong checks: min(k1, k2).
    pub k_tested: usize,
    pub rows: Vec<ConnectivityRow>,
    /// Log-log least-squares slope of the non-SC fraction against N, fitted
    /// over the rows with a positive count (None when fewer than two rows
    /// qualify).
    pub non_sc_slope: Option<f64>,
    pub wall_time_ms: f64,
}

/// Least-squares slope of ln(frac) against ln(n), over points with
/// positive fraction. None when fewer than two usable points remain.
pub fn fit_log_log_slope(points: &[(f64, f64)]) -> Option<f64> {
    let usable: Vec<(f64, f64)> = points
        .iter()
        .filter(|&&(n, frac)| n > 0.0 && frac > 0.0)
        .map(|&(n, frac)| (n.ln(), frac.ln()))
        .collect();
    if usable.len() < 2 {
        return None;
    }
    let len = usable.len() as f64;
    let mean_x = usable.iter().map(|p| p.0).sum::<f64>() / len;
    let mean_y = usable.iter().map(|p| p.1).sum::<f64>() / len;
    let sxx: f64 = usable.iter().map(|p| (p.0 - mean_x).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = usable.iter().map(|p| (p.0 - mean_x) * (p.1 - mean_y)).sum();
    Some(sxy / sxx)
}

/// For each N: samples `reps` uniform simple dicores at density
/// `m = ceil(density n)`, records the fractions that are not strongly
/// connected and not min(k1,k2)-strongly connected, and fits the log-log
/// decay slope of the non-SC fraction.
pub fn connectivity_experiment(config: &ConnectivityConfig) -> Result<ConnectivityReport> {
    let start = std::time::Instant::now();
    let kmax = config.k1.max(config.k2) as f64;
    if config.density < kmax + crate::asymptotics::DEFAULT_DENSITY_EPS {
        return Err(Error::Precondition(format!(
            "density {} violates M/N >= max(k1,k2) + eps = {}",
            config.density,
            kmax + crate::asymptotics::DEFAULT_DENSITY_EPS
        )));
    }
    let k_tested = config.k1.min(config.k2);
    let mut rows = Vec::new();
    if config.reps > 0 {
        for &n in &config.n_list {
            let m = (config.density * n as f64).ceil() as usize;
            let per_rep: Vec<Result<(bool, bool, u64)>> = run_with_configured_threads(|| {
                (0..config.reps)
                    .into_par_iter()
                    .map(|rep| {
                        let mut rng = replica_rng(config.seed, rep as u64);
                        let (g, attempts) = sample_simple_dicore(
                            n,
                            m,
                            config.k1,
                            config.k2,
                            &mut rng,
                            config.max_attempts,
                        )?;
                        let sc = strongly_connected_components(&g).len() == 1;
                        let kstrong = if sc && k_tested >= 1 && n > k_tested {
                            is_k_strongly_connected(&g, k_tested)?.k_strong
                        } else {
                            sc
                        };
                        Ok((sc, kstrong, attempts))
                    })
                    .collect()
            });
            let mut row = ConnectivityRow {
                k1: config.k1,
                k2: config.k2,
                n,
                m,
                reps: config.reps,
                seed: config.seed,
                non_sc_count: 0,
                non_kstrong_count: 0,
                kstrong_failures_among_sc: 0,
                mean_sample_attempts: 0.0,
            };
            let mut attempts_total = 0u64;
            for r in per_rep {
                let (sc, kstrong, attempts) = r?;
                if !sc {
                    row.non_sc_count += 1;
                }
                if !kstrong {
                    row.non_kstrong_count += 1;
                    if sc {
                        row.kstrong_failures_among_sc += 1;
                    }
                }
                attempts_total += attempts;
            }
            row.mean_sample_attempts = attempts_total as f64 / config.reps as f64;
            rows.push(row);
        }
    }
    let points: Vec<(f64, f64)> = rows
        .iter()
        .map(|r| (r.n as f64, r.non_sc_fraction()))
        .collect();
    Ok(ConnectivityReport {
        config: config.clone(),
        k_tested,
        rows,
        non_sc_slope: fit_log_log_slope(&points),
        wall_time_ms: start.elapsed().as_secs_f64() * 1e3,
    })
}

/// Fixed, versioned CSV encoding of connectivity rows.
pub fn connectivity_rows_csv(report: &ConnectivityReport) -> String {
    let mut out = String::from("# schema=1\n");
    out.push_str(
        "k1,k2,n,m,reps,seed,non_sc_count,non_sc_fraction,non_kstrong_count,non_kstrong_fraction\n",
    );
    for r in &report.rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{}\n",
            r.k1,
            r.k2,
            r.n,
            r.m,
            r.reps,
            r.seed,
            r.non_sc_count,
            r.non_sc_fraction(),
            r.non_kstrong_count,
            r.non_kstrong_fraction()
        ));
    }
    out
}
