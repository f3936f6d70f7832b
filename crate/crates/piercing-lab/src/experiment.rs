//! Batch experiment driver: sweeps (n, p, trial) combinations over seeded
//! (p,2) disc families, runs the pipeline/greedy/exact methods, and emits
//! deterministic CSV rows. Rows are computed in parallel (capped by the
//! `PIERCING_LAB_THREADS` environment variable) and written in sweep order
//! regardless of completion order.
//!
//! Stage timings are wall-clock and therefore not reproducible; they are
//! left empty unless `include_timings` is set, so default CSV output is
//! byte-identical across runs with the same seed.

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::instance::{generate_p2, FamilyClass, InstanceError};
use crate::oracle::{min_transversal_exact, OracleBudget, OracleError};
use crate::transversal::{fractional_transversal, greedy_pierce, pierce_p2};

pub const CSV_HEADER: &str =
    "seed,n,p,nu_exact,tau_frac,pipeline_size,greedy_size,greedy_iterations,exact_opt,ms_lp,ms_net,ms_greedy";

/// Thread-cap environment variable honored by [`run_sweep`].
pub const THREADS_ENV: &str = "PIERCING_LAB_THREADS";

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("sweep needs non-empty n and p lists and trials ≥ 1")]
    EmptySweep,
    #[error("failed to build thread pool: {0}")]
    ThreadPool(String),
    #[error(transparent)]
    Instance(#[from] InstanceError),
}

#[derive(Debug, Clone)]
pub struct SweepConfig {
    pub n_list: Vec<usize>,
    pub p_list: Vec<usize>,
    pub trials: usize,
    pub seed: u64,
    pub class: FamilyClass,
    pub include_timings: bool,
}

impl SweepConfig {
    pub fn new(n_list: Vec<usize>, p_list: Vec<usize>, trials: usize, seed: u64) -> Self {
        SweepConfig {
            n_list,
            p_list,
            trials,
            seed,
            class: FamilyClass::Discs,
            include_timings: false,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ExperimentRow {
    pub seed: u64,
    pub n: usize,
    pub p: usize,
    pub nu_exact: Option<usize>,
    pub tau_frac: Option<f64>,
    pub pipeline_size: Option<usize>,
    pub greedy_size: Option<usize>,
    pub greedy_iterations: Option<usize>,
    pub exact_opt: Option<usize>,
    pub ms_lp: Option<f64>,
    pub ms_net: Option<f64>,
    pub ms_greedy: Option<f64>,
    /// Per-row failures and invariant violations; empty means clean.
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub issues: Vec<String>,
}

#[derive(Debug)]
pub struct SweepOutcome {
    pub rows: Vec<ExperimentRow>,
    pub csv: String,
    /// True when every row completed with all self-checks green.
    pub all_ok: bool,
}

fn mix_seed(seed: u64, n: usize, p: usize, trial: usize) -> u64 {
    // splitmix64 over the packed coordinates
    let mut z = seed
        ^ (n as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15)
        ^ (p as u64).wrapping_mul(0xBF58_476D_1CE4_E5B9)
        ^ (trial as u64).wrapping_mul(0x94D0_49BB_1331_11EB);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn run_row(cfg: &SweepConfig, n: usize, p: usize, trial: usize) -> ExperimentRow {
    let row_seed = mix_seed(cfg.seed, n, p, trial);
    let mut row = ExperimentRow {
        seed: row_seed,
        n,
        p,
        nu_exact: None,
        tau_frac: None,
        pipeline_size: None,
        greedy_size: None,
        greedy_iterations: None,
        exact_opt: None,
        ms_lp: None,
        ms_net: None,
        ms_greedy: None,
        issues: Vec::new(),
    };
    let family = match generate_p2(cfg.class, n, p, row_seed) {
        Ok((family, nu)) => {
            row.nu_exact = Some(nu);
            family
        }
        Err(e) => {
            row.issues.push(format!("generate: {e}"));
            return row;
        }
    };
    match fractional_transversal(&family) {
        Ok(lp) => row.tau_frac = Some(lp.primal_value),
        Err(e) => row.issues.push(format!("lp: {e}")),
    }
    match pierce_p2(&family, p, row_seed) {
        Ok(report) => {
            row.pipeline_size = Some(report.tau_points.len());
            if cfg.include_timings {
                row.ms_lp = report.stage_ms.lp_ms;
                row.ms_net = report.stage_ms.net_ms;
            }
        }
        Err(e) => row.issues.push(format!("pipeline: {e}")),
    }
    match greedy_pierce(&family, p) {
        Ok(report) => {
            row.greedy_size = Some(report.tau_points.len());
            row.greedy_iterations = report.iterations;
            if cfg.include_timings {
                row.ms_greedy = report.stage_ms.greedy_ms;
            }
        }
        Err(e) => row.issues.push(format!("greedy: {e}")),
    }
    match min_transversal_exact(&family, &OracleBudget::default()) {
        Ok(points) => row.exact_opt = Some(points.len()),
        Err(OracleError::BudgetExceeded { .. }) => {} // legal: leave empty
        Err(e) => row.issues.push(format!("exact: {e}")),
    }
    check_row_invariants(&mut row);
    row
}

/// Row-wise sandwich and iteration-bound checks.
fn check_row_invariants(row: &mut ExperimentRow) {
    let tol = 1e-6;
    if let (Some(nu), Some(tau)) = (row.nu_exact, row.tau_frac) {
        if nu as f64 > tau + tol {
            row.issues.push(format!("sandwich: ν {nu} > τ* {tau}"));
        }
    }
    if let (Some(tau), Some(opt)) = (row.tau_frac, row.exact_opt) {
        if tau - tol > opt as f64 {
            row.issues.push(format!("sandwich: τ* {tau} > OPT {opt}"));
        }
    }
    // lower bounds hold directly even when OPT is out of budget
    if let (Some(tau), Some(size)) = (row.tau_frac, row.pipeline_size) {
        if tau - tol > size as f64 {
            row.issues.push(format!("sandwich: τ* {tau} > pipeline {size}"));
        }
    }
    if let (Some(tau), Some(size)) = (row.tau_frac, row.greedy_size) {
        if tau - tol > size as f64 {
            row.issues.push(format!("sandwich: τ* {tau} > greedy {size}"));
        }
    }
    if let (Some(opt), Some(size)) = (row.exact_opt, row.pipeline_size) {
        if opt > size {
            row.issues
                .push(format!("sandwich: OPT {opt} > pipeline {size}"));
        }
    }
    if let (Some(opt), Some(size)) = (row.exact_opt, row.greedy_size) {
        if opt > size {
            row.issues.push(format!("sandwich: OPT {opt} > greedy {size}"));
        }
    }
    if let (Some(iters), Some(nu)) = (row.greedy_iterations, row.nu_exact) {
        if iters > nu {
            row.issues
                .push(format!("greedy iterations {iters} > ν {nu}"));
        }
        if iters > row.p - 1 {
            row.issues
                .push(format!("greedy iterations {iters} > p−1 = {}", row.p - 1));
        }
    }
}

fn fmt_opt<T: std::fmt::Display>(v: &Option<T>) -> String {
    v.as_ref().map(|x| x.to_string()).unwrap_or_default()
}

fn csv_line(row: &ExperimentRow) -> String {
    format!(
        "{},{},{},{},{},{},{},{},{},{},{},{}",
        row.seed,
        row.n,
        row.p,
        fmt_opt(&row.nu_exact),
        fmt_opt(&row.tau_frac),
        fmt_opt(&row.pipeline_size),
        fmt_opt(&row.greedy_size),
        fmt_opt(&row.greedy_iterations),
        fmt_opt(&row.exact_opt),
        fmt_opt(&row.ms_lp.map(|v| format!("{v:.3}"))),
        fmt_opt(&row.ms_net.map(|v| format!("{v:.3}"))),
        fmt_opt(&row.ms_greedy.map(|v| format!("{v:.3}"))),
    )
}

pub fn render_csv(rows: &[ExperimentRow]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for row in rows {
        out.push_str(&csv_line(row));
        out.push('\n');
    }
    out
}

/// Run the full sweep. Rows are independent and run in parallel on a local
/// pool sized by `PIERCING_LAB_THREADS` (all cores when unset).
pub fn run_sweep(cfg: &SweepConfig) -> Result<SweepOutcome, ExperimentError> {
    if cfg.n_list.is_empty() || cfg.p_list.is_empty() || cfg.trials == 0 {
        return Err(ExperimentError::EmptySweep);
    }
    let mut combos = Vec::new();
    for &n in &cfg.n_list {
        for &p in &cfg.p_list {
            for trial in 0..cfg.trials {
                combos.push((n, p, trial));
            }
        }
    }
    let threads = std::env::var(THREADS_ENV)
        .ok()
        .and_then(|s| s.parse::<usize>().ok())
        .filter(|&t| t >= 1);
    let rows: Vec<ExperimentRow> = match threads {
        Some(t) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(t)
                .build()
                .map_err(|e| ExperimentError::ThreadPool(e.to_string()))?;
            pool.install(|| {
                combos
                    .par_iter()
                    .map(|&(n, p, trial)| run_row(cfg, n, p, trial))
                    .collect()
            })
        }
        None => combos
            .par_iter()
            .map(|&(n, p, trial)| run_row(cfg, n, p, trial))
            .collect(),
    };
    let all_ok = rows.iter().all(|r| r.issues.is_empty());
    let csv = render_csv(&rows);
    Ok(SweepOutcome { rows, csv, all_ok })
}
