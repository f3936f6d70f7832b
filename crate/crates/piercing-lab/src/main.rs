//! Command-line front end: generate | analyze | pierce | experiment | verify.
//!
//! Exit codes: 0 ok, 1 invariant violation, 2 input error, 3 budget exceeded.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use piercing_lab::analyze::{analyze, AnalyzeError, AnalyzeOptions};
use piercing_lab::experiment::{run_sweep, SweepConfig};
use piercing_lab::geometry::RegionFamily;
use piercing_lab::helly;
use piercing_lab::hypergraph::{
    check_hereditary_linearity, dual_hypergraph, friends_pairs, LinearityMode,
};
use piercing_lab::instance::{
    generate, read_instance, write_instance, FamilyClass, InstanceError, InstanceSpec,
};
use piercing_lab::oracle::{
    max_packing_exact, min_transversal_exact, signature_grid_check, OracleBudget, OracleError,
};
use piercing_lab::transversal::{
    fractional_transversal, greedy_pierce, pierce_p2, turan_intersection_bound, PierceMethod,
    TransversalError, TransversalReport,
};

const EXIT_OK: u8 = 0;
const EXIT_INVARIANT: u8 = 1;
const EXIT_INPUT: u8 = 2;
const EXIT_BUDGET: u8 = 3;

#[derive(Parser)]
#[command(
    name = "piercing-lab",
    version,
    about = "Piercing sets for planar region families with the (p,2)-property"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum ClassArg {
    Discs,
    UnitSquares,
    Polygons,
}

impl From<ClassArg> for FamilyClass {
    fn from(c: ClassArg) -> Self {
        match c {
            ClassArg::Discs => FamilyClass::Discs,
            ClassArg::UnitSquares => FamilyClass::UnitSquares,
            ClassArg::Polygons => FamilyClass::Polygons,
        }
    }
}

#[derive(Clone, Copy, ValueEnum, Default)]
enum MethodArg {
    #[default]
    Pipeline,
    Greedy,
    Exact,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a seeded instance and write it as a JSON instance file
    Generate {
        /// Region class
        #[arg(long, value_enum, default_value_t = ClassArg::Discs)]
        class: ClassArg,
        /// Number of regions
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Target packing number (rejection-sampled within ±1)
        #[arg(long)]
        density: Option<usize>,
        /// Side length of the sampling box
        #[arg(long, default_value_t = 10.0)]
        bbox: f64,
        #[arg(long, default_value_t = 0.5)]
        radius_min: f64,
        #[arg(long, default_value_t = 1.5)]
        radius_max: f64,
        /// Output instance file
        #[arg(long)]
        out: PathBuf,
    },
    /// Analyze an instance file (intersections, ν, τ*, Helly certificate,
    /// linearity verdict)
    Analyze {
        input: PathBuf,
        /// Emit the report as JSON instead of text
        #[arg(long)]
        json: bool,
        /// Re-verify sandwich/consistency invariants; non-zero exit on failure
        #[arg(long)]
        self_check: bool,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write the report here instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compute a piercing set for an instance file
    Pierce {
        input: PathBuf,
        /// The (p,2) parameter; defaults to ν+1
        #[arg(long)]
        p: Option<usize>,
        #[arg(long, value_enum, default_value_t = MethodArg::Pipeline)]
        method: MethodArg,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write the witness points as JSON
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a seeded (n, p, trial) sweep and write a CSV
    Experiment {
        /// Comma-separated region counts
        #[arg(long, value_delimiter = ',', required = true)]
        n: Vec<usize>,
        /// Comma-separated p values
        #[arg(long, value_delimiter = ',', required = true)]
        p: Vec<usize>,
        #[arg(long, default_value_t = 3)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = ClassArg::Discs)]
        class: ClassArg,
        /// Include wall-clock stage timings (breaks byte-reproducibility)
        #[arg(long)]
        timings: bool,
        /// Output CSV path
        #[arg(long)]
        out: PathBuf,
    },
    /// Re-verify all invariants on an instance file
    Verify {
        input: PathBuf,
        /// Grid resolution for the candidate-dominance check
        #[arg(long, default_value_t = 200)]
        resolution: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// The (p,2) parameter; defaults to ν+1
        #[arg(long)]
        p: Option<usize>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Generate {
            class,
            n,
            seed,
            density,
            bbox,
            radius_min,
            radius_max,
            out,
        } => cmd_generate(class, n, seed, density, bbox, (radius_min, radius_max), &out),
        Command::Analyze {
            input,
            json,
            self_check,
            seed,
            out,
        } => cmd_analyze(&input, json, self_check, seed, out.as_deref()),
        Command::Pierce {
            input,
            p,
            method,
            seed,
            out,
        } => cmd_pierce(&input, p, method, seed, out.as_deref()),
        Command::Experiment {
            n,
            p,
            trials,
            seed,
            class,
            timings,
            out,
        } => cmd_experiment(n, p, trials, seed, class, timings, &out),
        Command::Verify {
            input,
            resolution,
            seed,
            p,
        } => cmd_verify(&input, resolution, seed, p),
    };
    ExitCode::from(code)
}

fn instance_exit(e: &InstanceError) -> u8 {
    match e {
        InstanceError::Oracle(o) => oracle_exit(o),
        _ => EXIT_INPUT,
    }
}

fn oracle_exit(e: &OracleError) -> u8 {
    match e {
        OracleError::BudgetExceeded { .. } => EXIT_BUDGET,
        OracleError::ProbeTooLarge(_) | OracleError::ResolutionTooSmall(_) => EXIT_INPUT,
        OracleError::Lp(_) => EXIT_INVARIANT,
    }
}

fn transversal_exit(e: &TransversalError) -> u8 {
    match e {
        TransversalError::BadP(_)
        | TransversalError::PTooLarge { .. }
        | TransversalError::BadEpsilon(_)
        | TransversalError::BadWeights(_)
        | TransversalError::NotP2 { .. }
        | TransversalError::Geometry(_) => EXIT_INPUT,
        TransversalError::PackingGuard(_) | TransversalError::TooManyRegions(_) => EXIT_BUDGET,
        TransversalError::Oracle(o) => oracle_exit(o),
        TransversalError::Lp(_)
        | TransversalError::LpVerification(_)
        | TransversalError::NetRetriesExhausted { .. }
        | TransversalError::Unstabbed(_) => EXIT_INVARIANT,
    }
}

fn cmd_generate(
    class: ClassArg,
    n: usize,
    seed: u64,
    density: Option<usize>,
    bbox: f64,
    radius_range: (f64, f64),
    out: &std::path::Path,
) -> u8 {
    let spec = InstanceSpec {
        class: class.into(),
        n,
        density,
        radius_range,
        seed,
        bbox,
    };
    match generate(&spec) {
        Ok(inst) => {
            if let Err(e) = write_instance(out, &inst.family) {
                eprintln!("error: {e}");
                return EXIT_INPUT;
            }
            match inst.measured_nu {
                Some(nu) => println!(
                    "wrote {} ({} regions, ν = {nu}, {} resamples)",
                    out.display(),
                    inst.family.len(),
                    inst.resamples
                ),
                None => println!("wrote {} ({} regions)", out.display(), inst.family.len()),
            }
            EXIT_OK
        }
        Err(e) => {
            eprintln!("error: {e}");
            instance_exit(&e)
        }
    }
}

fn load(input: &std::path::Path) -> Result<RegionFamily, u8> {
    read_instance(input).map_err(|e| {
        eprintln!("error: {e}");
        instance_exit(&e)
    })
}

fn cmd_analyze(
    input: &std::path::Path,
    json: bool,
    self_check: bool,
    seed: u64,
    out: Option<&std::path::Path>,
) -> u8 {
    let family = match load(input) {
        Ok(f) => f,
        Err(code) => return code,
    };
    let opts = AnalyzeOptions {
        seed,
        self_check,
        ..Default::default()
    };
    match analyze(&family, &opts) {
        Ok(report) => {
            let text = if json {
                serde_json::to_string_pretty(&report).expect("report serialization") + "\n"
            } else {
                report.to_string()
            };
            emit(out, &text)
        }
        Err(AnalyzeError::SelfCheck(violations)) => {
            for v in &violations {
                eprintln!("invariant violation: {v}");
            }
            EXIT_INVARIANT
        }
        Err(AnalyzeError::Transversal(e)) => {
            eprintln!("error: {e}");
            transversal_exit(&e)
        }
        Err(AnalyzeError::Oracle(e)) => {
            eprintln!("error: {e}");
            oracle_exit(&e)
        }
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_INVARIANT
        }
    }
}

fn emit(out: Option<&std::path::Path>, text: &str) -> u8 {
    match out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, text) {
                eprintln!("error: failed to write {}: {e}", path.display());
                return EXIT_INPUT;
            }
            EXIT_OK
        }
        None => {
            print!("{text}");
            EXIT_OK
        }
    }
}

fn default_p(family: &RegionFamily) -> Result<usize, u8> {
    max_packing_exact(family, &OracleBudget::default())
        .map(|ids| ids.len() + 1)
        .map_err(|e| {
            eprintln!("error: cannot derive p (pass --p): {e}");
            oracle_exit(&e)
        })
}

fn cmd_pierce(
    input: &std::path::Path,
    p: Option<usize>,
    method: MethodArg,
    seed: u64,
    out: Option<&std::path::Path>,
) -> u8 {
    let family = match load(input) {
        Ok(f) => f,
        Err(code) => return code,
    };
    let p = match p {
        Some(p) => p,
        None => match default_p(&family) {
            Ok(p) => p,
            Err(code) => return code,
        },
    };
    let report = match method {
        MethodArg::Pipeline => pierce_p2(&family, p, seed),
        MethodArg::Greedy => greedy_pierce(&family, p),
        MethodArg::Exact => min_transversal_exact(&family, &OracleBudget::default())
            .map(|points| TransversalReport {
                p,
                method: PierceMethod::Exact,
                nu: None,
                tau_frac: None,
                tau_points: points,
                iterations: None,
                selected_regions: Vec::new(),
                stage_ms: Default::default(),
            })
            .map_err(TransversalError::Oracle),
    };
    match report {
        Ok(report) => {
            if report.verify_stabs(&family).is_err() {
                eprintln!("invariant violation: returned set does not stab every region");
                return EXIT_INVARIANT;
            }
            println!(
                "pierced {} regions with {} points (p = {}, method = {})",
                family.len(),
                report.tau_points.len(),
                report.p,
                match report.method {
                    PierceMethod::Pipeline => "pipeline",
                    PierceMethod::Greedy => "greedy",
                    PierceMethod::Exact => "exact",
                }
            );
            if let Some(tau) = report.tau_frac {
                println!("fractional τ* = {tau:.6}");
            }
            if let Some(iters) = report.iterations {
                println!("greedy iterations = {iters}");
            }
            for pt in &report.tau_points {
                println!("  ({}, {})", pt.x, pt.y);
            }
            if let Some(path) = out {
                let json = serde_json::to_string_pretty(&report.tau_points)
                    .expect("point serialization")
                    + "\n";
                if let Err(e) = std::fs::write(path, json) {
                    eprintln!("error: failed to write {}: {e}", path.display());
                    return EXIT_INPUT;
                }
            }
            EXIT_OK
        }
        Err(e) => {
            eprintln!("error: {e}");
            transversal_exit(&e)
        }
    }
}

fn cmd_experiment(
    n: Vec<usize>,
    p: Vec<usize>,
    trials: usize,
    seed: u64,
    class: ClassArg,
    timings: bool,
    out: &std::path::Path,
) -> u8 {
    let mut cfg = SweepConfig::new(n, p, trials, seed);
    cfg.class = class.into();
    cfg.include_timings = timings;
    match run_sweep(&cfg) {
        Ok(outcome) => {
            if let Err(e) = std::fs::write(out, &outcome.csv) {
                eprintln!("error: failed to write {}: {e}", out.display());
                return EXIT_INPUT;
            }
            let issues: usize = outcome.rows.iter().map(|r| r.issues.len()).sum();
            println!(
                "wrote {} rows to {} ({} issue(s))",
                outcome.rows.len(),
                out.display(),
                issues
            );
            for row in &outcome.rows {
                for issue in &row.issues {
                    eprintln!("row (n={}, p={}, seed={}): {issue}", row.n, row.p, row.seed);
                }
            }
            if outcome.all_ok {
                EXIT_OK
            } else {
                EXIT_INVARIANT
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_INPUT
        }
    }
}

fn cmd_verify(input: &std::path::Path, resolution: usize, seed: u64, p: Option<usize>) -> u8 {
    let family = match load(input) {
        Ok(f) => f,
        Err(code) => return code,
    };
    let n = family.len();
    let mut failed = false;
    let mut check = |name: &str, outcome: Result<bool, String>| match outcome {
        Ok(true) => println!("[PASS] {name}"),
        Ok(false) => {
            println!("[FAIL] {name}");
            failed = true;
        }
        Err(detail) => {
            println!("[SKIP] {name}: {detail}");
        }
    };

    // candidate dominance
    check(
        "candidate dominance (grid)",
        signature_grid_check(&family, resolution)
            .map(|r| r.passed)
            .map_err(|e| e.to_string()),
    );

    // hereditary 3-linearity of the dual hypergraph
    let dual = dual_hypergraph(&family);
    let mode = if n <= 15 {
        LinearityMode::Exhaustive
    } else {
        LinearityMode::Sampled { trials: 4000, seed }
    };
    let linearity = check_hereditary_linearity(&dual, 3.0, mode);
    let linearity_passed = matches!(&linearity, Ok(rep) if rep.passed);
    check(
        "hereditary 3-linearity of dual hypergraph",
        linearity.map(|r| r.passed).map_err(|e| e.to_string()),
    );

    // exact packing, LP, and the sandwich
    let budget = OracleBudget::default();
    let nu = max_packing_exact(&family, &budget).map(|ids| ids.len());
    let p_eff = match (p, &nu) {
        (Some(p), _) => Some(p),
        (None, Ok(nu)) => Some(nu + 1),
        (None, Err(_)) => None,
    };
    let lp = fractional_transversal(&family);
    match (&nu, &lp) {
        (Ok(nu), Ok(lp)) => {
            check(
                "sandwich: ν ≤ τ*",
                Ok(*nu as f64 <= lp.primal_value + 1e-6),
            );
            check(
                "LP duality gap ≤ 1e-6",
                Ok(lp.gap <= 1e-6 && lp.gap >= -1e-9),
            );
        }
        _ => check("sandwich: ν ≤ τ*", Err("packing or LP unavailable".into())),
    }
    let opt = min_transversal_exact(&family, &budget).map(|pts| pts.len());
    if let (Ok(lp), Ok(opt)) = (&lp, &opt) {
        check(
            "sandwich: τ* ≤ OPT",
            Ok(lp.primal_value - 1e-6 <= *opt as f64),
        );
    }

    match p_eff {
        Some(p_eff) if p_eff >= 2 => {
            match pierce_p2(&family, p_eff, seed) {
                Ok(report) => {
                    check(
                        "pipeline stabs every region",
                        Ok(report.verify_stabs(&family).is_ok()),
                    );
                    if let Ok(opt) = &opt {
                        check("sandwich: OPT ≤ pipeline", Ok(*opt <= report.tau_points.len()));
                    }
                }
                Err(e) => check("pipeline stabs every region", Err(e.to_string())),
            }
            match greedy_pierce(&family, p_eff) {
                Ok(report) => {
                    check(
                        "greedy stabs every region",
                        Ok(report.verify_stabs(&family).is_ok()),
                    );
                    let disjoint = report.selected_regions.iter().enumerate().all(|(i, &a)| {
                        report.selected_regions[i + 1..].iter().all(|&b| {
                            !piercing_lab::geometry::intersects(family.region(a), family.region(b))
                        })
                    });
                    check("greedy selections pairwise disjoint", Ok(disjoint));
                    if let Ok(nu) = &nu {
                        check(
                            "greedy iterations ≤ ν ≤ p−1",
                            Ok(report.iterations.unwrap_or(0) <= *nu && *nu < p_eff),
                        );
                    }
                }
                Err(e) => check("greedy stabs every region", Err(e.to_string())),
            }
            if let Ok(nu) = &nu {
                let measured = family.intersecting_pairs().len() as i64;
                let bound = turan_intersection_bound(n, nu + 1);
                check(
                    "turán intersection bound",
                    bound
                        .map(|b| measured >= b)
                        .map_err(|e| e.to_string()),
                );
            }
        }
        _ => check("pipeline stabs every region", Err("no p available".into())),
    }

    // deep-edge certificate (requires the linearity hypothesis)
    if linearity_passed && n >= 2 {
        let friends = friends_pairs(&dual).len();
        let k_observed = dual.max_edge_size();
        let k_certified = helly::certified_deep_bound(n, 3.0, friends);
        check(
            "deep-edge certificate k ≥ certified bound",
            Ok(k_observed >= k_certified),
        );
    }

    if failed {
        EXIT_INVARIANT
    } else {
        EXIT_OK
    }
}
