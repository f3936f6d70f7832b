//! Instance analysis: one report aggregating the intersection structure,
//! dual-hypergraph statistics, the deep-edge certificate, the fractional
//! transversal, and the hereditary-linearity verdict.

use serde::Serialize;
use thiserror::Error;

use crate::geometry::RegionFamily;
use crate::helly::{self, HellyError};
use crate::hypergraph::{
    check_hereditary_linearity, delaunay_graph, dual_hypergraph, friends_pairs, HypergraphError,
    LinearityMode,
};
use crate::oracle::{max_packing_exact, OracleBudget, OracleError};
use crate::transversal::{fractional_transversal, turan_intersection_bound, TransversalError};

/// Exhaustive linearity checking is the default up to this vertex count;
/// larger instances fall back to sampling.
pub const EXHAUSTIVE_ANALYZE_CAP: usize = 15;

#[derive(Debug, Error)]
pub enum AnalyzeError {
    #[error(transparent)]
    Transversal(#[from] TransversalError),
    #[error(transparent)]
    Hypergraph(#[from] HypergraphError),
    #[error(transparent)]
    Helly(#[from] HellyError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error("self-check failed: {0:?}")]
    SelfCheck(Vec<String>),
}

#[derive(Debug, Clone, Copy)]
pub struct AnalyzeOptions {
    pub seed: u64,
    pub linearity_trials: usize,
    /// Re-verify the sandwich/consistency invariants and fail on violation.
    pub self_check: bool,
}

impl Default for AnalyzeOptions {
    fn default() -> Self {
        AnalyzeOptions {
            seed: 0,
            linearity_trials: 2000,
            self_check: false,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct AnalysisReport {
    pub n: usize,
    pub intersecting_pairs: usize,
    /// Exact packing number (within the oracle budget).
    pub nu: Option<usize>,
    /// Smallest p for which the family is (p,2): ν + 1.
    pub p_min: Option<usize>,
    /// Turán lower bound on intersecting pairs at p = ν + 1.
    pub turan_bound: Option<i64>,
    pub tau_frac: f64,
    pub friend_density: Option<f64>,
    pub k_observed: usize,
    pub k_certified: usize,
    pub delaunay_edges: usize,
    pub linearity_passed: bool,
    pub linearity_mode: String,
    pub linearity_worst_ratio: f64,
    pub linearity_constant: f64,
}

impl std::fmt::Display for AnalysisReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "regions:            {}", self.n)?;
        writeln!(f, "intersecting pairs: {}", self.intersecting_pairs)?;
        match (self.nu, self.p_min, self.turan_bound) {
            (Some(nu), Some(p), Some(t)) => {
                writeln!(f, "packing number ν:   {nu}")?;
                writeln!(f, "minimal p (ν+1):    {p}")?;
                writeln!(f, "turán bound at p:   {t}")?;
            }
            _ => writeln!(f, "packing number ν:   (outside exact budget)")?,
        }
        writeln!(f, "fractional τ*:      {:.6}", self.tau_frac)?;
        if let Some(alpha) = self.friend_density {
            writeln!(f, "friend density α:   {alpha:.6}")?;
        }
        writeln!(f, "max depth k:        {}", self.k_observed)?;
        writeln!(f, "certified k bound:  {}", self.k_certified)?;
        writeln!(f, "delaunay edges:     {}", self.delaunay_edges)?;
        writeln!(
            f,
            "{}-linearity:        {} ({}, worst ratio {:.3})",
            self.linearity_constant,
            if self.linearity_passed { "passed" } else { "FAILED" },
            self.linearity_mode,
            self.linearity_worst_ratio
        )
    }
}

pub fn analyze(f: &RegionFamily, opts: &AnalyzeOptions) -> Result<AnalysisReport, AnalyzeError> {
    let n = f.len();
    let intersecting = f.intersecting_pairs().len();
    let budget = OracleBudget::default();
    let nu = if n <= budget.max_regions {
        Some(max_packing_exact(f, &budget)?.len())
    } else {
        None
    };
    let p_min = nu.map(|nu| nu + 1);
    let turan = match p_min {
        Some(p) if p <= n + 1 => Some(turan_intersection_bound(n, p)?),
        _ => None,
    };
    let lp = fractional_transversal(f)?;

    let h = dual_hypergraph(f);
    let c = 3.0;
    let friend_density = if n >= 2 {
        Some(helly::friend_density(&h)?)
    } else {
        None
    };
    let friends = friends_pairs(&h).len();
    let k_observed = h.max_edge_size();
    let k_certified = helly::certified_deep_bound(n, c, friends);
    let delaunay_edges = delaunay_graph(&h).edge_count();
    let mode = if n <= EXHAUSTIVE_ANALYZE_CAP {
        LinearityMode::Exhaustive
    } else {
        LinearityMode::Sampled {
            trials: opts.linearity_trials,
            seed: opts.seed,
        }
    };
    let lin = check_hereditary_linearity(&h, c, mode)?;
    let mode_desc = match lin.mode {
        LinearityMode::Exhaustive => "exhaustive".to_string(),
        LinearityMode::Sampled { trials, .. } => format!("sampled({trials})"),
    };

    let report = AnalysisReport {
        n,
        intersecting_pairs: intersecting,
        nu,
        p_min,
        turan_bound: turan,
        tau_frac: lp.primal_value,
        friend_density,
        k_observed,
        k_certified,
        delaunay_edges,
        linearity_passed: lin.passed,
        linearity_mode: mode_desc,
        linearity_worst_ratio: lin.worst_ratio,
        linearity_constant: c,
    };

    if opts.self_check {
        let mut violations = Vec::new();
        if let Some(nu) = report.nu {
            if (nu as f64) > report.tau_frac + 1e-6 {
                violations.push(format!("ν {} > τ* {}", nu, report.tau_frac));
            }
        }
        if let Some(bound) = report.turan_bound {
            if (report.intersecting_pairs as i64) < bound {
                violations.push(format!(
                    "intersecting pairs {} below Turán bound {bound}",
                    report.intersecting_pairs
                ));
            }
        }
        // friends of the dual hypergraph are exactly the intersecting pairs
        if friends != report.intersecting_pairs {
            violations.push(format!(
                "dual friend pairs {friends} ≠ intersecting pairs {}",
                report.intersecting_pairs
            ));
        }
        if report.delaunay_edges > friends {
            violations.push("delaunay edges exceed friend pairs".into());
        }
        if report.linearity_passed && report.k_observed < report.k_certified {
            violations.push(format!(
                "k observed {} below certificate {}",
                report.k_observed, report.k_certified
            ));
        }
        if !violations.is_empty() {
            return Err(AnalyzeError::SelfCheck(violations));
        }
    }
    Ok(report)
}
