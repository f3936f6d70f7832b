//! The (p,2) piercing pipeline: packing number and (p,2) verification, the
//! Turán intersection bound, the fractional transversal LP, epsilon-net
//! rounding, and the greedy neighborhood-removal scheme.
//!
//! `pierce_p2` composes candidates → covering LP → weighted sampling with
//! eps = 1/τ*: the LP guarantees every region carries at least a 1/τ*
//! fraction of the multiset mass, so a verified eps-net stabs everything.
//! `greedy_pierce` instead repeatedly selects a region whose closed
//! neighborhood has the smallest packing number, pierces that neighborhood
//! exactly, and removes it; the selected regions are pairwise disjoint, so
//! the loop runs at most ν ≤ p−1 times.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use thiserror::Error;

use crate::geometry::{GeometryError, Point, Region, RegionFamily};
use crate::lp::{self, LpError};
use crate::oracle::{self, OracleBudget, OracleError};

/// Exact packing (branch-and-bound) size guard.
pub const PACKING_EXACT_CAP: usize = 40;
/// Greedy pierces a neighborhood by exact set cover up to this size.
pub const GREEDY_EXACT_COVER_CAP: usize = 25;
/// Sample-count multiplier for the epsilon net.
pub const NET_KAPPA: f64 = 8.0;
/// Sampling rounds before the net construction reports failure.
pub const NET_MAX_ROUNDS: usize = 10;

const GREEDY_FALLBACK_SEED: u64 = 0x7053_3273_6e67_0001;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TransversalError {
    #[error("p must be at least 2, got {0}")]
    BadP(usize),
    #[error("p must satisfy p ≤ n+1 = {max}, got {p}")]
    PTooLarge { p: usize, max: usize },
    #[error("exact packing limited to {PACKING_EXACT_CAP} regions, got {0}")]
    PackingGuard(usize),
    #[error("LP pipeline supports at most 64 regions, got {0}")]
    TooManyRegions(usize),
    #[error("family is not ({p},2): it has {nu} pairwise-disjoint regions")]
    NotP2 { p: usize, nu: usize },
    #[error(transparent)]
    Lp(#[from] LpError),
    #[error("LP verification failed: {0}")]
    LpVerification(String),
    #[error("epsilon must lie in (0,1], got {0}")]
    BadEpsilon(f64),
    #[error("weighted point set: {0}")]
    BadWeights(String),
    #[error("epsilon-net sampling failed after {rounds} rounds (eps = {eps}); unhit heavy regions: {missed:?}")]
    NetRetriesExhausted {
        rounds: usize,
        eps: f64,
        missed: Vec<usize>,
    },
    #[error("region {0} is not stabbed by the returned transversal")]
    Unstabbed(usize),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
}

/// The LP-duality multiset Q: candidate points with non-negative weights.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedPointSet {
    points: Vec<Point>,
    weights: Vec<f64>,
}

impl WeightedPointSet {
    pub fn new(points: Vec<Point>, weights: Vec<f64>) -> Result<Self, TransversalError> {
        if points.len() != weights.len() {
            return Err(TransversalError::BadWeights(format!(
                "{} points vs {} weights",
                points.len(),
                weights.len()
            )));
        }
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(TransversalError::BadWeights(
                "weights must be finite and non-negative".into(),
            ));
        }
        if !points.is_empty() && weights.iter().sum::<f64>() <= 0.0 {
            return Err(TransversalError::BadWeights(
                "total weight must be positive".into(),
            ));
        }
        Ok(WeightedPointSet { points, weights })
    }

    /// Strictly positive LP primal weights as the multiset Q.
    pub fn from_lp(solution: &LPSolution) -> Self {
        let mut points = Vec::new();
        let mut weights = Vec::new();
        for (p, &w) in solution.points.iter().zip(&solution.primal_weights) {
            if w > 0.0 {
                points.push(*p);
                weights.push(w);
            }
        }
        WeightedPointSet { points, weights }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// Fraction of the total mass inside `r`.
    pub fn region_mass(&self, r: &Region) -> f64 {
        let total = self.total_weight();
        if total <= 0.0 {
            return 0.0;
        }
        self.points
            .iter()
            .zip(&self.weights)
            .filter(|(p, _)| r.contains(**p))
            .map(|(_, w)| w)
            .sum::<f64>()
            / total
    }
}

/// Fractional covering/packing pair for one family.
#[derive(Debug, Clone, PartialEq)]
pub struct LPSolution {
    /// Representative candidate points, one per maximal signature.
    pub points: Vec<Point>,
    /// Covering weight y per candidate point.
    pub primal_weights: Vec<f64>,
    /// Packing weight z per region.
    pub dual_weights: Vec<f64>,
    /// τ* = Σy.
    pub primal_value: f64,
    /// Σz.
    pub dual_value: f64,
    /// primal_value − dual_value.
    pub gap: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PackingMode {
    Exact,
    Greedy,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PierceMethod {
    Pipeline,
    Greedy,
    Exact,
}

/// Wall-clock stage timings in milliseconds.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct StageTimes {
    pub lp_ms: Option<f64>,
    pub net_ms: Option<f64>,
    pub greedy_ms: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TransversalReport {
    pub p: usize,
    pub method: PierceMethod,
    /// Exact packing number when it was computed within the size guard.
    pub nu: Option<usize>,
    /// Fractional transversal optimum when the LP ran.
    pub tau_frac: Option<f64>,
    /// Witness piercing points; every region contains at least one.
    pub tau_points: Vec<Point>,
    /// Greedy rounds; None for other methods.
    pub iterations: Option<usize>,
    /// Greedy's selected neighborhood centers (pairwise disjoint regions).
    pub selected_regions: Vec<usize>,
    pub stage_ms: StageTimes,
}

impl TransversalReport {
    /// Hard validity check: every region contains a witness point.
    pub fn verify_stabs(&self, f: &RegionFamily) -> Result<(), TransversalError> {
        for (id, r) in f.regions().iter().enumerate() {
            if !self.tau_points.iter().any(|p| r.contains(*p)) {
                return Err(TransversalError::Unstabbed(id));
            }
        }
        Ok(())
    }
}

pub(crate) fn mask_bits(mask: u64) -> Vec<usize> {
    let mut out = Vec::with_capacity(mask.count_ones() as usize);
    let mut m = mask;
    while m != 0 {
        let v = m.trailing_zeros() as usize;
        out.push(v);
        m &= m - 1;
    }
    out
}

/// Intersection-graph adjacency masks (bit j of `adj[i]` set iff i ≠ j and
/// the regions intersect).
pub(crate) fn intersection_masks(f: &RegionFamily) -> Result<Vec<u64>, TransversalError> {
    let n = f.len();
    if n > 64 {
        return Err(TransversalError::TooManyRegions(n));
    }
    let mut adj = vec![0u64; n];
    for (i, j) in f.intersecting_pairs() {
        adj[i] |= 1 << j;
        adj[j] |= 1 << i;
    }
    Ok(adj)
}

fn full_mask(n: usize) -> u64 {
    if n >= 64 {
        !0
    } else {
        (1u64 << n) - 1
    }
}

/// Maximum clique on the graph given by adjacency masks, restricted to the
/// vertices of `sub`. Branch and bound with a greedy coloring bound,
/// deterministic in bit order.
pub(crate) fn max_clique(adj: &[u64], sub: u64) -> Vec<usize> {
    let mut best: (u32, u64) = (0, 0);
    expand_clique(adj, sub, 0, &mut best);
    mask_bits(best.1)
}

fn expand_clique(adj: &[u64], cand: u64, current: u64, best: &mut (u32, u64)) {
    if cand == 0 {
        if current.count_ones() > best.0 {
            *best = (current.count_ones(), current);
        }
        return;
    }
    // greedy coloring: classes are independent sets, so any clique within
    // `cand` has at most as many vertices as there are colors
    let mut order: Vec<(u8, u32)> = Vec::with_capacity(cand.count_ones() as usize);
    let mut rest = cand;
    let mut color = 0u32;
    while rest != 0 {
        color += 1;
        let mut avail = rest;
        while avail != 0 {
            let v = avail.trailing_zeros() as usize;
            order.push((v as u8, color));
            rest &= !(1u64 << v);
            avail &= !(adj[v] | (1u64 << v));
        }
    }
    let mut cand = cand;
    for &(v, col) in order.iter().rev() {
        if current.count_ones() + col <= best.0 {
            return;
        }
        let v = v as usize;
        cand &= !(1u64 << v);
        expand_clique(adj, cand & adj[v], current | (1u64 << v), best);
    }
}

/// Exact maximum packing as a maximum clique of the disjointness graph.
pub(crate) fn exact_packing_mask(adj: &[u64], sub: u64) -> Vec<usize> {
    let n = adj.len();
    let disj: Vec<u64> = (0..n)
        .map(|i| !adj[i] & !(1u64 << i) & full_mask(n))
        .collect();
    max_clique(&disj, sub)
}

/// ν: the maximum number of pairwise-disjoint regions. Exact mode runs a
/// branch-and-bound over cliques of the disjointness graph (n ≤ 40);
/// greedy mode is a lower bound.
pub fn packing_number(f: &RegionFamily, mode: PackingMode) -> Result<usize, TransversalError> {
    let n = f.len();
    let adj = intersection_masks(f)?;
    match mode {
        PackingMode::Exact => {
            if n > PACKING_EXACT_CAP {
                return Err(TransversalError::PackingGuard(n));
            }
            Ok(exact_packing_mask(&adj, full_mask(n)).len())
        }
        PackingMode::Greedy => {
            // repeatedly take the region intersecting fewest remaining ones
            let mut remaining = full_mask(n);
            let mut count = 0;
            while remaining != 0 {
                let v = mask_bits(remaining)
                    .into_iter()
                    .min_by_key(|&v| ((adj[v] & remaining).count_ones(), v))
                    .expect("remaining non-empty");
                count += 1;
                remaining &= !(adj[v] | (1u64 << v));
            }
            Ok(count)
        }
    }
}

/// Does every choice of p regions contain two that intersect?
pub fn check_p2(f: &RegionFamily, p: usize) -> Result<bool, TransversalError> {
    if p < 2 {
        return Err(TransversalError::BadP(p));
    }
    Ok(packing_number(f, PackingMode::Exact)? < p)
}

/// Lower bound on the number of intersecting pairs of any (p,2) family of
/// n regions: the disjointness graph is K_p-free, so by Turán it has at
/// most (1 − 1/(p−1))·n²/2 edges, leaving ⌈n²/(2(p−1)) − n/2⌉ intersecting
/// pairs. May be ≤ 0 (vacuous) for large p.
pub fn turan_intersection_bound(n: usize, p: usize) -> Result<i64, TransversalError> {
    if p < 2 {
        return Err(TransversalError::BadP(p));
    }
    if p > n + 1 {
        return Err(TransversalError::PTooLarge { p, max: n + 1 });
    }
    let n = n as i64;
    let p = p as i64;
    let num = n * (n + 1 - p);
    let den = 2 * (p - 1);
    Ok((num + den - 1).div_euclid(den))
}

/// Solve the covering LP min Σy s.t. every region's candidate weight is
/// ≥ 1, y ≥ 0, together with its packing dual. The returned pair is
/// feasible within 1e−9 and has duality gap ≤ 1e−6, or an error is raised.
pub fn fractional_transversal(f: &RegionFamily) -> Result<LPSolution, TransversalError> {
    let n = f.len();
    if n > 64 {
        return Err(TransversalError::TooManyRegions(n));
    }
    let atlas = f.maximal_signature_atlas();
    let all = atlas.masks.iter().fold(0u64, |a, &b| a | b);
    if all != full_mask(n) {
        // cannot happen: every region contains its own anchor
        return Err(TransversalError::LpVerification(
            "some region has no candidate signature".into(),
        ));
    }
    let solve = lp::solve_packing(n, &atlas.masks)?;
    let mut y = solve.row_duals;
    let mut z = solve.var_values;

    // covering feasibility; rescale away sub-tolerance rounding
    let cover = |y: &[f64], j: usize| -> f64 {
        atlas
            .masks
            .iter()
            .zip(y)
            .filter(|(m, _)| *m & (1 << j) != 0)
            .map(|(_, w)| w)
            .sum()
    };
    let min_cov = (0..n).map(|j| cover(&y, j)).fold(f64::INFINITY, f64::min);
    if min_cov < 1.0 {
        if min_cov < 1.0 - 1e-7 {
            return Err(TransversalError::LpVerification(format!(
                "covering residual too large: min coverage {min_cov}"
            )));
        }
        let scale = 1.0 / min_cov;
        y.iter_mut().for_each(|w| *w *= scale);
    }
    // packing feasibility
    let load = |z: &[f64], mask: u64| -> f64 {
        mask_bits(mask).into_iter().map(|j| z[j]).sum()
    };
    let max_load = atlas
        .masks
        .iter()
        .map(|&m| load(&z, m))
        .fold(0.0f64, f64::max);
    if max_load > 1.0 {
        if max_load > 1.0 + 1e-7 {
            return Err(TransversalError::LpVerification(format!(
                "packing residual too large: max load {max_load}"
            )));
        }
        let scale = 1.0 / max_load;
        z.iter_mut().for_each(|w| *w *= scale);
    }

    let primal_value: f64 = y.iter().sum();
    let dual_value: f64 = z.iter().sum();
    let gap = primal_value - dual_value;
    if !(-1e-9..=1e-6).contains(&gap) {
        return Err(TransversalError::LpVerification(format!(
            "duality gap {gap} outside tolerance"
        )));
    }
    Ok(LPSolution {
        points: atlas.points,
        primal_weights: y,
        dual_weights: z,
        primal_value,
        dual_value,
        gap,
    })
}

/// Sample-and-verify epsilon net: draw ⌈κ/ε·ln(2/ε)⌉ points i.i.d. from
/// `q`, check that every region holding at least an ε fraction of the mass
/// is hit, double the sample size on failure (at most [`NET_MAX_ROUNDS`]
/// rounds), then prune redundant points. The verification makes the net
/// property unconditional.
pub fn epsilon_net(
    q: &WeightedPointSet,
    f: &RegionFamily,
    eps: f64,
    seed: u64,
) -> Result<Vec<Point>, TransversalError> {
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(TransversalError::BadEpsilon(eps));
    }
    let n = f.len();
    if n > 64 {
        return Err(TransversalError::TooManyRegions(n));
    }
    if q.is_empty() {
        return Err(TransversalError::BadWeights(
            "cannot sample a net from an empty point set".into(),
        ));
    }
    let total = q.total_weight();
    let sigs: Vec<u64> = q.points().iter().map(|&p| f.signature_mask(p)).collect();
    // per-region mass fractions
    let mut mass = vec![0.0f64; n];
    for (sig, w) in sigs.iter().zip(q.weights()) {
        for j in mask_bits(*sig) {
            mass[j] += w / total;
        }
    }
    // classify regions at eps with a hair of slack so LP-tight regions
    // (mass exactly 1/τ*) stay heavy
    let heavy: u64 = (0..n)
        .filter(|&j| mass[j] >= eps * (1.0 - 1e-9))
        .fold(0u64, |m, j| m | (1 << j));

    let mut cum = Vec::with_capacity(q.len());
    let mut acc = 0.0;
    for &w in q.weights() {
        acc += w;
        cum.push(acc);
    }
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let base = ((NET_KAPPA / eps) * (2.0 / eps).ln()).ceil().max(1.0) as usize;

    for round in 0..NET_MAX_ROUNDS {
        let s = base << round;
        let mut picked: Vec<usize> = Vec::with_capacity(s);
        let mut union = 0u64;
        for _ in 0..s {
            let u = rng.gen_range(0.0..total);
            let idx = cum.partition_point(|&c| c <= u).min(q.len() - 1);
            picked.push(idx);
            union |= sigs[idx];
        }
        if heavy & !union == 0 {
            return Ok(prune_net(&picked, &sigs, heavy, q.points()));
        }
    }
    Err(TransversalError::NetRetriesExhausted {
        rounds: NET_MAX_ROUNDS,
        eps,
        missed: mask_bits(heavy),
    })
}

/// Drop sampled points whose removal keeps every heavy region hit;
/// deterministic reverse scan keeps the earliest draws.
fn prune_net(picked: &[usize], sigs: &[u64], heavy: u64, points: &[Point]) -> Vec<Point> {
    let mut unique: Vec<usize> = Vec::new();
    let mut seen = std::collections::HashSet::new();
    for &i in picked {
        if seen.insert(i) {
            unique.push(i);
        }
    }
    let mut kept: Vec<bool> = vec![true; unique.len()];
    for i in (0..unique.len()).rev() {
        let union_without: u64 = unique
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != i && kept[*j])
            .fold(0u64, |m, (_, &idx)| m | sigs[idx]);
        if heavy & !union_without == 0 {
            kept[i] = false;
        }
    }
    unique
        .iter()
        .zip(&kept)
        .filter(|(_, &k)| k)
        .map(|(&idx, _)| points[idx])
        .collect()
}

/// The full pipeline: candidates → covering LP → epsilon net at
/// eps = 1/τ* → hard stab verification.
pub fn pierce_p2(f: &RegionFamily, p: usize, seed: u64) -> Result<TransversalReport, TransversalError> {
    if p < 2 {
        return Err(TransversalError::BadP(p));
    }
    let n = f.len();
    // verify the (p,2)-property when the exact guard allows; beyond the
    // guard the caller asserts it
    let nu = if n <= PACKING_EXACT_CAP {
        let nu = packing_number(f, PackingMode::Exact)?;
        if nu > p - 1 {
            return Err(TransversalError::NotP2 { p, nu });
        }
        Some(nu)
    } else {
        None
    };

    let t0 = Instant::now();
    let lp = fractional_transversal(f)?;
    let lp_ms = t0.elapsed().as_secs_f64() * 1e3;

    let eps = (1.0 / lp.primal_value).min(1.0);
    let q = WeightedPointSet::from_lp(&lp);
    let t1 = Instant::now();
    let points = epsilon_net(&q, f, eps, seed)?;
    let net_ms = t1.elapsed().as_secs_f64() * 1e3;

    let report = TransversalReport {
        p,
        method: PierceMethod::Pipeline,
        nu,
        tau_frac: Some(lp.primal_value),
        tau_points: points,
        iterations: None,
        selected_regions: Vec::new(),
        stage_ms: StageTimes {
            lp_ms: Some(lp_ms),
            net_ms: Some(net_ms),
            greedy_ms: None,
        },
    };
    report.verify_stabs(f)?;
    Ok(report)
}

/// Neighborhood-removal scheme: select the region B whose closed
/// neighborhood N[B] has the smallest packing number (ties: smaller |N[B]|,
/// then lower id), pierce N[B] exactly (or by the pipeline beyond the
/// exact-cover cap), remove it, repeat. At most ν ≤ p−1 rounds.
pub fn greedy_pierce(f: &RegionFamily, p: usize) -> Result<TransversalReport, TransversalError> {
    if p < 2 {
        return Err(TransversalError::BadP(p));
    }
    let n = f.len();
    if n > PACKING_EXACT_CAP {
        return Err(TransversalError::PackingGuard(n));
    }
    let adj = intersection_masks(f)?;
    let nu = exact_packing_mask(&adj, full_mask(n)).len();
    if nu > p - 1 {
        return Err(TransversalError::NotP2 { p, nu });
    }

    let t0 = Instant::now();
    let mut remaining = full_mask(n);
    let mut points: Vec<Point> = Vec::new();
    let mut selected: Vec<usize> = Vec::new();
    while remaining != 0 {
        let mut best: Option<(usize, u32, usize)> = None;
        for b in mask_bits(remaining) {
            let nbhd = (adj[b] | (1u64 << b)) & remaining;
            let pack = exact_packing_mask(&adj, nbhd).len();
            let key = (pack, nbhd.count_ones(), b);
            if best.is_none_or(|k| key < k) {
                best = Some(key);
            }
        }
        let (pack_b, _, b) = best.expect("remaining non-empty");
        let nbhd = (adj[b] | (1u64 << b)) & remaining;
        let ids = mask_bits(nbhd);
        let sub = f.subfamily(&ids)?;
        let sub_points = if ids.len() <= GREEDY_EXACT_COVER_CAP {
            oracle::min_transversal_exact(&sub, &OracleBudget::default())?
        } else {
            pierce_p2(
                &sub,
                pack_b + 1,
                GREEDY_FALLBACK_SEED.wrapping_add(selected.len() as u64),
            )?
            .tau_points
        };
        points.extend(sub_points);
        selected.push(b);
        remaining &= !nbhd;
    }
    let greedy_ms = t0.elapsed().as_secs_f64() * 1e3;

    let mut seen = std::collections::HashSet::new();
    points.retain(|pt| seen.insert((pt.x.to_bits(), pt.y.to_bits())));

    let report = TransversalReport {
        p,
        method: PierceMethod::Greedy,
        nu: Some(nu),
        tau_frac: None,
        tau_points: points,
        iterations: Some(selected.len()),
        selected_regions: selected,
        stage_ms: StageTimes {
            lp_ms: None,
            net_ms: None,
            greedy_ms: Some(greedy_ms),
        },
    };
    report.verify_stabs(f)?;
    Ok(report)
}
