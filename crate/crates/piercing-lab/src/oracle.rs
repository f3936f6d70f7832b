//! Exact brute-force ground truth: minimum transversal, maximum packing,
//! VC dimension, and the candidate-dominance grid check. These back the
//! derived expected values in tests and the acceptance suite; they are
//! deliberately independent of the pipeline paths they certify.

use std::collections::HashMap;

use thiserror::Error;

use crate::geometry::{Point, RegionFamily};
use crate::hypergraph::Hypergraph;
use crate::lp::{self, LpError};
use crate::transversal::mask_bits;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleBudget {
    pub max_regions: usize,
    pub max_candidates: usize,
    pub max_vc_probe: usize,
}

impl Default for OracleBudget {
    fn default() -> Self {
        OracleBudget {
            max_regions: 40,
            max_candidates: 2000,
            max_vc_probe: 6,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OracleError {
    #[error("oracle budget exceeded: {what} = {got} > {cap}")]
    BudgetExceeded {
        what: &'static str,
        got: usize,
        cap: usize,
    },
    #[error("vc probe cap must be at most 8, got {0}")]
    ProbeTooLarge(usize),
    #[error("grid resolution must be at least 10, got {0}")]
    ResolutionTooSmall(usize),
    #[error(transparent)]
    Lp(#[from] LpError),
}

fn full_mask(n: usize) -> u64 {
    if n >= 64 {
        !0
    } else {
        (1u64 << n) - 1
    }
}

fn check_region_budget(f: &RegionFamily, budget: &OracleBudget) -> Result<(), OracleError> {
    let n = f.len();
    let cap = budget.max_regions.min(64);
    if n > cap {
        return Err(OracleError::BudgetExceeded {
            what: "regions",
            got: n,
            cap,
        });
    }
    Ok(())
}

/// Minimum-cardinality set of candidate points stabbing every region.
/// Iterative-deepening branch and bound over maximal candidate signatures,
/// starting at the LP packing bound; the first depth that admits a cover is
/// optimal because all smaller depths were exhausted.
pub fn min_transversal_exact(
    f: &RegionFamily,
    budget: &OracleBudget,
) -> Result<Vec<Point>, OracleError> {
    check_region_budget(f, budget)?;
    let candidates = f.candidate_points();
    if candidates.len() > budget.max_candidates {
        return Err(OracleError::BudgetExceeded {
            what: "candidates",
            got: candidates.len(),
            cap: budget.max_candidates,
        });
    }
    let n = f.len();
    let atlas = f.maximal_signature_atlas();
    let universe = full_mask(n);

    // Feasible dual packing value ≤ τ* ≤ OPT: a sound starting depth.
    let solve = lp::solve_packing(n, &atlas.masks)?;
    let dual_value: f64 = solve.var_values.iter().sum();
    let lower = ((dual_value - 1e-6).ceil().max(1.0)) as usize;

    for depth in lower..=n {
        let mut chosen: Vec<usize> = Vec::new();
        if cover_search(universe, &atlas.masks, depth, &mut chosen) {
            return Ok(chosen.into_iter().map(|i| atlas.points[i]).collect());
        }
    }
    unreachable!("anchors always yield a cover of size n")
}

fn cover_search(uncovered: u64, sets: &[u64], depth: usize, chosen: &mut Vec<usize>) -> bool {
    if uncovered == 0 {
        return true;
    }
    if depth == 0 {
        return false;
    }
    let max_cover = sets
        .iter()
        .map(|s| (s & uncovered).count_ones() as usize)
        .max()
        .unwrap_or(0);
    if max_cover == 0 {
        return false;
    }
    if (uncovered.count_ones() as usize).div_ceil(max_cover) > depth {
        return false;
    }
    // most constrained uncovered region: fewest candidate signatures cover it
    let elem = mask_bits(uncovered)
        .into_iter()
        .min_by_key(|&e| sets.iter().filter(|s| *s & (1 << e) != 0).count())
        .expect("uncovered non-empty");
    let mut options: Vec<usize> = (0..sets.len())
        .filter(|&i| sets[i] & (1 << elem) != 0)
        .collect();
    // max coverage first, ties to the lower index
    options.sort_by_key(|&i| (std::cmp::Reverse((sets[i] & uncovered).count_ones()), i));
    for i in options {
        chosen.push(i);
        if cover_search(uncovered & !sets[i], sets, depth - 1, chosen) {
            return true;
        }
        chosen.pop();
    }
    false
}

/// Maximum independent set in the intersection graph: an exact ν witness.
/// Min-degree branching over closed neighborhoods with a greedy start and
/// a matching-based upper bound.
pub fn max_packing_exact(
    f: &RegionFamily,
    budget: &OracleBudget,
) -> Result<Vec<usize>, OracleError> {
    check_region_budget(f, budget)?;
    let n = f.len();
    let mut adj = vec![0u64; n];
    for (i, j) in f.intersecting_pairs() {
        adj[i] |= 1 << j;
        adj[j] |= 1 << i;
    }
    let sub = full_mask(n);
    let greedy = greedy_independent(&adj, sub);
    let mut best = (greedy.count_ones() as usize, greedy);
    mis_search(&adj, sub, 0, &mut best);
    Ok(mask_bits(best.1))
}

fn greedy_independent(adj: &[u64], mut sub: u64) -> u64 {
    let mut set = 0u64;
    while sub != 0 {
        let v = mask_bits(sub)
            .into_iter()
            .min_by_key(|&v| ((adj[v] & sub).count_ones(), v))
            .expect("sub non-empty");
        set |= 1 << v;
        sub &= !(adj[v] | (1 << v));
    }
    set
}

/// |sub| − (greedy maximal matching): every matched edge loses at least one
/// endpoint, so this bounds any independent set from above.
fn matching_bound(adj: &[u64], sub: u64) -> usize {
    let mut matched = 0usize;
    let mut rem = sub;
    while rem != 0 {
        let v = rem.trailing_zeros() as usize;
        rem &= !(1u64 << v);
        let nb = adj[v] & rem;
        if nb != 0 {
            let u = nb.trailing_zeros() as usize;
            rem &= !(1u64 << u);
            matched += 1;
        }
    }
    sub.count_ones() as usize - matched
}

fn mis_search(adj: &[u64], sub: u64, current: u64, best: &mut (usize, u64)) {
    if sub == 0 {
        if (current.count_ones() as usize) > best.0 {
            *best = (current.count_ones() as usize, current);
        }
        return;
    }
    let cur = current.count_ones() as usize;
    if cur + matching_bound(adj, sub) <= best.0 {
        return;
    }
    let v = mask_bits(sub)
        .into_iter()
        .min_by_key(|&v| ((adj[v] & sub).count_ones(), v))
        .expect("sub non-empty");
    let deg = (adj[v] & sub).count_ones();
    if deg <= 1 {
        // isolated or pendant vertices join some maximum set by exchange
        mis_search(adj, sub & !(adj[v] | (1 << v)), current | (1 << v), best);
        return;
    }
    // every maximal independent set meets N[v]
    for u in mask_bits((adj[v] | (1 << v)) & sub) {
        mis_search(adj, sub & !(adj[u] | (1 << u)), current | (1 << u), best);
    }
}

/// Largest shattered probe size found, with a flag when the cap itself was
/// shattered (the true dimension may be larger).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VcReport {
    pub dimension: usize,
    pub saturated: bool,
    /// One maximal shattered vertex set.
    pub witness: Vec<usize>,
}

/// Exact VC dimension by shattering search, capped at `probe_cap ≤ 8`.
/// Traces are taken over the edge set with the empty trace always counted
/// as realized; shattering is monotone under taking subsets, so the search
/// only extends sets that are themselves shattered. Vertices with identical
/// edge membership can never be shattered together and are deduplicated.
pub fn vc_dimension_exact(h: &Hypergraph, probe_cap: usize) -> Result<VcReport, OracleError> {
    if probe_cap > 8 {
        return Err(OracleError::ProbeTooLarge(probe_cap));
    }
    let n = h.n_vertices();
    let edges = h.edges();
    let words = edges.len().div_ceil(64).max(1);
    let mut profiles: Vec<Vec<u64>> = vec![vec![0u64; words]; n];
    for (ei, e) in edges.iter().enumerate() {
        for &v in e {
            profiles[v][ei / 64] |= 1 << (ei % 64);
        }
    }
    let mut seen: HashMap<&[u64], usize> = HashMap::new();
    let mut reps: Vec<usize> = Vec::new();
    for (v, profile) in profiles.iter().enumerate() {
        if profile.iter().all(|&w| w == 0) {
            continue; // in no edge: its singleton trace is unrealizable
        }
        if !seen.contains_key(profile.as_slice()) {
            seen.insert(profile.as_slice(), v);
            reps.push(v);
        }
    }
    let mut best: Vec<usize> = Vec::new();
    let mut saturated = false;
    let mut current: Vec<usize> = Vec::new();
    if probe_cap > 0 {
        shatter_search(
            edges,
            &reps,
            0,
            probe_cap,
            &mut current,
            &mut best,
            &mut saturated,
        );
    }
    Ok(VcReport {
        dimension: best.len(),
        saturated,
        witness: best,
    })
}

fn is_shattered(edges: &[Vec<usize>], s: &[usize]) -> bool {
    let t = s.len();
    let want = (1usize << t) - 1; // empty trace is free
    let mut seen = vec![false; 1 << t];
    seen[0] = true;
    let mut remaining = want;
    for e in edges {
        let mut idx = 0usize;
        for (bit, &v) in s.iter().enumerate() {
            if e.binary_search(&v).is_ok() {
                idx |= 1 << bit;
            }
        }
        if !seen[idx] {
            seen[idx] = true;
            remaining -= 1;
            if remaining == 0 {
                return true;
            }
        }
    }
    false
}

#[allow(clippy::too_many_arguments)]
fn shatter_search(
    edges: &[Vec<usize>],
    reps: &[usize],
    start: usize,
    probe_cap: usize,
    current: &mut Vec<usize>,
    best: &mut Vec<usize>,
    saturated: &mut bool,
) {
    for i in start..reps.len() {
        if *saturated {
            return;
        }
        current.push(reps[i]);
        if is_shattered(edges, current) {
            if current.len() > best.len() {
                *best = current.clone();
            }
            if current.len() == probe_cap {
                *saturated = true;
                current.pop();
                return;
            }
            shatter_search(edges, reps, i + 1, probe_cap, current, best, saturated);
        }
        current.pop();
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridCheckReport {
    pub passed: bool,
    /// First grid point whose signature no candidate dominates.
    pub worst_point: Option<Point>,
    pub resolution: usize,
    pub points_checked: usize,
}

/// Finite-resolution dominance falsifier: over a `resolution²` grid spanning
/// the family's bounding box inflated by 5%, every grid-point signature must
/// be a subset of some candidate signature.
pub fn signature_grid_check(
    f: &RegionFamily,
    resolution: usize,
) -> Result<GridCheckReport, OracleError> {
    if resolution < 10 {
        return Err(OracleError::ResolutionTooSmall(resolution));
    }
    if f.len() > 64 {
        return Err(OracleError::BudgetExceeded {
            what: "regions",
            got: f.len(),
            cap: 64,
        });
    }
    let atlas = f.maximal_signature_atlas();
    let (lo, hi) = f.bounding_box();
    let (w, h) = (hi.x - lo.x, hi.y - lo.y);
    let (pad_x, pad_y) = (0.05 * w.max(1e-6), 0.05 * h.max(1e-6));
    let (x0, y0) = (lo.x - pad_x, lo.y - pad_y);
    let (sx, sy) = (
        (w + 2.0 * pad_x) / (resolution - 1) as f64,
        (h + 2.0 * pad_y) / (resolution - 1) as f64,
    );
    let mut checked = 0usize;
    for iy in 0..resolution {
        for ix in 0..resolution {
            let p = Point::new(x0 + sx * ix as f64, y0 + sy * iy as f64);
            let sig = f.signature_mask(p);
            checked += 1;
            if sig == 0 {
                continue;
            }
            if !atlas.masks.iter().any(|&m| sig & !m == 0) {
                return Ok(GridCheckReport {
                    passed: false,
                    worst_point: Some(p),
                    resolution,
                    points_checked: checked,
                });
            }
        }
    }
    Ok(GridCheckReport {
        passed: true,
        worst_point: None,
        resolution,
        points_checked: checked,
    })
}
