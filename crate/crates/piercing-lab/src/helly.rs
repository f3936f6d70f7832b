//! Fractional-Helly machinery for hypergraphs with a hereditarily c-linear
//! Delaunay graph: friend density, a certified lower bound on the maximum
//! edge size, and a Monte-Carlo validation of the random-trace inequality
//! the bound is derived from.
//!
//! The certificate comes from the inequality chain
//! `(1-x)^(k-2) · x² · |X| ≤ E|E(G')| ≤ c·x·n` for a trace on a random
//! vertex subset drawn with probability x. Substituting `x = 1/(k-2)` and
//! `(1 - 1/m)^m ≥ 1/4` for `m ≥ 2` gives `|X| ≤ 4c·n·(k-2)` for `k ≥ 4`;
//! `x = 1/2` handles `k = 3` (`|X| ≤ 4c·n`), and `k ≤ 2` forces
//! `|X| = |E(Delaunay)| < c·n` outright.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use thiserror::Error;

use crate::hypergraph::{delaunay_graph, friends_pairs, induced, Hypergraph};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HellyError {
    #[error("friend density needs at least 2 vertices, got {0}")]
    TooFewVertices(usize),
    #[error("edgeless hypergraph has no deep edge")]
    EdgelessHypergraph,
    #[error("sampling probability must lie in (0,1), got {0}")]
    BadProbability(f64),
    #[error("at least one trial required")]
    NoTrials,
}

/// Outcome of the deep-edge analysis on one hypergraph.
#[derive(Debug, Clone, PartialEq)]
pub struct HellyReport {
    /// Friend density α = |X| / C(n,2).
    pub alpha: f64,
    /// Max edge size actually present.
    pub k_observed: usize,
    /// Certified lower bound on the max edge size under hereditary
    /// c-linearity.
    pub k_certified: usize,
    /// Linearity constant the certificate assumes.
    pub c: f64,
    /// k_certified / n.
    pub beta: f64,
}

/// α: fraction of vertex pairs that are friends.
pub fn friend_density(h: &Hypergraph) -> Result<f64, HellyError> {
    let n = h.n_vertices();
    if n < 2 {
        return Err(HellyError::TooFewVertices(n));
    }
    let pairs = (n * (n - 1) / 2) as f64;
    Ok(friends_pairs(h).len() as f64 / pairs)
}

/// Certified lower bound on the maximum edge size of any hypergraph with a
/// hereditarily c-linear Delaunay graph and `x_count` friend pairs.
pub fn certified_deep_bound(n: usize, c: f64, x_count: usize) -> usize {
    assert!(n >= 1 && c > 0.0, "n ≥ 1 and c > 0 required");
    let x = x_count as f64;
    let cn = c * n as f64;
    if x_count == 0 {
        1
    } else if x <= cn {
        2
    } else if x <= 4.0 * cn {
        3
    } else {
        (x / (4.0 * cn)).floor() as usize + 2
    }
}

/// The maximum-size edge together with the certificate report.
/// Ties break to the lexicographically smallest edge.
pub fn deep_edge(h: &Hypergraph, c: f64) -> Result<(HellyReport, Vec<usize>), HellyError> {
    let n = h.n_vertices();
    if n < 2 {
        return Err(HellyError::TooFewVertices(n));
    }
    let witness = h
        .edges()
        .iter()
        .max_by(|a, b| a.len().cmp(&b.len()).then(b.cmp(a)))
        .ok_or(HellyError::EdgelessHypergraph)?
        .clone();
    let x_count = friends_pairs(h).len();
    let k_certified = certified_deep_bound(n, c, x_count);
    let report = HellyReport {
        alpha: friend_density(h)?,
        k_observed: witness.len(),
        k_certified,
        c,
        beta: k_certified as f64 / n as f64,
    };
    Ok((report, witness))
}

/// Monte-Carlo validation of the random-trace inequality on one hypergraph.
#[derive(Debug, Clone, PartialEq)]
pub struct FriendLemmaReport {
    /// Sample mean of |E(G')| over random traces.
    pub empirical_mean: f64,
    /// Standard error of the mean.
    pub std_err: f64,
    /// (1-x)^(k-2) · x² · |X|.
    pub lower_bound: f64,
    /// c · x · n.
    pub upper_bound_cxn: f64,
    /// lower_bound ≤ mean + 3σ.
    pub lower_ok: bool,
    /// mean − 3σ ≤ c·x·n (meaningful when h is hereditarily c-linear).
    pub upper_ok: bool,
    pub trials: usize,
    pub x: f64,
}

/// Estimate E|E(G')| over traces on random vertex subsets (each vertex kept
/// independently with probability `x`) and compare against both sides of
/// the certificate inequality at the 3σ level.
pub fn validate_friend_lemma(
    h: &Hypergraph,
    c: f64,
    x: f64,
    trials: usize,
    seed: u64,
) -> Result<FriendLemmaReport, HellyError> {
    if !(0.0 < x && x < 1.0) {
        return Err(HellyError::BadProbability(x));
    }
    if trials == 0 {
        return Err(HellyError::NoTrials);
    }
    let n = h.n_vertices();
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let masks = h.edge_masks();
    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    let mut scratch: Vec<u64> = Vec::new();
    let mut subset: Vec<usize> = Vec::new();
    for _ in 0..trials {
        let count = match &masks {
            Some(masks) => {
                let mut m = 0u64;
                for v in 0..n {
                    if rng.gen_bool(x) {
                        m |= 1 << v;
                    }
                }
                scratch.clear();
                for &e in masks {
                    let t = e & m;
                    if t.count_ones() == 2 {
                        scratch.push(t);
                    }
                }
                scratch.sort_unstable();
                scratch.dedup();
                scratch.len()
            }
            None => {
                subset.clear();
                subset.extend((0..n).filter(|_| rng.gen_bool(x)));
                if subset.is_empty() {
                    0
                } else {
                    delaunay_graph(&induced(h, &subset).expect("non-empty").hypergraph)
                        .edge_count()
                }
            }
        };
        sum += count as f64;
        sum_sq += (count * count) as f64;
    }
    let t = trials as f64;
    let mean = sum / t;
    let var = (sum_sq / t - mean * mean).max(0.0);
    let std_err = (var / t).sqrt();
    let k = h.max_edge_size();
    let x_count = friends_pairs(h).len() as f64;
    let lower_bound = (1.0 - x).powi(k.saturating_sub(2) as i32) * x * x * x_count;
    let upper_bound_cxn = c * x * n as f64;
    Ok(FriendLemmaReport {
        empirical_mean: mean,
        std_err,
        lower_bound,
        upper_bound_cxn,
        lower_ok: lower_bound <= mean + 3.0 * std_err,
        upper_ok: mean - 3.0 * std_err <= upper_bound_cxn,
        trials,
        x,
    })
}
