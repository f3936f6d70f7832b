//! Abstract hypergraphs, primal/dual constructions from geometry, Delaunay
//! graph extraction, trace subhypergraphs, friend pairs, and the hereditary
//! c-linearity check.
//!
//! A hypergraph here is a deduplicated set of non-empty vertex subsets. The
//! dual hypergraph of a region family has one vertex per region and one edge
//! per distinct containment signature over the family's candidate points;
//! the primal hypergraph has one vertex per point and one edge per region.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use thiserror::Error;

use crate::geometry::{Point, RegionFamily};

/// Exhaustive subset checks walk all 2^n subsets; this is the hard ceiling.
pub const EXHAUSTIVE_VERTEX_CAP: usize = 20;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HypergraphError {
    #[error("vertex {0} out of range for {1} vertices")]
    VertexOutOfRange(usize, usize),
    #[error("induced subset must be non-empty")]
    EmptySubset,
    #[error("exhaustive hereditary check limited to {EXHAUSTIVE_VERTEX_CAP} vertices, got {0}")]
    ExhaustiveTooLarge(usize),
    #[error("linearity constant must be positive, got {0}")]
    NonPositiveConstant(f64),
    #[error("point list must be non-empty")]
    EmptyPointSet,
}

/// H = (V, E): vertex count plus a deduplicated, sorted set of non-empty
/// edges. Edge multiplicity carries no information in any quantity used
/// here (k, friend pairs, Delaunay edges), so edges are plain sets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Hypergraph {
    n_vertices: usize,
    edges: Vec<Vec<usize>>,
}

impl Hypergraph {
    pub fn new(
        n_vertices: usize,
        edges: impl IntoIterator<Item = Vec<usize>>,
    ) -> Result<Self, HypergraphError> {
        let mut set: BTreeSet<Vec<usize>> = BTreeSet::new();
        for mut e in edges {
            e.sort_unstable();
            e.dedup();
            if e.is_empty() {
                continue;
            }
            let &max = e.last().expect("non-empty");
            if max >= n_vertices {
                return Err(HypergraphError::VertexOutOfRange(max, n_vertices));
            }
            set.insert(e);
        }
        Ok(Hypergraph {
            n_vertices,
            edges: set.into_iter().collect(),
        })
    }

    pub fn n_vertices(&self) -> usize {
        self.n_vertices
    }

    /// Edges in sorted order, each edge a sorted vertex list.
    pub fn edges(&self) -> &[Vec<usize>] {
        &self.edges
    }

    /// k = max edge size; 0 for an edgeless hypergraph.
    pub fn max_edge_size(&self) -> usize {
        self.edges.iter().map(|e| e.len()).max().unwrap_or(0)
    }

    /// Inclusion-maximal edges only.
    pub fn maximal_edges(&self) -> Vec<Vec<usize>> {
        self.edges
            .iter()
            .filter(|e| {
                !self
                    .edges
                    .iter()
                    .any(|f| f.len() > e.len() && is_subset(e, f))
            })
            .cloned()
            .collect()
    }

    /// Edges as bitmasks when the vertex count permits.
    pub(crate) fn edge_masks(&self) -> Option<Vec<u64>> {
        if self.n_vertices > 64 {
            return None;
        }
        Some(
            self.edges
                .iter()
                .map(|e| e.iter().fold(0u64, |m, &v| m | (1 << v)))
                .collect(),
        )
    }
}

fn is_subset(small: &[usize], big: &[usize]) -> bool {
    // both sorted
    let mut it = big.iter();
    small.iter().all(|v| it.any(|w| w == v))
}

/// Simple graph: the size-2 hyperedges live here.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    pub n_vertices: usize,
    pub edges: BTreeSet<(usize, usize)>,
}

impl Graph {
    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }
}

/// Dual hypergraph of a family: vertices are region ids, edges are the
/// distinct containment signatures at the family's candidate points.
pub fn dual_hypergraph(f: &RegionFamily) -> Hypergraph {
    let edges = f
        .candidate_points()
        .into_iter()
        .map(|p| f.signature(p));
    Hypergraph::new(f.len(), edges).expect("signatures index valid regions")
}

/// Dual hypergraph restricted to inclusion-maximal signatures.
pub fn maximal_dual_hypergraph(f: &RegionFamily) -> Hypergraph {
    let full = dual_hypergraph(f);
    let n = full.n_vertices();
    Hypergraph::new(n, full.maximal_edges()).expect("edges already valid")
}

/// Primal hypergraph: vertices are point indices, one edge per region
/// listing the points it contains (empty dropped, duplicates merged).
pub fn primal_hypergraph(
    points: &[Point],
    f: &RegionFamily,
) -> Result<Hypergraph, HypergraphError> {
    if points.is_empty() {
        return Err(HypergraphError::EmptyPointSet);
    }
    let edges = f.regions().iter().map(|r| {
        points
            .iter()
            .enumerate()
            .filter(|(_, p)| r.contains(**p))
            .map(|(i, _)| i)
            .collect::<Vec<_>>()
    });
    Hypergraph::new(points.len(), edges)
}

/// The Delaunay graph: exactly the size-2 hyperedges.
pub fn delaunay_graph(h: &Hypergraph) -> Graph {
    let edges = h
        .edges()
        .iter()
        .filter(|e| e.len() == 2)
        .map(|e| (e[0], e[1]))
        .collect();
    Graph {
        n_vertices: h.n_vertices(),
        edges,
    }
}

/// A trace subhypergraph together with the map from new vertex ids back to
/// the original ones.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InducedSubhypergraph {
    pub hypergraph: Hypergraph,
    /// `original_vertices[new_id] = old_id`, sorted ascending.
    pub original_vertices: Vec<usize>,
}

/// Trace subhypergraph on `s`: edges are `{e ∩ s}`, deduplicated, empty
/// dropped, vertices reindexed to `0..|s|`.
pub fn induced(h: &Hypergraph, s: &[usize]) -> Result<InducedSubhypergraph, HypergraphError> {
    let mut keep: Vec<usize> = s.to_vec();
    keep.sort_unstable();
    keep.dedup();
    if keep.is_empty() {
        return Err(HypergraphError::EmptySubset);
    }
    if let Some(&max) = keep.last() {
        if max >= h.n_vertices() {
            return Err(HypergraphError::VertexOutOfRange(max, h.n_vertices()));
        }
    }
    let mut new_id = vec![usize::MAX; h.n_vertices()];
    for (i, &v) in keep.iter().enumerate() {
        new_id[v] = i;
    }
    let edges = h.edges().iter().map(|e| {
        e.iter()
            .filter(|&&v| new_id[v] != usize::MAX)
            .map(|&v| new_id[v])
            .collect::<Vec<_>>()
    });
    Ok(InducedSubhypergraph {
        hypergraph: Hypergraph::new(keep.len(), edges)?,
        original_vertices: keep,
    })
}

/// X: all unordered pairs contained together in some edge.
pub fn friends_pairs(h: &Hypergraph) -> BTreeSet<(usize, usize)> {
    let mut out = BTreeSet::new();
    for e in h.edges() {
        for i in 0..e.len() {
            for j in (i + 1)..e.len() {
                out.insert((e[i], e[j]));
            }
        }
    }
    out
}

/// Headline quantities of a hypergraph under an assumed linearity constant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HypergraphStats {
    pub n: usize,
    pub k: usize,
    pub friend_count: usize,
    pub c: f64,
}

pub fn stats(h: &Hypergraph, c: f64) -> HypergraphStats {
    HypergraphStats {
        n: h.n_vertices(),
        k: h.max_edge_size(),
        friend_count: friends_pairs(h).len(),
        c,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LinearityMode {
    /// All 2^n − 1 non-empty subsets (n ≤ [`EXHAUSTIVE_VERTEX_CAP`]).
    Exhaustive,
    /// Random subsets; a falsifier, not a certificate.
    Sampled { trials: usize, seed: u64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinearityReport {
    pub passed: bool,
    /// Subset achieving the worst |E(G_S)| / |S| ratio (original vertex ids).
    pub worst_subset: Vec<usize>,
    pub worst_ratio: f64,
    pub mode: LinearityMode,
    pub subsets_checked: u64,
}

/// Does every trace subhypergraph's Delaunay graph satisfy |E(G_S)| < c·|S|?
pub fn check_hereditary_linearity(
    h: &Hypergraph,
    c: f64,
    mode: LinearityMode,
) -> Result<LinearityReport, HypergraphError> {
    if c <= 0.0 {
        return Err(HypergraphError::NonPositiveConstant(c));
    }
    match mode {
        LinearityMode::Exhaustive => {
            let n = h.n_vertices();
            if n > EXHAUSTIVE_VERTEX_CAP {
                return Err(HypergraphError::ExhaustiveTooLarge(n));
            }
            let masks: Vec<u64> = h
                .edge_masks()
                .expect("n ≤ 20 fits in a mask")
                .into_iter()
                .filter(|m| m.count_ones() >= 2)
                .collect();
            let mut passed = true;
            let mut worst_ratio = 0.0;
            let mut worst_subset = 0u64;
            let mut scratch: Vec<u64> = Vec::new();
            for subset in 1u64..(1u64 << n) {
                let count = delaunay_edge_count_mask(&masks, subset, &mut scratch);
                let size = subset.count_ones() as f64;
                let ratio = count as f64 / size;
                if ratio > worst_ratio {
                    worst_ratio = ratio;
                    worst_subset = subset;
                }
                if (count as f64) >= c * size {
                    passed = false;
                }
            }
            Ok(LinearityReport {
                passed,
                worst_subset: mask_to_vec(worst_subset),
                worst_ratio,
                mode,
                subsets_checked: (1u64 << n) - 1,
            })
        }
        LinearityMode::Sampled { trials, seed } => {
            let n = h.n_vertices();
            let mut rng = ChaCha20Rng::seed_from_u64(seed);
            let masks = h.edge_masks();
            let mut scratch: Vec<u64> = Vec::new();
            let mut passed = true;
            let mut worst_ratio = 0.0;
            let mut worst_subset: Vec<usize> = Vec::new();
            let mut all: Vec<usize> = (0..n).collect();
            for _ in 0..trials {
                let size = rng.gen_range(1..=n);
                all.shuffle(&mut rng);
                let mut subset = all[..size].to_vec();
                subset.sort_unstable();
                let count = match &masks {
                    Some(masks) => {
                        let m = subset.iter().fold(0u64, |acc, &v| acc | (1 << v));
                        delaunay_edge_count_mask(masks, m, &mut scratch)
                    }
                    None => {
                        let ind = induced(h, &subset)?;
                        delaunay_graph(&ind.hypergraph).edge_count()
                    }
                };
                let ratio = count as f64 / size as f64;
                if ratio > worst_ratio {
                    worst_ratio = ratio;
                    worst_subset = subset.clone();
                }
                if (count as f64) >= c * size as f64 {
                    passed = false;
                }
            }
            Ok(LinearityReport {
                passed,
                worst_subset,
                worst_ratio,
                mode,
                subsets_checked: trials as u64,
            })
        }
    }
}

/// Number of distinct size-2 traces of `masks` on `subset`.
fn delaunay_edge_count_mask(masks: &[u64], subset: u64, scratch: &mut Vec<u64>) -> usize {
    scratch.clear();
    for &e in masks {
        let t = e & subset;
        if t.count_ones() == 2 {
            scratch.push(t);
        }
    }
    scratch.sort_unstable();
    scratch.dedup();
    scratch.len()
}

fn mask_to_vec(mask: u64) -> Vec<usize> {
    (0..64).filter(|i| mask & (1 << i) != 0).collect()
}
