//! Structure-reduction operators. Each one weakens a detected layer's
//! intra-community signal so that weaker layers underneath become visible
//! to the base detector.
//!
//! `RemoveEdge` deletes all intra-community edges. `ReduceEdge` randomly
//! deletes intra-community edges until the expected intra density matches
//! the background density. `ReduceWeight` rescales intra-community edge
//! weights deterministically to the same target.
//!
//! The density ratio applied to a community C is `q_C / p_C` clamped to
//! [0, 1], where `p_C` is the intra-community density and `q_C` the
//! background density. Published descriptions of this operator print the
//! inverted ratio `p_C / q_C` with removal probability `1 - p_C/q_C`, which
//! is negative whenever reduction is actually needed; the clamped `q_C/p_C`
//! form realizes the stated intent (intra density reduced to background).

use crate::error::{Error, Result};
use crate::exec;
use crate::graph::{community_tallies, Graph, Layer};
use crate::seed;
use rand::Rng;

/// Weights below this are treated as zero and pruned from reduced graphs.
pub const WEIGHT_EPSILON: f64 = 1e-12;

/// Which reduction operator to apply.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReductionMethod {
    RemoveEdge,
    ReduceEdge,
    ReduceWeight,
}

impl ReductionMethod {
    pub fn name(self) -> &'static str {
        match self {
            ReductionMethod::RemoveEdge => "remove",
            ReductionMethod::ReduceEdge => "reduce-edge",
            ReductionMethod::ReduceWeight => "reduce-weight",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "remove" => Ok(ReductionMethod::RemoveEdge),
            "reduce-edge" => Ok(ReductionMethod::ReduceEdge),
            "reduce-weight" => Ok(ReductionMethod::ReduceWeight),
            other => Err(Error::ConfigError(format!(
                "unknown reduction method {other:?} (expected remove, reduce-edge or reduce-weight)"
            ))),
        }
    }
}

/// A reduction operator plus the seed for its random stream (used only by
/// `ReduceEdge`).
#[derive(Debug, Clone, Copy)]
pub struct ReductionSpec {
    pub method: ReductionMethod,
    pub seed: u64,
}

impl ReductionSpec {
    pub fn new(method: ReductionMethod, seed: u64) -> Self {
        ReductionSpec { method, seed }
    }

    /// Apply this reduction to `g` for layer `layer`.
    pub fn apply(&self, g: &Graph, layer: &Layer) -> Result<Graph> {
        match self.method {
            ReductionMethod::RemoveEdge => remove_edge_reduce(g, layer),
            ReductionMethod::ReduceEdge => reduce_edge_reduce(g, layer, self.seed),
            ReductionMethod::ReduceWeight => reduce_weight_reduce(g, layer),
        }
    }
}

/// Intra vs background density of one community, and the keep/rescale ratio
/// the reduction applies to it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CommunityDensities {
    /// Intra-community density p_C (count- or weight-based).
    pub intra: f64,
    /// Background density q_C over all pairs outside the community.
    pub background: f64,
    /// clamp(q_C / p_C, 0, 1); 0 when the background pair count is zero.
    pub ratio: f64,
}

/// Per-community densities for `layer` on `g`, indexed by community id.
/// `None` marks communities the reduction skips: fewer than two members, or
/// no intra-community edges. With `weighted`, densities use summed edge
/// weights in place of edge counts.
pub fn community_densities(
    g: &Graph,
    layer: &Layer,
    weighted: bool,
) -> Result<Vec<Option<CommunityDensities>>> {
    let tallies = community_tallies(g, layer)?;
    let n = g.node_count() as f64;
    let total = if weighted {
        g.total_weight()
    } else {
        g.edge_count() as f64
    };
    let all_pairs = n * (n - 1.0) / 2.0;
    Ok(tallies
        .iter()
        .map(|t| {
            if t.size < 2 {
                return None;
            }
            let intra_mass = if weighted {
                t.intra_weight
            } else {
                t.intra_edges as f64
            };
            if intra_mass <= 0.0 {
                return None;
            }
            let nc = t.size as f64;
            let intra_pairs = nc * (nc - 1.0) / 2.0;
            let rest_pairs = all_pairs - intra_pairs;
            let p = intra_mass / intra_pairs;
            let (q, ratio) = if rest_pairs <= 0.0 {
                // The community spans the whole graph: no background to
                // match, treated as full reduction.
                (0.0, 0.0)
            } else {
                let q = (total - intra_mass) / rest_pairs;
                (q, (q / p).clamp(0.0, 1.0))
            };
            Some(CommunityDensities {
                intra: p,
                background: q,
                ratio,
            })
        })
        .collect())
}

/// Delete every intra-community edge; inter-community edges and the node
/// set are unchanged.
pub fn remove_edge_reduce(g: &Graph, layer: &Layer) -> Result<Graph> {
    // Validates coverage.
    community_tallies(g, layer)?;
    let kept = g
        .edges()
        .iter()
        .copied()
        .filter(|&(u, v, _)| layer.community_of(u) != layer.community_of(v));
    Graph::from_edges_with_nodes(g.node_count(), kept)
}

/// Randomly delete intra-community edges so the expected intra density of
/// each community matches its background density. Requires uniform edge
/// weights. Each community consumes its own seed-derived stream, so the
/// result is independent of evaluation order.
pub fn reduce_edge_reduce(g: &Graph, layer: &Layer, seed: u64) -> Result<Graph> {
    if !g.has_uniform_weights() {
        return Err(Error::HeterogeneousWeights(
            "reduce-edge samples edges and needs all weights equal".into(),
        ));
    }
    let densities = community_densities(g, layer, false)?;

    // Intra edge indices per community, ascending (edge list is canonical).
    let mut intra: Vec<Vec<usize>> = vec![Vec::new(); layer.community_count()];
    for (i, &(u, v, _)) in g.edges().iter().enumerate() {
        let cu = layer.community_of(u);
        if cu == layer.community_of(v) {
            intra[cu as usize].push(i);
        }
    }

    let dropped_per_community = exec::map_indexed(layer.community_count(), |c| {
        let ratio = match densities[c] {
            Some(d) if d.ratio < 1.0 => d.ratio,
            _ => return Vec::new(),
        };
        let mut rng = seed::rng(seed, "reduce-edge-community", c as u64, 0);
        intra[c]
            .iter()
            .copied()
            .filter(|_| rng.gen::<f64>() >= ratio)
            .collect::<Vec<usize>>()
    });

    let mut keep = vec![true; g.edge_count()];
    for dropped in dropped_per_community {
        for i in dropped {
            keep[i] = false;
        }
    }
    let kept = g
        .edges()
        .iter()
        .enumerate()
        .filter(|&(i, _)| keep[i])
        .map(|(_, &e)| e);
    Graph::from_edges_with_nodes(g.node_count(), kept)
}

/// Deterministically rescale intra-community edge weights by `q_C / p_C`
/// (densities computed on weights), so each reduced community's intra
/// weight density equals the original background density. Edges whose
/// weight falls below [`WEIGHT_EPSILON`] are dropped.
pub fn reduce_weight_reduce(g: &Graph, layer: &Layer) -> Result<Graph> {
    let densities = community_densities(g, layer, true)?;
    let new_edges = exec::map_slice(g.edges(), |&(u, v, w)| {
        let cu = layer.community_of(u);
        if cu != layer.community_of(v) {
            return (u, v, w);
        }
        match densities[cu as usize] {
            Some(d) if d.ratio < 1.0 => (u, v, w * d.ratio),
            _ => (u, v, w),
        }
    });
    let kept = new_edges.into_iter().filter(|&(_, _, w)| w >= WEIGHT_EPSILON);
    Graph::from_edges_with_nodes(g.node_count(), kept)
}
