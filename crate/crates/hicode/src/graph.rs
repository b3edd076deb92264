//! Weighted undirected simple graph and node partitions (layers).
//!
//! Nodes are dense integers `0..n`. The graph is immutable after
//! construction; every mutation in the pipeline builds a fresh graph.

use crate::error::{Error, Result};
use std::collections::BTreeMap;

/// Weighted undirected simple graph. No self-loops, at most one edge per
/// unordered pair, all weights strictly positive (a zero-weight edge is
/// simply absent).
#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    adj: Vec<Vec<(u32, f64)>>,
    /// Canonical edge list: `u < v`, sorted lexicographically.
    edges: Vec<(u32, u32, f64)>,
    total_weight: f64,
}

impl Graph {
    /// Build a graph from an edge list. Duplicate pairs collapse by summing
    /// weights; the node id space is the contiguous hull `0..=max_id`.
    pub fn from_edges<I>(edges: I) -> Result<Graph>
    where
        I: IntoIterator<Item = (u32, u32, f64)>,
    {
        Self::from_edges_with_nodes(0, edges)
    }

    /// Like [`Graph::from_edges`] but guarantees at least `min_nodes` nodes,
    /// so trailing isolated nodes are representable.
    pub fn from_edges_with_nodes<I>(min_nodes: usize, edges: I) -> Result<Graph>
    where
        I: IntoIterator<Item = (u32, u32, f64)>,
    {
        let mut collapsed: BTreeMap<(u32, u32), f64> = BTreeMap::new();
        let mut n = min_nodes;
        for (u, v, w) in edges {
            if u == v {
                return Err(Error::SelfLoop(u));
            }
            if w < 0.0 || w.is_nan() {
                return Err(Error::InvalidWeight(w));
            }
            let key = if u < v { (u, v) } else { (v, u) };
            *collapsed.entry(key).or_insert(0.0) += w;
            n = n.max(key.1 as usize + 1);
        }

        let mut adj = vec![Vec::new(); n];
        let mut edge_list = Vec::with_capacity(collapsed.len());
        let mut total_weight = 0.0;
        for ((u, v), w) in collapsed {
            if w == 0.0 {
                continue;
            }
            adj[u as usize].push((v, w));
            adj[v as usize].push((u, w));
            edge_list.push((u, v, w));
            total_weight += w;
        }
        Ok(Graph {
            adj,
            edges: edge_list,
            total_weight,
        })
    }

    /// Unweighted convenience constructor: every pair gets weight 1.0.
    pub fn from_pairs<I>(pairs: I) -> Result<Graph>
    where
        I: IntoIterator<Item = (u32, u32)>,
    {
        Self::from_edges(pairs.into_iter().map(|(u, v)| (u, v, 1.0)))
    }

    pub fn node_count(&self) -> usize {
        self.adj.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn total_weight(&self) -> f64 {
        self.total_weight
    }

    pub fn is_empty(&self) -> bool {
        self.adj.is_empty()
    }

    /// Neighbors of `u` with edge weights.
    pub fn neighbors(&self, u: u32) -> &[(u32, f64)] {
        &self.adj[u as usize]
    }

    /// Canonical edge list (`u < v`, sorted).
    pub fn edges(&self) -> &[(u32, u32, f64)] {
        &self.edges
    }

    /// Weighted degree of `u`.
    pub fn degree(&self, u: u32) -> f64 {
        self.adj[u as usize].iter().map(|&(_, w)| w).sum()
    }

    /// True when all edge weights are equal (within 1e-12). Vacuously true
    /// for an edgeless graph.
    pub fn has_uniform_weights(&self) -> bool {
        match self.edges.first() {
            None => true,
            Some(&(_, _, w0)) => self.edges.iter().all(|&(_, _, w)| (w - w0).abs() <= 1e-12),
        }
    }
}

/// A partition of the node set into disjoint communities. Community ids are
/// dense `0..community_count`, with no empty community.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Layer {
    assignment: Vec<u32>,
    community_count: usize,
}

impl Layer {
    /// Build a layer from a raw per-node community id vector. Ids are
    /// compacted to `0..c` in order of first appearance.
    pub fn from_assignment(raw: &[u32]) -> Layer {
        let mut remap: BTreeMap<u32, u32> = BTreeMap::new();
        let mut next = 0u32;
        let assignment = raw
            .iter()
            .map(|&c| {
                *remap.entry(c).or_insert_with(|| {
                    let id = next;
                    next += 1;
                    id
                })
            })
            .collect();
        Layer {
            assignment,
            community_count: next as usize,
        }
    }

    /// Build a layer from explicit community node sets over `0..n`. Errors if
    /// the sets are not a partition of the full node range.
    pub fn from_communities(communities: &[Vec<u32>], n: usize) -> Result<Layer> {
        let mut assignment = vec![u32::MAX; n];
        for (cid, members) in communities.iter().enumerate() {
            for &v in members {
                if v as usize >= n {
                    return Err(Error::IncompleteLayer(format!(
                        "node {v} out of range for {n} nodes"
                    )));
                }
                if assignment[v as usize] != u32::MAX {
                    return Err(Error::IncompleteLayer(format!(
                        "node {v} assigned to more than one community"
                    )));
                }
                assignment[v as usize] = cid as u32;
            }
        }
        if let Some(v) = assignment.iter().position(|&c| c == u32::MAX) {
            return Err(Error::IncompleteLayer(format!(
                "node {v} missing from assignment"
            )));
        }
        Ok(Layer::from_assignment(&assignment))
    }

    /// All nodes in one community.
    pub fn whole(n: usize) -> Layer {
        Layer {
            assignment: vec![0; n],
            community_count: usize::from(n > 0),
        }
    }

    /// Every node its own community.
    pub fn singletons(n: usize) -> Layer {
        Layer {
            assignment: (0..n as u32).collect(),
            community_count: n,
        }
    }

    pub fn node_count(&self) -> usize {
        self.assignment.len()
    }

    pub fn community_count(&self) -> usize {
        self.community_count
    }

    /// Community id of node `v`.
    pub fn community_of(&self, v: u32) -> u32 {
        self.assignment[v as usize]
    }

    pub fn assignment(&self) -> &[u32] {
        &self.assignment
    }

    /// Materialize community node sets, each sorted ascending.
    pub fn communities(&self) -> Vec<Vec<u32>> {
        let mut out = vec![Vec::new(); self.community_count];
        for (v, &c) in self.assignment.iter().enumerate() {
            out[c as usize].push(v as u32);
        }
        out
    }

    fn check_covers(&self, g: &Graph) -> Result<()> {
        if self.assignment.len() != g.node_count() {
            return Err(Error::IncompleteLayer(format!(
                "layer covers {} nodes, graph has {}",
                self.assignment.len(),
                g.node_count()
            )));
        }
        Ok(())
    }
}

/// Aggregate quantities of one community within a graph.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CommunityTally {
    /// Number of member nodes.
    pub size: usize,
    /// Number of intra-community edges.
    pub intra_edges: usize,
    /// Summed weight of intra-community edges.
    pub intra_weight: f64,
    /// Summed weight of edges with exactly one endpoint inside.
    pub boundary_weight: f64,
}

/// Per-community `(n_C, e_C, w_C, boundary)` tallies for `layer` on `g`,
/// indexed by community id. Single pass over the edge list.
pub fn community_tallies(g: &Graph, layer: &Layer) -> Result<Vec<CommunityTally>> {
    layer.check_covers(g)?;
    let mut tallies = vec![
        CommunityTally {
            size: 0,
            intra_edges: 0,
            intra_weight: 0.0,
            boundary_weight: 0.0,
        };
        layer.community_count()
    ];
    for &c in layer.assignment() {
        tallies[c as usize].size += 1;
    }
    for &(u, v, w) in g.edges() {
        let cu = layer.community_of(u) as usize;
        let cv = layer.community_of(v) as usize;
        if cu == cv {
            tallies[cu].intra_edges += 1;
            tallies[cu].intra_weight += w;
        } else {
            tallies[cu].boundary_weight += w;
            tallies[cv].boundary_weight += w;
        }
    }
    Ok(tallies)
}
