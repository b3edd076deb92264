//! Layered stochastic-blockmodel generator. Each layer independently
//! assigns nodes to communities uniformly at random and samples a G(n, p)
//! graph inside every community; the output graph is the unweighted union
//! of all layers' edges.

use crate::error::{Error, Result};
use crate::exec;
use crate::graph::{Graph, Layer};
use crate::seed;
use rand::Rng;
use std::collections::BTreeSet;

/// One planted layer: how many communities and the intra-community edge
/// probability.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LayerSpec {
    pub num_communities: usize,
    pub intra_p: f64,
}

impl LayerSpec {
    pub fn new(num_communities: usize, intra_p: f64) -> Self {
        LayerSpec {
            num_communities,
            intra_p,
        }
    }
}

/// A generated graph together with its planted ground-truth layers.
#[derive(Debug, Clone)]
pub struct SyntheticInstance {
    pub graph: Graph,
    pub planted: Vec<Layer>,
    pub n: usize,
    pub specs: Vec<LayerSpec>,
    pub seed: u64,
}

fn validate(n: usize, specs: &[LayerSpec]) -> Result<()> {
    if n < 2 {
        return Err(Error::InvalidParam(format!("need at least 2 nodes, got {n}")));
    }
    if specs.is_empty() {
        return Err(Error::InvalidParam("need at least one layer spec".into()));
    }
    for (i, spec) in specs.iter().enumerate() {
        if spec.num_communities == 0 || spec.num_communities > n {
            return Err(Error::InvalidParam(format!(
                "layer {}: num_communities {} out of range 1..={n}",
                i + 1,
                spec.num_communities
            )));
        }
        if !(0.0..=1.0).contains(&spec.intra_p) {
            return Err(Error::InvalidParam(format!(
                "layer {}: intra_p {} not a probability",
                i + 1,
                spec.intra_p
            )));
        }
    }
    Ok(())
}

/// Generate a layered blockmodel instance. Deterministic per seed: node
/// assignment and per-community edge sampling each consume their own
/// derived stream, so results do not depend on evaluation order.
pub fn generate(n: usize, specs: &[LayerSpec], gen_seed: u64) -> Result<SyntheticInstance> {
    validate(n, specs)?;
    let mut planted = Vec::with_capacity(specs.len());
    let mut union: BTreeSet<(u32, u32)> = BTreeSet::new();

    for (li, spec) in specs.iter().enumerate() {
        let mut rng = seed::rng(gen_seed, "assign", li as u64, 0);
        let assignment: Vec<u32> = (0..n)
            .map(|_| rng.gen_range(0..spec.num_communities as u32))
            .collect();
        let layer = Layer::from_assignment(&assignment);
        let communities = layer.communities();

        let p = spec.intra_p;
        let sampled = exec::map_indexed(communities.len(), |c| {
            let members = &communities[c];
            let mut rng = seed::rng(gen_seed, "edges", li as u64, c as u64);
            let mut edges = Vec::new();
            for i in 0..members.len() {
                for j in (i + 1)..members.len() {
                    if rng.gen::<f64>() < p {
                        edges.push((members[i], members[j]));
                    }
                }
            }
            edges
        });
        for edges in sampled {
            union.extend(edges);
        }
        planted.push(layer);
    }

    let graph = Graph::from_edges_with_nodes(n, union.into_iter().map(|(u, v)| (u, v, 1.0)))?;
    Ok(SyntheticInstance {
        graph,
        planted,
        n,
        specs: specs.to_vec(),
        seed: gen_seed,
    })
}

/// Analytic expectation of the union edge count. For a fixed node pair the
/// chance of co-membership in layer `l` is `1 / k_l`, so
/// `E = C(n, 2) * (1 - prod_l (1 - p_l / k_l))`.
pub fn expected_edge_count(n: usize, specs: &[LayerSpec]) -> f64 {
    let pairs = n as f64 * (n as f64 - 1.0) / 2.0;
    let no_edge: f64 = specs
        .iter()
        .map(|s| 1.0 - s.intra_p / s.num_communities as f64)
        .product();
    pairs * (1.0 - no_edge)
}

/// The benchmark presets and their scaled-down variants.
pub mod presets {
    use super::LayerSpec;

    /// Node count used by the standard presets.
    pub const PRESET_NODES: usize = 3000;

    /// Two hidden layers: 100 communities at p = 0.16 over 50 communities
    /// at p = 0.08.
    pub fn synl2() -> Vec<LayerSpec> {
        vec![LayerSpec::new(100, 0.16), LayerSpec::new(50, 0.08)]
    }

    /// Three hidden layers: the two-layer preset plus 30 communities at
    /// p = 0.048.
    pub fn synl3() -> Vec<LayerSpec> {
        vec![
            LayerSpec::new(100, 0.16),
            LayerSpec::new(50, 0.08),
            LayerSpec::new(30, 0.048),
        ]
    }

    /// The two-layer preset rescaled to `n` nodes, keeping community sizes
    /// (30 and 60) and densities fixed. Handy for fast tests.
    pub fn scaled(n: usize) -> Vec<LayerSpec> {
        vec![
            LayerSpec::new((n / 30).max(1), 0.16),
            LayerSpec::new((n / 60).max(1), 0.08),
        ]
    }
}
