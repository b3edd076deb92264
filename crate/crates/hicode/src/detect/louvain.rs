//! Louvain modularity maximization: greedy single-node moves followed by
//! graph aggregation. The whole pyramid restarts from the base graph until
//! a node-level pass makes no move, so the returned partition is a local
//! maximum under single-node moves of the original graph as well as under
//! community merges.

use super::Detector;
use crate::error::{Error, Result};
use crate::graph::{Graph, Layer};
use crate::seed;
use rand::seq::SliceRandom;
use rand_chacha::ChaCha8Rng;

/// A move must improve modularity by more than this to be taken. Gains are
/// computed on weight ratios, so the threshold is invariant under rescaling
/// all edge weights.
const GAIN_EPSILON: f64 = 1e-9;

/// Weight-aware Louvain detector.
pub struct Louvain;

impl Detector for Louvain {
    fn name(&self) -> &'static str {
        "louvain"
    }

    fn supports_weights(&self) -> bool {
        true
    }

    fn detect(&self, g: &Graph, seed: u64) -> Result<Layer> {
        louvain_detect(g, seed)
    }
}

/// Compact arbitrary community ids to dense `0..c` in first-appearance
/// order over node index.
fn compact_ids(raw: &[u32]) -> (Vec<u32>, usize) {
    let mut remap = vec![u32::MAX; raw.len()];
    let mut next = 0u32;
    let dense = raw
        .iter()
        .map(|&c| {
            if remap[c as usize] == u32::MAX {
                remap[c as usize] = next;
                next += 1;
            }
            remap[c as usize]
        })
        .collect();
    (dense, next as usize)
}

/// Working graph for one aggregation level. Self-loops carry the internal
/// weight of already-merged communities (stored once; they contribute twice
/// to the node degree).
struct LevelGraph {
    adj: Vec<Vec<(u32, f64)>>,
    self_loop: Vec<f64>,
    degree: Vec<f64>,
    total_weight: f64,
}

impl LevelGraph {
    fn from_graph(g: &Graph) -> LevelGraph {
        let n = g.node_count();
        let adj: Vec<Vec<(u32, f64)>> = (0..n).map(|v| g.neighbors(v as u32).to_vec()).collect();
        let degree: Vec<f64> = adj.iter().map(|nb| nb.iter().map(|&(_, w)| w).sum()).collect();
        LevelGraph {
            adj,
            self_loop: vec![0.0; n],
            degree,
            total_weight: g.total_weight(),
        }
    }

    fn len(&self) -> usize {
        self.adj.len()
    }

    /// One phase of greedy single-node moves starting from `init`. Visit
    /// order is a fresh seed-determined permutation each pass; ties keep
    /// the current community. Returns the final assignment (ids as in
    /// `init`, not compacted) and whether anything moved.
    fn local_moves(&self, init: &[u32], rng: &mut ChaCha8Rng) -> (Vec<u32>, bool) {
        let n = self.len();
        let two_w = 2.0 * self.total_weight;
        let mut node_to_comm = init.to_vec();
        let mut comm_tot = vec![0.0f64; n];
        for (v, &c) in node_to_comm.iter().enumerate() {
            comm_tot[c as usize] += self.degree[v];
        }
        let mut moved_any = false;

        // Scratch accumulator for weights to neighboring communities, with a
        // touched list so candidate order stays deterministic.
        let mut comm_weight = vec![0.0f64; n];
        let mut touched: Vec<u32> = Vec::new();
        let mut order: Vec<u32> = (0..n as u32).collect();

        loop {
            let mut moves_this_pass = 0usize;
            order.shuffle(rng);
            for &v in &order {
                let vi = v as usize;
                let k = self.degree[vi];
                let cur = node_to_comm[vi];

                touched.clear();
                for &(u, w) in &self.adj[vi] {
                    let c = node_to_comm[u as usize];
                    if comm_weight[c as usize] == 0.0 {
                        touched.push(c);
                    }
                    comm_weight[c as usize] += w;
                }

                comm_tot[cur as usize] -= k;
                let gain = |c: u32| -> f64 {
                    comm_weight[c as usize] / self.total_weight
                        - k * comm_tot[c as usize] / (two_w * self.total_weight)
                };
                let mut best = cur;
                let mut best_gain = gain(cur);
                for &c in &touched {
                    if c == cur {
                        continue;
                    }
                    let g = gain(c);
                    if g > best_gain + GAIN_EPSILON {
                        best = c;
                        best_gain = g;
                    }
                }
                comm_tot[best as usize] += k;
                if best != cur {
                    node_to_comm[vi] = best;
                    moves_this_pass += 1;
                }

                for &c in &touched {
                    comm_weight[c as usize] = 0.0;
                }
            }
            if moves_this_pass == 0 {
                break;
            }
            moved_any = true;
        }
        (node_to_comm, moved_any)
    }

    /// Collapse communities into single nodes. `dense` must hold dense ids
    /// `0..num_communities`.
    fn aggregate(&self, dense: &[u32], num_communities: usize) -> LevelGraph {
        let mut self_loop = vec![0.0f64; num_communities];
        let mut cross: Vec<Vec<(u32, f64)>> = vec![Vec::new(); num_communities];
        for v in 0..self.len() {
            let cv = dense[v];
            self_loop[cv as usize] += self.self_loop[v];
            for &(u, w) in &self.adj[v] {
                let cu = dense[u as usize];
                if cu == cv {
                    // Each intra edge appears twice in the adjacency scan.
                    self_loop[cv as usize] += w / 2.0;
                } else {
                    cross[cv as usize].push((cu, w));
                }
            }
        }

        let mut adj = vec![Vec::new(); num_communities];
        for (v, mut entries) in cross.into_iter().enumerate() {
            entries.sort_unstable_by_key(|&(u, _)| u);
            let mut merged: Vec<(u32, f64)> = Vec::new();
            for (u, w) in entries {
                match merged.last_mut() {
                    Some(last) if last.0 == u => last.1 += w,
                    _ => merged.push((u, w)),
                }
            }
            adj[v] = merged;
        }
        let degree: Vec<f64> = (0..num_communities)
            .map(|v| adj[v].iter().map(|&(_, w)| w).sum::<f64>() + 2.0 * self_loop[v])
            .collect();
        LevelGraph {
            adj,
            self_loop,
            degree,
            total_weight: self.total_weight,
        }
    }
}

/// Detect one layer by Louvain modularity maximization. Single-node moves
/// iterate until none improves modularity by more than 1e-9; aggregation
/// repeats until no merge occurs; the pyramid restarts from the base graph
/// until the node-level phase is silent. Isolated nodes end up in
/// singleton communities.
pub fn louvain_detect(g: &Graph, detect_seed: u64) -> Result<Layer> {
    if g.is_empty() {
        return Err(Error::EmptyGraph);
    }
    let n = g.node_count();
    if g.total_weight() == 0.0 {
        return Ok(Layer::singletons(n));
    }

    let mut rng = seed::rng(detect_seed, "louvain-shuffle", 0, 0);
    let base = LevelGraph::from_graph(g);
    let mut assignment: Vec<u32> = (0..n as u32).collect();

    loop {
        let mut improved = false;

        // Node-level phase on the base graph, warm-started from the
        // current communities.
        let (raw, moved) = base.local_moves(&assignment, &mut rng);
        improved |= moved;
        let (dense, communities) = compact_ids(&raw);
        assignment = dense;

        // Aggregation pyramid: optimize the community graph, collapse,
        // repeat while moves happen.
        let mut level = base.aggregate(&assignment, communities);
        loop {
            let identity: Vec<u32> = (0..level.len() as u32).collect();
            let (raw, moved) = level.local_moves(&identity, &mut rng);
            if !moved {
                break;
            }
            improved = true;
            let (dense, merged) = compact_ids(&raw);
            for slot in assignment.iter_mut() {
                *slot = dense[*slot as usize];
            }
            level = level.aggregate(&dense, merged);
        }

        if !improved {
            break;
        }
    }
    Ok(Layer::from_assignment(&assignment))
}
