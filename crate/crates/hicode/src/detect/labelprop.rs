//! Synchronous label propagation. Weight-blind; ships mainly to prove the
//! detector interface is pluggable.

use super::Detector;
use crate::error::{Error, Result};
use crate::graph::{Graph, Layer};
use crate::seed;
use rand::Rng;
use std::collections::HashMap;

const MAX_ROUNDS: usize = 100;

pub struct LabelPropagation;

impl Detector for LabelPropagation {
    fn name(&self) -> &'static str {
        "labelprop"
    }

    fn supports_weights(&self) -> bool {
        false
    }

    fn detect(&self, g: &Graph, seed: u64) -> Result<Layer> {
        label_propagation_detect(g, seed)
    }
}

/// Synchronous majority-label propagation, at most 100 rounds. Every node
/// simultaneously adopts the most frequent label among its neighbors and
/// itself (one vote each, edge weights ignored); ties break by a seeded
/// uniform choice. The self vote lets oscillation-prone structures such as
/// stars settle onto one label.
pub fn label_propagation_detect(g: &Graph, detect_seed: u64) -> Result<Layer> {
    if g.is_empty() {
        return Err(Error::EmptyGraph);
    }
    let n = g.node_count();
    let mut labels: Vec<u32> = (0..n as u32).collect();
    let mut rng = seed::rng(detect_seed, "labelprop-ties", 0, 0);

    let mut counts: HashMap<u32, usize> = HashMap::new();
    let mut tied: Vec<u32> = Vec::new();
    for _ in 0..MAX_ROUNDS {
        let mut next = Vec::with_capacity(n);
        for v in 0..n as u32 {
            counts.clear();
            counts.insert(labels[v as usize], 1);
            for &(u, _) in g.neighbors(v) {
                *counts.entry(labels[u as usize]).or_insert(0) += 1;
            }
            let best = counts.values().copied().max().unwrap();
            tied.clear();
            tied.extend(
                counts
                    .iter()
                    .filter(|&(_, &c)| c == best)
                    .map(|(&l, _)| l),
            );
            tied.sort_unstable();
            let pick = if tied.len() == 1 {
                tied[0]
            } else {
                tied[rng.gen_range(0..tied.len())]
            };
            next.push(pick);
        }
        let changed = next != labels;
        labels = next;
        if !changed {
            break;
        }
    }
    Ok(Layer::from_assignment(&labels))
}
