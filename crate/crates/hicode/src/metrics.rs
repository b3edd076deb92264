//! Partition quality and similarity measures: weighted modularity, NMI
//! between partitions, and size-weighted best-match Jaccard scores between
//! community sets.

use crate::error::{Error, Result};
use crate::exec;
use crate::graph::{community_tallies, Graph, Layer};
use std::collections::HashMap;

/// Newman modularity of `layer` on `g`, weighted form:
/// `Q = sum_C [ w_C / W - ((2 w_C + boundary_C) / (2 W))^2 ]`
/// with `W` the total edge weight.
pub fn modularity(g: &Graph, layer: &Layer) -> Result<f64> {
    let w_total = g.total_weight();
    if w_total <= 0.0 {
        return Err(Error::ZeroWeightGraph);
    }
    let tallies = community_tallies(g, layer)?;
    let two_w = 2.0 * w_total;
    let q = tallies
        .iter()
        .map(|t| {
            let a = (2.0 * t.intra_weight + t.boundary_weight) / two_w;
            t.intra_weight / w_total - a * a
        })
        .sum();
    Ok(q)
}

/// Normalized mutual information between two partitions of the same node
/// set, natural log, normalized by the arithmetic mean of the entropies.
///
/// Conventions for zero-entropy (single whole-set community) inputs: 1.0 if
/// both partitions are trivial, 0.0 if exactly one is.
pub fn nmi(a: &Layer, b: &Layer) -> Result<f64> {
    if a.node_count() != b.node_count() {
        return Err(Error::DomainMismatch(format!(
            "{} vs {} nodes",
            a.node_count(),
            b.node_count()
        )));
    }
    let n = a.node_count() as f64;
    if n == 0.0 {
        return Err(Error::DomainMismatch("empty node set".into()));
    }

    let ca = a.community_count();
    let cb = b.community_count();
    let mut contingency = vec![0u64; ca * cb];
    let mut row = vec![0u64; ca];
    let mut col = vec![0u64; cb];
    for v in 0..a.node_count() {
        let i = a.community_of(v as u32) as usize;
        let j = b.community_of(v as u32) as usize;
        contingency[i * cb + j] += 1;
        row[i] += 1;
        col[j] += 1;
    }

    let entropy = |counts: &[u64]| -> f64 {
        counts
            .iter()
            .filter(|&&c| c > 0)
            .map(|&c| {
                let p = c as f64 / n;
                -p * p.ln()
            })
            .sum()
    };
    let h_a = entropy(&row);
    let h_b = entropy(&col);
    if h_a == 0.0 && h_b == 0.0 {
        return Ok(1.0);
    }
    if h_a == 0.0 || h_b == 0.0 {
        return Ok(0.0);
    }

    let mut mi = 0.0;
    for i in 0..ca {
        for j in 0..cb {
            let nij = contingency[i * cb + j];
            if nij == 0 {
                continue;
            }
            let pij = nij as f64 / n;
            mi += pij * (pij / (row[i] as f64 / n * col[j] as f64 / n)).ln();
        }
    }
    Ok((mi / (0.5 * (h_a + h_b))).clamp(0.0, 1.0))
}

/// Best ground-truth match for one community.
#[derive(Debug, Clone, PartialEq)]
pub struct BestMatch {
    /// Index of the community on the iterated side.
    pub community: usize,
    /// Index of the best-Jaccard community on the other side, if any overlaps.
    pub matched: Option<usize>,
    /// The best Jaccard similarity (0.0 when nothing overlaps).
    pub jaccard: f64,
    /// Size of the iterated community (the averaging weight).
    pub size: usize,
}

/// A metric outcome plus the per-community match table behind it.
#[derive(Debug, Clone)]
pub struct MetricReport {
    pub metric: &'static str,
    pub score: f64,
    pub matches: Vec<BestMatch>,
}

fn sorted_copy(sets: &[Vec<u32>]) -> Vec<Vec<u32>> {
    sets.iter()
        .map(|s| {
            let mut v = s.clone();
            v.sort_unstable();
            v.dedup();
            v
        })
        .collect()
}

/// For each community in `from`, its best-Jaccard match in `to`. Uses an
/// inverted node index so zero-overlap pairs are never compared.
fn best_matches(from: &[Vec<u32>], to: &[Vec<u32>]) -> Vec<BestMatch> {
    let mut index: HashMap<u32, Vec<u32>> = HashMap::new();
    for (cid, members) in to.iter().enumerate() {
        for &v in members {
            index.entry(v).or_default().push(cid as u32);
        }
    }
    exec::map_indexed(from.len(), |d| {
        let members = &from[d];
        let mut overlap: HashMap<u32, usize> = HashMap::new();
        for v in members {
            if let Some(cands) = index.get(v) {
                for &c in cands {
                    *overlap.entry(c).or_insert(0) += 1;
                }
            }
        }
        let mut best: Option<(usize, f64)> = None;
        let mut cands: Vec<_> = overlap.into_iter().collect();
        cands.sort_unstable_by_key(|&(c, _)| c);
        for (c, inter) in cands {
            let union = members.len() + to[c as usize].len() - inter;
            let j = inter as f64 / union as f64;
            if best.is_none_or(|(_, bj)| j > bj) {
                best = Some((c as usize, j));
            }
        }
        BestMatch {
            community: d,
            matched: best.map(|(c, _)| c),
            jaccard: best.map_or(0.0, |(_, j)| j),
            size: members.len(),
        }
    })
}

fn weighted_average(matches: &[BestMatch]) -> f64 {
    let total: usize = matches.iter().map(|m| m.size).sum();
    if total == 0 {
        return 0.0;
    }
    matches
        .iter()
        .map(|m| m.size as f64 * m.jaccard)
        .sum::<f64>()
        / total as f64
}

/// Size-weighted average, over detected communities, of the best Jaccard
/// similarity to any truth community.
pub fn jc_precision(detected: &[Vec<u32>], truth: &[Vec<u32>]) -> Result<MetricReport> {
    if detected.is_empty() || truth.is_empty() {
        return Err(Error::EmptyCommunitySet);
    }
    let matches = best_matches(&sorted_copy(detected), &sorted_copy(truth));
    Ok(MetricReport {
        metric: "jcprecision",
        score: weighted_average(&matches),
        matches,
    })
}

/// Same as [`jc_precision`] with the roles swapped: iterate truth
/// communities, weight by truth community size.
pub fn jc_recall(detected: &[Vec<u32>], truth: &[Vec<u32>]) -> Result<MetricReport> {
    if detected.is_empty() || truth.is_empty() {
        return Err(Error::EmptyCommunitySet);
    }
    let matches = best_matches(&sorted_copy(truth), &sorted_copy(detected));
    Ok(MetricReport {
        metric: "jcrecall",
        score: weighted_average(&matches),
        matches,
    })
}

/// Harmonic mean of [`jc_precision`] and [`jc_recall`]; 0 when both are 0.
pub fn jc_f1(detected: &[Vec<u32>], truth: &[Vec<u32>]) -> Result<f64> {
    let p = jc_precision(detected, truth)?.score;
    let r = jc_recall(detected, truth)?.score;
    if p + r == 0.0 {
        Ok(0.0)
    } else {
        Ok(2.0 * p * r / (p + r))
    }
}
