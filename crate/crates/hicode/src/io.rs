//! File formats and label mapping: whitespace edge lists, one-community-
//! per-line files, and the CSV run manifest.

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::pipeline::LayerStack;
use std::collections::HashMap;
use std::io::{BufRead, Write};

/// Bijection between external string labels and dense node ids, in
/// first-appearance order.
#[derive(Debug, Clone, Default)]
pub struct LabelMap {
    labels: Vec<String>,
    index: HashMap<String, u32>,
}

impl LabelMap {
    pub fn new() -> Self {
        Self::default()
    }

    /// Identity map for graphs whose labels are their dense ids.
    pub fn dense(n: usize) -> Self {
        let mut map = Self::new();
        for v in 0..n {
            map.intern(&v.to_string());
        }
        map
    }

    pub fn intern(&mut self, label: &str) -> u32 {
        if let Some(&id) = self.index.get(label) {
            return id;
        }
        let id = self.labels.len() as u32;
        self.labels.push(label.to_string());
        self.index.insert(label.to_string(), id);
        id
    }

    pub fn id_of(&self, label: &str) -> Option<u32> {
        self.index.get(label).copied()
    }

    pub fn label_of(&self, id: u32) -> &str {
        &self.labels[id as usize]
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }
}

/// Parse a whitespace edge list: `u v [w]` per line, `#` comments and blank
/// lines ignored, weights defaulting to 1.0, labels interned in
/// first-appearance order. The comment directive `# node LABEL` declares an
/// isolated node, which is how [`write_edge_list`] round-trips nodes that
/// have no edges.
pub fn parse_edge_list<R: BufRead>(reader: R) -> Result<(Graph, LabelMap)> {
    let mut map = LabelMap::new();
    let mut edges: Vec<(u32, u32, f64)> = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        let lineno = idx + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        if let Some(comment) = trimmed.strip_prefix('#') {
            let tokens: Vec<&str> = comment.split_whitespace().collect();
            if tokens.len() == 2 && tokens[0] == "node" {
                map.intern(tokens[1]);
            }
            continue;
        }
        let tokens: Vec<&str> = trimmed.split_whitespace().collect();
        let (u_label, v_label, weight) = match tokens.as_slice() {
            [u, v] => (*u, *v, 1.0),
            [u, v, w] => {
                let weight: f64 = w.parse().map_err(|_| Error::ParseError {
                    line: lineno,
                    message: format!("invalid weight {w:?}"),
                })?;
                (*u, *v, weight)
            }
            _ => {
                return Err(Error::ParseError {
                    line: lineno,
                    message: format!("expected 'u v [w]', got {trimmed:?}"),
                })
            }
        };
        if weight < 0.0 {
            return Err(Error::InvalidWeight(weight));
        }
        let u = map.intern(u_label);
        let v = map.intern(v_label);
        if u == v {
            return Err(Error::SelfLoop(u));
        }
        edges.push((u, v, weight));
    }
    let graph = Graph::from_edges_with_nodes(map.len(), edges)?;
    Ok((graph, map))
}

/// Write an edge list that [`parse_edge_list`] reads back into an identical
/// graph. Isolated nodes come first as `# node LABEL` lines; weight 1.0 is
/// omitted, other weights print in shortest round-trip form.
pub fn write_edge_list<W: Write>(mut w: W, g: &Graph, map: &LabelMap) -> Result<()> {
    for v in 0..g.node_count() {
        if g.neighbors(v as u32).is_empty() {
            writeln!(w, "# node {}", map.label_of(v as u32))?;
        }
    }
    for &(u, v, weight) in g.edges() {
        if weight == 1.0 {
            writeln!(w, "{} {}", map.label_of(u), map.label_of(v))?;
        } else {
            writeln!(w, "{} {} {}", map.label_of(u), map.label_of(v), weight)?;
        }
    }
    Ok(())
}

/// Read a community file: one community per line, whitespace-separated
/// labels; blank lines and `#` comments ignored; duplicate labels within a
/// line collapse.
pub fn read_community_file<R: BufRead>(reader: R) -> Result<Vec<Vec<String>>> {
    let mut communities = Vec::new();
    for line in reader.lines() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let mut members: Vec<String> =
            trimmed.split_whitespace().map(str::to_string).collect();
        members.sort();
        members.dedup();
        communities.push(members);
    }
    Ok(communities)
}

pub fn write_community_file<W: Write>(mut w: W, communities: &[Vec<String>]) -> Result<()> {
    for community in communities {
        writeln!(w, "{}", community.join(" "))?;
    }
    Ok(())
}

/// Resolve label communities to dense ids against `map`.
pub fn communities_to_ids(
    communities: &[Vec<String>],
    map: &LabelMap,
) -> Result<Vec<Vec<u32>>> {
    communities
        .iter()
        .map(|c| {
            c.iter()
                .map(|l| map.id_of(l).ok_or_else(|| Error::UnknownLabel(l.clone())))
                .collect()
        })
        .collect()
}

/// Map dense-id communities back to labels, members sorted by id.
pub fn communities_to_labels(communities: &[Vec<u32>], map: &LabelMap) -> Vec<Vec<String>> {
    communities
        .iter()
        .map(|c| {
            let mut ids = c.clone();
            ids.sort_unstable();
            ids.iter().map(|&v| map.label_of(v).to_string()).collect()
        })
        .collect()
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

/// Write the run manifest: a CSV whose first column tags the record type.
/// Sections: `config` (echoed settings), `result` (chosen layer count,
/// sweep, stop trigger), `selection` (per-candidate stopping-rule values),
/// `sweep` (per-sweep averages), `layer_sweep_q` (per-sweep per-layer
/// modularities) and `layer` (final layer summary).
pub fn write_manifest<W: Write>(
    mut w: W,
    stack: &LayerStack,
    config_echo: &[(String, String)],
) -> Result<()> {
    writeln!(w, "record,f1,f2,f3,f4,f5,f6")?;
    for (key, value) in config_echo {
        writeln!(w, "config,{key},{value},,,,")?;
    }
    writeln!(w, "result,chosen_layers,{},,,,", stack.num_layers())?;
    writeln!(w, "result,chosen_sweep,{},,,,", stack.chosen_sweep)?;
    let trigger = stack
        .selection
        .as_ref()
        .map(|s| s.trigger.name())
        .unwrap_or("fixed");
    writeln!(w, "result,stop_trigger,{trigger},,,,")?;
    if let Some(selection) = &stack.selection {
        for r in &selection.records {
            writeln!(
                w,
                "selection,{},{},{},{},{},{},{}",
                r.num_layers,
                r.orig_0,
                r.red_0,
                r.orig_probe,
                r.red_probe,
                fmt_opt(r.delta),
                fmt_opt(r.delta_prime),
            )?;
        }
    }
    for s in &stack.sweeps {
        writeln!(
            w,
            "sweep,{},{},{},{},,",
            s.sweep, s.avg_orig_q, s.avg_reduced_q, s.max_pairwise_nmi
        )?;
        for (i, (oq, rq)) in s.layer_orig_q.iter().zip(&s.layer_reduced_q).enumerate() {
            writeln!(w, "layer_sweep_q,{},{},{oq},{rq},,", s.sweep, i + 1)?;
        }
    }
    for (i, layer) in stack.layers.iter().enumerate() {
        writeln!(
            w,
            "layer,{},{},{},{},,",
            i + 1,
            layer.community_count(),
            stack.orig_modularity[i],
            stack.reduced_modularity[i],
        )?;
    }
    Ok(())
}

/// A manifest section re-emitted as a standalone CSV.
pub fn trace_section<R: BufRead, W: Write>(reader: R, section: &str, mut out: W) -> Result<()> {
    let (prefix, header) = match section {
        "selection" => (
            "selection,",
            "num_layers,orig_0,red_0,orig_probe,red_probe,delta,delta_prime",
        ),
        "sweeps" => ("sweep,", "sweep,avg_orig_q,avg_reduced_q,max_pairwise_nmi"),
        "layer-sweeps" => ("layer_sweep_q,", "sweep,layer,orig_q,reduced_q"),
        "layers" => ("layer,", "layer,communities,orig_q,reduced_q"),
        other => {
            return Err(Error::ConfigError(format!(
                "unknown trace section {other:?} (expected selection, sweeps, layer-sweeps or layers)"
            )))
        }
    };
    let columns = header.split(',').count();
    writeln!(out, "{header}")?;
    for line in reader.lines() {
        let line = line?;
        if let Some(rest) = line.strip_prefix(prefix) {
            let fields: Vec<&str> = rest.split(',').collect();
            writeln!(out, "{}", fields[..columns.min(fields.len())].join(","))?;
        }
    }
    Ok(())
}
