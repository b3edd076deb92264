//! The multi-layer detection pipeline: identification peels layers off a
//! running reduced graph, refinement re-detects every layer against the
//! others until the layer set stabilizes, and a modularity-ratio stopping
//! rule picks the number of layers automatically.
//!
//! All randomness derives from the master seed through [`crate::seed`], so
//! a full run is reproducible bit-for-bit.

use crate::detect::DetectorKind;
use crate::error::{Error, Result};
use crate::graph::{Graph, Layer};
use crate::metrics;
use crate::reduce::{ReductionMethod, ReductionSpec};
use crate::seed;

/// Pipeline configuration.
#[derive(Debug, Clone)]
pub struct PipelineConfig {
    pub detector: DetectorKind,
    pub reduction: ReductionMethod,
    /// Cap for automatic layer-count selection.
    pub max_layers: usize,
    /// Bypass selection and use exactly this many layers.
    pub fixed_layers: Option<usize>,
    /// Refinement sweeps for the final layer set.
    pub refine_iters: usize,
    /// Refinement sweeps used by the stopping rule per candidate count.
    pub probe_iters: usize,
    /// Master seed; every internal stream derives from it.
    pub seed: u64,
}

impl PipelineConfig {
    pub fn new(detector: DetectorKind, reduction: ReductionMethod, seed: u64) -> Self {
        PipelineConfig {
            detector,
            reduction,
            max_layers: 8,
            fixed_layers: None,
            refine_iters: 30,
            probe_iters: 5,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.reduction == ReductionMethod::ReduceWeight
            && !self.detector.as_detector().supports_weights()
        {
            return Err(Error::ConfigError(format!(
                "detector {:?} ignores weights and cannot be paired with reduce-weight",
                self.detector.name()
            )));
        }
        if self.max_layers < 2 {
            return Err(Error::ConfigError("max_layers must be at least 2".into()));
        }
        if self.probe_iters > self.refine_iters {
            return Err(Error::ConfigError(format!(
                "probe_iters {} exceeds refine_iters {}",
                self.probe_iters, self.refine_iters
            )));
        }
        if let Some(fixed) = self.fixed_layers {
            if fixed == 0 {
                return Err(Error::ConfigError("fixed_layers must be at least 1".into()));
            }
            if fixed > self.max_layers {
                return Err(Error::ConfigError(format!(
                    "fixed_layers {} exceeds max_layers {}",
                    fixed, self.max_layers
                )));
            }
        }
        Ok(())
    }
}

/// Modularity measurements for one layer set (one refinement sweep, with
/// sweep 0 denoting the identification output before any refinement).
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRecord {
    pub sweep: usize,
    /// Per-layer modularity in the original graph.
    pub layer_orig_q: Vec<f64>,
    /// Per-layer modularity in that layer's reduced graph.
    pub layer_reduced_q: Vec<f64>,
    pub avg_orig_q: f64,
    pub avg_reduced_q: f64,
    /// Highest NMI between any two layers of the sweep; 0 for one layer.
    pub max_pairwise_nmi: f64,
}

/// Why the stopping rule fired.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopTrigger {
    /// delta_{i+1} < 1: refinement hurts original-graph modularity.
    DeltaBelowOne,
    /// delta'_i > delta'_{i+1}: reduced-graph improvement dropped.
    DeltaPrimeDrop,
    /// A baseline average was non-positive; the extra layer has no structure.
    Degenerate,
    /// Nothing fired by max_layers.
    Truncated,
}

impl StopTrigger {
    pub fn name(self) -> &'static str {
        match self {
            StopTrigger::DeltaBelowOne => "delta-below-one",
            StopTrigger::DeltaPrimeDrop => "delta-prime-drop",
            StopTrigger::Degenerate => "degenerate",
            StopTrigger::Truncated => "truncated",
        }
    }
}

/// Diagnostics for one candidate layer count.
#[derive(Debug, Clone, PartialEq)]
pub struct SelectionRecord {
    pub num_layers: usize,
    /// Average modularity of the identified layers, original graph.
    pub orig_0: f64,
    /// Same, measured in each layer's reduced graph.
    pub red_0: f64,
    /// Mean over the probe sweeps of the original-graph average.
    pub orig_probe: f64,
    /// Mean over the probe sweeps of the reduced-graph average.
    pub red_probe: f64,
    /// orig_probe / orig_0, if orig_0 > 0.
    pub delta: Option<f64>,
    /// red_probe / red_0, if red_0 > 0.
    pub delta_prime: Option<f64>,
}

impl SelectionRecord {
    fn degenerate(&self) -> bool {
        self.delta.is_none() || self.delta_prime.is_none()
    }
}

/// Outcome of automatic layer-count selection.
#[derive(Debug, Clone, PartialEq)]
pub struct SelectionTrace {
    pub records: Vec<SelectionRecord>,
    pub chosen: usize,
    pub trigger: StopTrigger,
}

/// An ordered set of detected layers (strongest first) with quality traces.
#[derive(Debug, Clone, PartialEq)]
pub struct LayerStack {
    pub layers: Vec<Layer>,
    /// Per-layer modularity of the returned layers in the original graph.
    pub orig_modularity: Vec<f64>,
    /// Per-layer modularity of the returned layers in their reduced graphs.
    pub reduced_modularity: Vec<f64>,
    /// Per-sweep trace; index 0 is the identification output.
    pub sweeps: Vec<SweepRecord>,
    /// Index into `sweeps` of the returned layer set.
    pub chosen_sweep: usize,
    /// Present when the layer count was selected automatically.
    pub selection: Option<SelectionTrace>,
}

impl LayerStack {
    pub fn num_layers(&self) -> usize {
        self.layers.len()
    }

    /// Communities of every layer concatenated, for whole-output scoring.
    pub fn all_communities(&self) -> Vec<Vec<u32>> {
        self.layers.iter().flat_map(|l| l.communities()).collect()
    }
}

/// Modularity for trace bookkeeping: a reduced graph can lose all weight,
/// which simply means the layer has no measurable structure there.
fn modularity_or_zero(g: &Graph, layer: &Layer) -> Result<f64> {
    match metrics::modularity(g, layer) {
        Ok(q) => Ok(q),
        Err(Error::ZeroWeightGraph) => Ok(0.0),
        Err(e) => Err(e),
    }
}

/// Build the reduced graph for `skip`: apply the reduction to `g` for every
/// other layer, cumulatively in layer order. `stage`/`sweep` only salt the
/// sampling streams of edge-sampling reductions.
fn reduced_for(
    g: &Graph,
    layers: &[Layer],
    skip: usize,
    cfg: &PipelineConfig,
    stage: &str,
    sweep: usize,
) -> Result<Graph> {
    let mut running = g.clone();
    let base = seed::derive(cfg.seed, stage, skip as u64 + 1, sweep as u64);
    for (j, layer) in layers.iter().enumerate() {
        if j == skip {
            continue;
        }
        let spec = ReductionSpec::new(
            cfg.reduction,
            seed::derive(base, "reduce-step", j as u64 + 1, 0),
        );
        running = spec.apply(&running, layer)?;
    }
    Ok(running)
}

fn measure_sweep(
    g: &Graph,
    layers: &[Layer],
    cfg: &PipelineConfig,
    sweep: usize,
) -> Result<SweepRecord> {
    let n_l = layers.len();
    let mut layer_orig_q = Vec::with_capacity(n_l);
    let mut layer_reduced_q = Vec::with_capacity(n_l);
    for (i, layer) in layers.iter().enumerate() {
        layer_orig_q.push(modularity_or_zero(g, layer)?);
        let reduced = reduced_for(g, layers, i, cfg, "measure-reduce", sweep)?;
        layer_reduced_q.push(modularity_or_zero(&reduced, layer)?);
    }
    let avg = |xs: &[f64]| xs.iter().sum::<f64>() / xs.len() as f64;
    let mut max_pairwise_nmi = 0.0f64;
    for a in 0..n_l {
        for b in (a + 1)..n_l {
            max_pairwise_nmi = max_pairwise_nmi.max(metrics::nmi(&layers[a], &layers[b])?);
        }
    }
    Ok(SweepRecord {
        sweep,
        avg_orig_q: avg(&layer_orig_q),
        avg_reduced_q: avg(&layer_reduced_q),
        layer_orig_q,
        layer_reduced_q,
        max_pairwise_nmi,
    })
}

/// Incremental identification: layer i is detected on the running graph
/// with layers 1..i-1 already reduced, so the first i layers of an
/// (i+1)-layer identification are identical to an i-layer one.
struct Identifier<'a> {
    cfg: &'a PipelineConfig,
    layers: Vec<Layer>,
    running: Graph,
}

impl<'a> Identifier<'a> {
    fn new(g: &Graph, cfg: &'a PipelineConfig) -> Self {
        Identifier {
            cfg,
            layers: Vec::new(),
            running: g.clone(),
        }
    }

    fn extend_to(&mut self, n_layers: usize) -> Result<&[Layer]> {
        let detector = self.cfg.detector.as_detector();
        while self.layers.len() < n_layers {
            let i = self.layers.len() + 1;
            if i > 1 {
                let spec = ReductionSpec::new(
                    self.cfg.reduction,
                    seed::derive(self.cfg.seed, "identify-reduce", i as u64 - 1, 0),
                );
                self.running = spec.apply(&self.running, self.layers.last().unwrap())?;
            }
            let layer = detector.detect(
                &self.running,
                seed::derive(self.cfg.seed, "identify-detect", i as u64, 0),
            )?;
            self.layers.push(layer);
        }
        Ok(&self.layers[..n_layers])
    }
}

fn stack_from(g: &Graph, layers: Vec<Layer>, cfg: &PipelineConfig) -> Result<LayerStack> {
    let record = measure_sweep(g, &layers, cfg, 0)?;
    Ok(LayerStack {
        orig_modularity: record.layer_orig_q.clone(),
        reduced_modularity: record.layer_reduced_q.clone(),
        layers,
        sweeps: vec![record],
        chosen_sweep: 0,
        selection: None,
    })
}

/// Identification: detect a layer, reduce its structure on the running
/// graph, repeat until `n_layers` layers are found.
pub fn identify(g: &Graph, cfg: &PipelineConfig, n_layers: usize) -> Result<LayerStack> {
    cfg.validate()?;
    if n_layers == 0 {
        return Err(Error::ConfigError("need at least one layer".into()));
    }
    let mut ident = Identifier::new(g, cfg);
    ident.extend_to(n_layers)?;
    stack_from(g, ident.layers, cfg)
}

/// One refinement sweep over `layers` in place: for each layer in order,
/// re-detect it on the graph with all other (current) layers reduced.
fn refine_sweep(
    g: &Graph,
    layers: &mut [Layer],
    cfg: &PipelineConfig,
    sweep: usize,
) -> Result<()> {
    let detector = cfg.detector.as_detector();
    for i in 0..layers.len() {
        let reduced = reduced_for(g, layers, i, cfg, "refine-reduce", sweep)?;
        layers[i] = detector.detect(
            &reduced,
            seed::derive(cfg.seed, "refine-detect", i as u64 + 1, sweep as u64),
        )?;
    }
    Ok(())
}

/// Refinement: run `refine_iters` sweeps and return the sweep's layer set
/// with the highest average reduced-graph modularity (the identification
/// output competes as sweep 0; ties keep the earliest sweep).
pub fn refine(g: &Graph, stack: LayerStack, cfg: &PipelineConfig) -> Result<LayerStack> {
    cfg.validate()?;
    let mut stack = stack;
    let mut layers = stack.layers.clone();
    let mut best_q = stack.sweeps[0].avg_reduced_q;
    let mut best = (0usize, stack.layers.clone());

    for sweep in 1..=cfg.refine_iters {
        refine_sweep(g, &mut layers, cfg, sweep)?;
        let record = measure_sweep(g, &layers, cfg, sweep)?;
        if record.avg_reduced_q > best_q {
            best_q = record.avg_reduced_q;
            best = (sweep, layers.clone());
        }
        stack.sweeps.push(record);
    }

    stack.chosen_sweep = best.0;
    stack.layers = best.1;
    stack.orig_modularity = stack.sweeps[best.0].layer_orig_q.clone();
    stack.reduced_modularity = stack.sweeps[best.0].layer_reduced_q.clone();
    Ok(stack)
}

/// Probe one candidate layer count: measure the identification output, run
/// `probe_iters` refinement sweeps, and form the improvement ratios.
fn probe(
    g: &Graph,
    ident: &mut Identifier,
    cfg: &PipelineConfig,
    num_layers: usize,
) -> Result<SelectionRecord> {
    let mut layers = ident.extend_to(num_layers)?.to_vec();
    let base = measure_sweep(g, &layers, cfg, 0)?;
    let mut orig_sum = 0.0;
    let mut red_sum = 0.0;
    for sweep in 1..=cfg.probe_iters {
        refine_sweep(g, &mut layers, cfg, sweep)?;
        let record = measure_sweep(g, &layers, cfg, sweep)?;
        orig_sum += record.avg_orig_q;
        red_sum += record.avg_reduced_q;
    }
    let orig_probe = orig_sum / cfg.probe_iters.max(1) as f64;
    let red_probe = red_sum / cfg.probe_iters.max(1) as f64;
    Ok(SelectionRecord {
        num_layers,
        orig_0: base.avg_orig_q,
        red_0: base.avg_reduced_q,
        orig_probe,
        red_probe,
        delta: (base.avg_orig_q > 0.0).then(|| orig_probe / base.avg_orig_q),
        delta_prime: (base.avg_reduced_q > 0.0).then(|| red_probe / base.avg_reduced_q),
    })
}

/// Automatic layer-count selection. Candidate counts i = 2, 3, ... are
/// probed; the rule stops at the earliest i with `delta_{i+1} < 1` or
/// `delta'_i > delta'_{i+1}`. A non-positive baseline average at i+1 counts
/// as a stop trigger, and hitting `max_layers` without a trigger returns
/// `max_layers` flagged as truncated.
pub fn select_num_layers(g: &Graph, cfg: &PipelineConfig) -> Result<SelectionTrace> {
    cfg.validate()?;
    let mut ident = Identifier::new(g, cfg);
    let mut records = vec![probe(g, &mut ident, cfg, 2)?];
    if records[0].degenerate() {
        return Ok(SelectionTrace {
            records,
            chosen: 2,
            trigger: StopTrigger::Degenerate,
        });
    }
    let mut i = 2;
    while i < cfg.max_layers {
        let next = probe(g, &mut ident, cfg, i + 1)?;
        let cur_delta_prime = records.last().unwrap().delta_prime;
        records.push(next.clone());
        if next.degenerate() {
            return Ok(SelectionTrace {
                records,
                chosen: i,
                trigger: StopTrigger::Degenerate,
            });
        }
        if next.delta.unwrap() < 1.0 {
            return Ok(SelectionTrace {
                records,
                chosen: i,
                trigger: StopTrigger::DeltaBelowOne,
            });
        }
        if cur_delta_prime.unwrap() > next.delta_prime.unwrap() {
            return Ok(SelectionTrace {
                records,
                chosen: i,
                trigger: StopTrigger::DeltaPrimeDrop,
            });
        }
        i += 1;
    }
    Ok(SelectionTrace {
        records,
        chosen: cfg.max_layers,
        trigger: StopTrigger::Truncated,
    })
}

/// The full pipeline: pick the layer count (unless fixed), identify, refine.
pub fn run_hicode(g: &Graph, cfg: &PipelineConfig) -> Result<LayerStack> {
    cfg.validate()?;
    let (n_layers, selection) = match cfg.fixed_layers {
        Some(n) => (n, None),
        None => {
            let trace = select_num_layers(g, cfg)?;
            (trace.chosen, Some(trace))
        }
    };
    let stack = identify(g, cfg, n_layers)?;
    let mut refined = refine(g, stack, cfg)?;
    refined.selection = selection;
    Ok(refined)
}

/// The cascade baseline: identification with full intra-community edge
/// removal, a fixed layer count, and no refinement.
pub fn run_cascade(g: &Graph, cfg: &PipelineConfig) -> Result<LayerStack> {
    let n_layers = cfg.fixed_layers.ok_or_else(|| {
        Error::ConfigError("cascade needs fixed_layers (it has no stopping rule)".into())
    })?;
    let cascade_cfg = PipelineConfig {
        reduction: ReductionMethod::RemoveEdge,
        ..cfg.clone()
    };
    identify(g, &cascade_cfg, n_layers)
}
