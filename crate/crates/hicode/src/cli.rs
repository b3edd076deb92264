//! Command-line surface: `gen`, `detect`, `eval` and `trace` subcommands.

use crate::detect::DetectorKind;
use crate::error::{Error, Result};
use crate::graph::Layer;
use crate::io::{
    communities_to_ids, communities_to_labels, parse_edge_list, read_community_file,
    trace_section, write_community_file, write_edge_list, write_manifest, LabelMap,
};
use crate::metrics;
use crate::pipeline::{run_cascade, run_hicode, PipelineConfig};
use crate::reduce::ReductionMethod;
use crate::synth::{self, presets, LayerSpec};
use clap::{Args, Parser, Subcommand};
use std::collections::HashMap;
use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

#[derive(Parser)]
#[command(
    name = "hicode",
    version,
    about = "Multi-layer hidden community detection toolkit"
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a layered blockmodel benchmark graph with ground truth.
    Gen(GenArgs),
    /// Detect community layers in an edge-list graph.
    Detect(DetectArgs),
    /// Score detected communities against a reference.
    Eval(EvalArgs),
    /// Re-emit a CSV trace section from a run manifest.
    Trace(TraceArgs),
}

#[derive(Args)]
struct GenArgs {
    /// Built-in parameter set: synl2 or synl3.
    #[arg(long, conflicts_with = "layers")]
    preset: Option<String>,
    /// Explicit layer specs as "communities:p,communities:p,...".
    #[arg(long)]
    layers: Option<String>,
    /// Node count (presets default to 3000).
    #[arg(long)]
    nodes: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output directory for graph.txt, plantedN.cmty and params.csv.
    #[arg(long)]
    out_dir: PathBuf,
}

#[derive(Args)]
struct DetectArgs {
    /// Input edge-list file.
    #[arg(long)]
    input: Option<PathBuf>,
    /// Base detector: louvain or labelprop.
    #[arg(long)]
    base: Option<String>,
    /// Reduction method: remove, reduce-edge or reduce-weight.
    #[arg(long)]
    reduction: Option<String>,
    #[arg(long)]
    max_layers: Option<usize>,
    #[arg(long)]
    fixed_layers: Option<usize>,
    #[arg(long)]
    refine_iters: Option<usize>,
    #[arg(long)]
    probe_iters: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Run the cascade baseline (remove-edge identification, no refinement).
    #[arg(long)]
    cascade: bool,
    /// Optional key=value config file; CLI flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory for layerN.cmty, manifest.csv and timing.csv.
    #[arg(long)]
    out_dir: PathBuf,
}

#[derive(Args)]
struct EvalArgs {
    /// Detected community file(s); several files concatenate.
    #[arg(long, num_args = 1.., required = true)]
    detected: Vec<PathBuf>,
    /// Reference community file(s). Unused by --metric modularity.
    #[arg(long, num_args = 1..)]
    truth: Vec<PathBuf>,
    /// jcf1, jcprecision, jcrecall, nmi or modularity.
    #[arg(long)]
    metric: String,
    /// Graph file; required for modularity, validates labels otherwise.
    #[arg(long)]
    input: Option<PathBuf>,
}

#[derive(Args)]
struct TraceArgs {
    #[arg(long)]
    manifest: PathBuf,
    /// selection, sweeps, layer-sweeps or layers.
    #[arg(long)]
    section: String,
    /// Output file (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Run the CLI against explicit arguments. Usage errors exit with code 2
/// via clap; runtime errors bubble up for `main` to report with code 1.
pub fn run<I, T>(args: I) -> Result<()>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = Cli::parse_from(args);
    match cli.command {
        Command::Gen(args) => cmd_gen(args),
        Command::Detect(args) => cmd_detect(args),
        Command::Eval(args) => cmd_eval(args),
        Command::Trace(args) => cmd_trace(args),
    }
}

fn parse_layer_specs(text: &str) -> Result<Vec<LayerSpec>> {
    text.split(',')
        .map(|part| {
            let (k, p) = part.split_once(':').ok_or_else(|| {
                Error::ConfigError(format!("layer spec {part:?} is not 'communities:p'"))
            })?;
            let k: usize = k
                .trim()
                .parse()
                .map_err(|_| Error::ConfigError(format!("bad community count {k:?}")))?;
            let p: f64 = p
                .trim()
                .parse()
                .map_err(|_| Error::ConfigError(format!("bad probability {p:?}")))?;
            Ok(LayerSpec::new(k, p))
        })
        .collect()
}

fn cmd_gen(args: GenArgs) -> Result<()> {
    let (specs, default_nodes) = match (&args.preset, &args.layers) {
        (Some(name), None) => match name.as_str() {
            "synl2" => (presets::synl2(), presets::PRESET_NODES),
            "synl3" => (presets::synl3(), presets::PRESET_NODES),
            other => {
                return Err(Error::ConfigError(format!(
                    "unknown preset {other:?} (expected synl2 or synl3)"
                )))
            }
        },
        (None, Some(spec_text)) => (parse_layer_specs(spec_text)?, presets::PRESET_NODES),
        _ => {
            return Err(Error::ConfigError(
                "gen needs exactly one of --preset or --layers".into(),
            ))
        }
    };
    let n = args.nodes.unwrap_or(default_nodes);

    let started = Instant::now();
    let instance = synth::generate(n, &specs, args.seed)?;
    let map = LabelMap::dense(n);

    std::fs::create_dir_all(&args.out_dir)?;
    let mut graph_file = BufWriter::new(File::create(args.out_dir.join("graph.txt"))?);
    write_edge_list(&mut graph_file, &instance.graph, &map)?;
    graph_file.flush()?;

    for (i, layer) in instance.planted.iter().enumerate() {
        let path = args.out_dir.join(format!("planted{}.cmty", i + 1));
        let labelled = communities_to_labels(&layer.communities(), &map);
        let mut f = BufWriter::new(File::create(path)?);
        write_community_file(&mut f, &labelled)?;
        f.flush()?;
    }

    let mut params = BufWriter::new(File::create(args.out_dir.join("params.csv"))?);
    writeln!(params, "key,value")?;
    writeln!(params, "nodes,{n}")?;
    writeln!(params, "seed,{}", args.seed)?;
    writeln!(params, "num_layers,{}", specs.len())?;
    for (i, spec) in specs.iter().enumerate() {
        writeln!(params, "layer{}_communities,{}", i + 1, spec.num_communities)?;
        writeln!(params, "layer{}_p,{}", i + 1, spec.intra_p)?;
    }
    writeln!(
        params,
        "expected_edges,{}",
        synth::expected_edge_count(n, &specs)
    )?;
    writeln!(params, "observed_edges,{}", instance.graph.edge_count())?;
    params.flush()?;

    eprintln!(
        "generated {} nodes, {} edges, {} layers in {:.2}s",
        n,
        instance.graph.edge_count(),
        specs.len(),
        started.elapsed().as_secs_f64()
    );
    Ok(())
}

/// Flat key=value config file; `#` comments and blank lines ignored.
fn read_config_file(path: &Path) -> Result<HashMap<String, String>> {
    let text = std::fs::read_to_string(path)?;
    let mut out = HashMap::new();
    for (idx, line) in text.lines().enumerate() {
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let (key, value) = trimmed.split_once('=').ok_or_else(|| Error::ParseError {
            line: idx + 1,
            message: format!("expected key=value, got {trimmed:?}"),
        })?;
        out.insert(key.trim().to_string(), value.trim().to_string());
    }
    Ok(out)
}

fn config_parse<T: std::str::FromStr>(file: &HashMap<String, String>, key: &str) -> Result<Option<T>> {
    match file.get(key) {
        None => Ok(None),
        Some(raw) => raw
            .parse()
            .map(Some)
            .map_err(|_| Error::ConfigError(format!("config key {key}: bad value {raw:?}"))),
    }
}

fn cmd_detect(args: DetectArgs) -> Result<()> {
    let file_cfg = match &args.config {
        Some(path) => read_config_file(path)?,
        None => HashMap::new(),
    };

    // Precedence: CLI flag, then config file, then default.
    let input: PathBuf = args
        .input
        .or_else(|| file_cfg.get("input").map(PathBuf::from))
        .ok_or_else(|| Error::ConfigError("detect needs --input".into()))?;
    let base = match args.base.or_else(|| file_cfg.get("base").cloned()) {
        Some(name) => DetectorKind::parse(&name)?,
        None => DetectorKind::Louvain,
    };
    let reduction = match args.reduction.or_else(|| file_cfg.get("reduction").cloned()) {
        Some(name) => ReductionMethod::parse(&name)?,
        None => ReductionMethod::ReduceWeight,
    };
    let seed = match args.seed {
        Some(s) => s,
        None => config_parse(&file_cfg, "seed")?.unwrap_or(0),
    };
    let cascade = args.cascade || config_parse(&file_cfg, "cascade")?.unwrap_or(false);

    let mut cfg = PipelineConfig::new(base, reduction, seed);
    if let Some(v) = args.max_layers.or(config_parse(&file_cfg, "max-layers")?) {
        cfg.max_layers = v;
    }
    cfg.fixed_layers = args
        .fixed_layers
        .or(config_parse(&file_cfg, "fixed-layers")?);
    if let Some(v) = args.refine_iters.or(config_parse(&file_cfg, "refine-iters")?) {
        cfg.refine_iters = v;
    }
    if let Some(v) = args.probe_iters.or(config_parse(&file_cfg, "probe-iters")?) {
        cfg.probe_iters = v;
    }

    let t_total = Instant::now();
    let (graph, map) = parse_edge_list(BufReader::new(File::open(&input)?))?;
    let t_parse = t_total.elapsed().as_secs_f64();

    let t_run = Instant::now();
    let stack = if cascade {
        run_cascade(&graph, &cfg)?
    } else {
        run_hicode(&graph, &cfg)?
    };
    let run_seconds = t_run.elapsed().as_secs_f64();

    std::fs::create_dir_all(&args.out_dir)?;
    for (i, layer) in stack.layers.iter().enumerate() {
        let path = args.out_dir.join(format!("layer{}.cmty", i + 1));
        let labelled = communities_to_labels(&layer.communities(), &map);
        let mut f = BufWriter::new(File::create(path)?);
        write_community_file(&mut f, &labelled)?;
        f.flush()?;
    }

    let echo = vec![
        ("input".to_string(), input.display().to_string()),
        ("base".to_string(), base.name().to_string()),
        ("reduction".to_string(), reduction.name().to_string()),
        ("max_layers".to_string(), cfg.max_layers.to_string()),
        (
            "fixed_layers".to_string(),
            cfg.fixed_layers.map(|v| v.to_string()).unwrap_or_default(),
        ),
        ("refine_iters".to_string(), cfg.refine_iters.to_string()),
        ("probe_iters".to_string(), cfg.probe_iters.to_string()),
        ("seed".to_string(), seed.to_string()),
        ("cascade".to_string(), cascade.to_string()),
    ];
    let mut manifest = BufWriter::new(File::create(args.out_dir.join("manifest.csv"))?);
    write_manifest(&mut manifest, &stack, &echo)?;
    manifest.flush()?;

    // Wall-clock goes in its own file so the manifest stays byte-stable
    // across reruns of the same seed.
    let mut timing = BufWriter::new(File::create(args.out_dir.join("timing.csv"))?);
    writeln!(timing, "stage,seconds")?;
    writeln!(timing, "parse,{t_parse}")?;
    writeln!(timing, "pipeline,{run_seconds}")?;
    writeln!(timing, "total,{}", t_total.elapsed().as_secs_f64())?;
    timing.flush()?;

    eprintln!(
        "detected {} layers in {:.2}s (chosen sweep {})",
        stack.num_layers(),
        run_seconds,
        stack.chosen_sweep
    );
    Ok(())
}

fn read_communities(paths: &[PathBuf]) -> Result<Vec<Vec<String>>> {
    let mut all = Vec::new();
    for path in paths {
        all.extend(read_community_file(BufReader::new(File::open(path)?))?);
    }
    Ok(all)
}

/// Label universe for eval: the graph's map when a graph is given (so stray
/// labels fail loudly), otherwise labels interned from the files.
fn eval_label_map(
    input: &Option<PathBuf>,
    sides: &[&[Vec<String>]],
) -> Result<(Option<crate::graph::Graph>, LabelMap)> {
    match input {
        Some(path) => {
            let (g, map) = parse_edge_list(BufReader::new(File::open(path)?))?;
            Ok((Some(g), map))
        }
        None => {
            let mut map = LabelMap::new();
            for side in sides {
                for community in *side {
                    for label in community {
                        map.intern(label);
                    }
                }
            }
            Ok((None, map))
        }
    }
}

fn layer_from_files(sets: &[Vec<u32>], n: usize) -> Result<Layer> {
    Layer::from_communities(sets, n)
}

fn cmd_eval(args: EvalArgs) -> Result<()> {
    let detected_labels = read_communities(&args.detected)?;
    let truth_labels = read_communities(&args.truth)?;
    let (graph, map) = eval_label_map(
        &args.input,
        &[detected_labels.as_slice(), truth_labels.as_slice()],
    )?;
    let detected = communities_to_ids(&detected_labels, &map)?;
    let truth = communities_to_ids(&truth_labels, &map)?;

    let score = match args.metric.as_str() {
        "jcprecision" => metrics::jc_precision(&detected, &truth)?.score,
        "jcrecall" => metrics::jc_recall(&detected, &truth)?.score,
        "jcf1" => metrics::jc_f1(&detected, &truth)?,
        "nmi" => {
            let n = map.len();
            let a = layer_from_files(&detected, n)?;
            let b = layer_from_files(&truth, n)?;
            metrics::nmi(&a, &b)?
        }
        "modularity" => {
            let g = graph.ok_or_else(|| {
                Error::ConfigError("--metric modularity needs --input <graph>".into())
            })?;
            let layer = layer_from_files(&detected, g.node_count())?;
            metrics::modularity(&g, &layer)?
        }
        other => {
            return Err(Error::ConfigError(format!(
                "unknown metric {other:?} (expected jcf1, jcprecision, jcrecall, nmi or modularity)"
            )))
        }
    };

    println!("metric,value");
    println!("{},{}", args.metric, score);
    Ok(())
}

fn cmd_trace(args: TraceArgs) -> Result<()> {
    let reader = BufReader::new(File::open(&args.manifest)?);
    match args.out {
        Some(path) => {
            let mut out = BufWriter::new(File::create(path)?);
            trace_section(reader, &args.section, &mut out)?;
            out.flush()?;
        }
        None => {
            let stdout = std::io::stdout();
            trace_section(reader, &args.section, stdout.lock())?;
        }
    }
    Ok(())
}
