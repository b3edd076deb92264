//! Acceptance suite. Each test checks one release criterion at its stated
//! tolerance and prints a single PASS line on success (a failed assertion
//! prints the criterion with FAIL instead). Run with
//! `cargo test --test acceptance -- --nocapture` to see the lines.

use hicode::cli;
use hicode::detect::{louvain_detect, DetectorKind};
use hicode::graph::{Graph, Layer};
use hicode::metrics::{jc_f1, jc_precision, jc_recall, modularity, nmi};
use hicode::pipeline::{
    identify, refine, run_cascade, run_hicode, select_num_layers, PipelineConfig,
};
use hicode::reduce::{
    community_densities, reduce_edge_reduce, ReductionMethod,
};
use hicode::synth::{generate, presets};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::time::Instant;

const GEN_SEED: u64 = 7;
const PIPE_SEED: u64 = 42;

struct Criterion {
    number: usize,
    name: &'static str,
    failed: bool,
}

impl Criterion {
    fn new(number: usize, name: &'static str) -> Self {
        Criterion {
            number,
            name,
            failed: false,
        }
    }

    fn check(&mut self, ok: bool, detail: std::fmt::Arguments) {
        if !ok {
            self.failed = true;
            println!(
                "ACCEPTANCE {} ({}): FAIL - {}",
                self.number, self.name, detail
            );
        }
    }

    fn finish(self) {
        if self.failed {
            panic!("acceptance criterion {} ({}) failed", self.number, self.name);
        }
        println!("ACCEPTANCE {} ({}): PASS", self.number, self.name);
    }
}

fn cfg() -> PipelineConfig {
    PipelineConfig::new(DetectorKind::Louvain, ReductionMethod::ReduceWeight, PIPE_SEED)
}

fn all_communities(layers: &[Layer]) -> Vec<Vec<u32>> {
    layers.iter().flat_map(|l| l.communities()).collect()
}

#[test]
fn criterion_1_generator_fidelity() {
    let mut crit = Criterion::new(1, "generator fidelity");
    for (name, specs, target_edges, target_q) in [
        ("synl2", presets::synl2(), 14_446.0, vec![0.491, 0.492]),
        ("synl3", presets::synl3(), 21_510.0, vec![0.332, 0.321, 0.323]),
    ] {
        let mut edge_counts = Vec::new();
        for seed in 0..10u64 {
            let start = Instant::now();
            let inst = generate(3000, &specs, seed).unwrap();
            let elapsed = start.elapsed().as_secs_f64();
            crit.check(
                elapsed < 10.0,
                format_args!("{name} seed {seed}: generation took {elapsed:.1}s >= 10s"),
            );
            edge_counts.push(inst.graph.edge_count() as f64);
            for (layer, &target) in inst.planted.iter().zip(&target_q) {
                let q = modularity(&inst.graph, layer).unwrap();
                crit.check(
                    (q - target).abs() <= 0.02,
                    format_args!("{name} seed {seed}: planted Q {q:.4} vs target {target}"),
                );
            }
        }
        let mean = edge_counts.iter().sum::<f64>() / edge_counts.len() as f64;
        crit.check(
            (mean - target_edges).abs() / target_edges <= 0.03,
            format_args!("{name}: mean edge count {mean:.1} vs target {target_edges}"),
        );
    }
    crit.finish();
}

#[test]
fn criterion_2_layer_count_selection() {
    let mut crit = Criterion::new(2, "layer-count selection");
    for (name, specs, want) in [
        ("synl2", presets::synl2(), 2usize),
        ("synl3", presets::synl3(), 3usize),
    ] {
        let mut hits = 0;
        for seed in 0..10u64 {
            let inst = generate(3000, &specs, seed).unwrap();
            let trace = select_num_layers(&inst.graph, &cfg()).unwrap();
            if trace.chosen == want {
                hits += 1;
            }
        }
        crit.check(
            hits >= 8,
            format_args!("{name}: selected {want} layers on only {hits}/10 seeds"),
        );
    }
    crit.finish();
}

#[test]
fn criterion_3_recovery_quality() {
    let mut crit = Criterion::new(3, "recovery quality");

    let inst2 = generate(3000, &presets::synl2(), GEN_SEED).unwrap();
    let start = Instant::now();
    let stack2 = run_hicode(&inst2.graph, &cfg()).unwrap();
    let elapsed2 = start.elapsed().as_secs_f64();
    let f1_2 = jc_f1(
        &stack2.all_communities(),
        &all_communities(&inst2.planted),
    )
    .unwrap();
    crit.check(
        f1_2 >= 0.92,
        format_args!("synl2 overall JCF1 {f1_2:.4} < 0.92"),
    );
    crit.check(
        elapsed2 < 300.0,
        format_args!("synl2 run took {elapsed2:.0}s >= 300s"),
    );

    let inst3 = generate(3000, &presets::synl3(), GEN_SEED).unwrap();
    let start = Instant::now();
    let stack3 = run_hicode(&inst3.graph, &cfg()).unwrap();
    let elapsed3 = start.elapsed().as_secs_f64();
    let f1_3 = jc_f1(
        &stack3.all_communities(),
        &all_communities(&inst3.planted),
    )
    .unwrap();
    crit.check(
        f1_3 >= 0.90,
        format_args!("synl3 overall JCF1 {f1_3:.4} < 0.90"),
    );
    crit.check(
        elapsed3 < 300.0,
        format_args!("synl3 run took {elapsed3:.0}s >= 300s"),
    );
    crit.check(
        stack3.num_layers() == 3,
        format_args!("synl3 selected {} layers, want 3", stack3.num_layers()),
    );

    // Per-layer matrix on the three-layer instance: strongly diagonal under
    // the best assignment of detected layers to planted layers.
    let mut assigned = vec![false; inst3.planted.len()];
    for (i, layer) in stack3.layers.iter().enumerate() {
        let detected = layer.communities();
        let scores: Vec<f64> = inst3
            .planted
            .iter()
            .map(|p| jc_f1(&detected, &p.communities()).unwrap())
            .collect();
        let best = (0..scores.len())
            .max_by(|&a, &b| scores[a].total_cmp(&scores[b]))
            .unwrap();
        crit.check(
            !assigned[best],
            format_args!("layer {} maps to an already-claimed planted layer", i + 1),
        );
        assigned[best] = true;
        crit.check(
            scores[best] >= 0.85,
            format_args!("diagonal JCF1 for layer {} is {:.4} < 0.85", i + 1, scores[best]),
        );
        for (j, &s) in scores.iter().enumerate() {
            if j != best {
                crit.check(
                    s <= 0.10,
                    format_args!(
                        "off-diagonal JCF1 layer {} vs planted {} is {s:.4} > 0.10",
                        i + 1,
                        j + 1
                    ),
                );
            }
        }
    }
    crit.finish();
}

#[test]
fn criterion_4_hidden_layer_contrast() {
    let mut crit = Criterion::new(4, "hidden-layer contrast");
    let inst = generate(3000, &presets::synl3(), GEN_SEED).unwrap();
    let truth = all_communities(&inst.planted);

    let bare = louvain_detect(&inst.graph, 1234).unwrap();
    let bare_f1 = jc_f1(&bare.communities(), &truth).unwrap();
    crit.check(
        bare_f1 <= 0.35,
        format_args!("bare detector JCF1 {bare_f1:.4} > 0.35"),
    );

    let mut cascade_cfg = cfg();
    cascade_cfg.fixed_layers = Some(3);
    let cascade = run_cascade(&inst.graph, &cascade_cfg).unwrap();
    let cascade_f1 = jc_f1(&all_communities(&cascade.layers), &truth).unwrap();
    crit.check(
        cascade_f1 <= 0.45,
        format_args!("cascade JCF1 {cascade_f1:.4} > 0.45"),
    );

    let full = run_hicode(&inst.graph, &cfg()).unwrap();
    let full_f1 = jc_f1(&full.all_communities(), &truth).unwrap();
    crit.check(
        full_f1 - bare_f1 >= 0.4,
        format_args!("pipeline beats bare by only {:.4}", full_f1 - bare_f1),
    );
    crit.check(
        full_f1 - cascade_f1 >= 0.4,
        format_args!("pipeline beats cascade by only {:.4}", full_f1 - cascade_f1),
    );
    crit.finish();
}

#[test]
fn criterion_5_refinement_ablation() {
    let mut crit = Criterion::new(5, "refinement ablation");
    let inst = generate(3000, &presets::synl3(), GEN_SEED).unwrap();
    let best_nmi = |layer: &Layer| -> f64 {
        inst.planted
            .iter()
            .map(|p| nmi(layer, p).unwrap())
            .fold(f64::NEG_INFINITY, f64::max)
    };

    let stack = identify(&inst.graph, &cfg(), 3).unwrap();
    let pre: Vec<f64> = stack.layers.iter().map(&best_nmi).collect();
    let refined = refine(&inst.graph, stack, &cfg()).unwrap();
    let post: Vec<f64> = refined.layers.iter().map(&best_nmi).collect();

    for (i, (before, after)) in pre.iter().zip(&post).enumerate() {
        crit.check(
            after > before,
            format_args!("layer {}: NMI {before:.4} -> {after:.4} did not improve", i + 1),
        );
    }
    let pre_avg = pre.iter().sum::<f64>() / pre.len() as f64;
    let post_avg = post.iter().sum::<f64>() / post.len() as f64;
    let gain = (post_avg - pre_avg) / pre_avg;
    crit.check(
        gain >= 0.15,
        format_args!("average NMI improved by {:.1}% < 15%", gain * 100.0),
    );
    crit.finish();
}

/// Independent modularity oracle: explicit pair sum on a dense matrix.
fn brute_force_modularity(g: &Graph, layer: &Layer) -> f64 {
    let n = g.node_count();
    let mut a = vec![0.0f64; n * n];
    for &(u, v, w) in g.edges() {
        a[u as usize * n + v as usize] = w;
        a[v as usize * n + u as usize] = w;
    }
    let k: Vec<f64> = (0..n).map(|u| g.degree(u as u32)).collect();
    let two_w = 2.0 * g.total_weight();
    let mut q = 0.0;
    for u in 0..n {
        for v in 0..n {
            if layer.community_of(u as u32) == layer.community_of(v as u32) {
                q += a[u * n + v] - k[u] * k[v] / two_w;
            }
        }
    }
    q / two_w
}

#[test]
fn criterion_6_property_suites() {
    let mut crit = Criterion::new(6, "property oracles");
    let mut rng = ChaCha8Rng::seed_from_u64(2024);

    // 6a: modularity vs brute-force pair sum, 50 random graphs <= 200 nodes.
    for trial in 0..50 {
        let n = rng.gen_range(5..=200);
        let mut edges = Vec::new();
        for u in 0..n as u32 {
            for v in (u + 1)..n as u32 {
                if rng.gen_bool(0.06) {
                    edges.push((u, v, rng.gen_range(0.1..4.0)));
                }
            }
        }
        let g = Graph::from_edges_with_nodes(n, edges).unwrap();
        if g.total_weight() == 0.0 {
            continue;
        }
        let labels: Vec<u32> = (0..n).map(|_| rng.gen_range(0..10)).collect();
        let layer = Layer::from_assignment(&labels);
        let fast = modularity(&g, &layer).unwrap();
        let slow = brute_force_modularity(&g, &layer);
        crit.check(
            (fast - slow).abs() < 1e-9,
            format_args!("trial {trial}: modularity {fast} vs oracle {slow}"),
        );
    }

    // 6b: precision/recall role symmetry, exact, 100 random pairs.
    for trial in 0..100 {
        let random_sets = |rng: &mut ChaCha8Rng| -> Vec<Vec<u32>> {
            (0..rng.gen_range(1..8))
                .map(|_| {
                    let len = rng.gen_range(1..10);
                    let mut s: Vec<u32> = (0..len).map(|_| rng.gen_range(0..50)).collect();
                    s.sort_unstable();
                    s.dedup();
                    s
                })
                .collect()
        };
        let d = random_sets(&mut rng);
        let t = random_sets(&mut rng);
        let p = jc_precision(&d, &t).unwrap().score;
        let r = jc_recall(&t, &d).unwrap().score;
        crit.check(
            p == r,
            format_args!("trial {trial}: precision(d,t) {p} != recall(t,d) {r}"),
        );
    }

    // 6c: edge-sampling reduction survival within 4 sigma, 50 trials.
    {
        let mut edges: Vec<(u32, u32)> = Vec::new();
        for u in 0..30u32 {
            for v in (u + 1)..30 {
                edges.push((u, v));
            }
        }
        let mut outside: Vec<(u32, u32)> = Vec::new();
        for u in 30..60u32 {
            for v in (u + 1)..60 {
                outside.push((u, v));
            }
        }
        use rand::seq::SliceRandom;
        outside.shuffle(&mut rng);
        edges.extend(outside.into_iter().take(107));
        let g = Graph::from_pairs(edges).unwrap();
        let mut labels = vec![0u32; 60];
        labels[30..].fill(1);
        let layer = Layer::from_assignment(&labels);
        let ratio = community_densities(&g, &layer, false).unwrap()[0]
            .unwrap()
            .ratio;
        let mean = 435.0 * ratio;
        let sigma = (435.0 * ratio * (1.0 - ratio)).sqrt();
        for seed in 0..50u64 {
            let reduced = reduce_edge_reduce(&g, &layer, seed).unwrap();
            let survivors = reduced
                .edges()
                .iter()
                .filter(|&&(u, v, _)| u < 30 && v < 30)
                .count() as f64;
            crit.check(
                (survivors - mean).abs() <= 4.0 * sigma,
                format_args!("seed {seed}: {survivors} survivors vs {mean:.1} +- {:.1}", 4.0 * sigma),
            );
        }
    }

    // 6d: every pipeline output is a valid partition, 100 randomized configs.
    for trial in 0..100u64 {
        let n = rng.gen_range(20..60);
        let k = rng.gen_range(2..6);
        let p = rng.gen_range(0.2..0.8);
        let inst = generate(n, &[hicode::synth::LayerSpec::new(k, p)], trial).unwrap();
        let detector = if rng.gen_bool(0.5) {
            DetectorKind::Louvain
        } else {
            DetectorKind::LabelPropagation
        };
        let reduction = match rng.gen_range(0..3) {
            0 => ReductionMethod::RemoveEdge,
            1 => ReductionMethod::ReduceEdge,
            _ => ReductionMethod::ReduceWeight,
        };
        let mut config = PipelineConfig::new(detector, reduction, trial);
        config.refine_iters = rng.gen_range(0..4);
        config.probe_iters = config.refine_iters.min(rng.gen_range(0..3));
        config.max_layers = rng.gen_range(2..5);
        if rng.gen_bool(0.5) {
            config.fixed_layers = Some(rng.gen_range(1..=config.max_layers));
        }
        if config.validate().is_err() {
            // Incompatible detector/reduction pairing; rejection is the
            // contract here.
            continue;
        }
        let stack = run_hicode(&inst.graph, &config).unwrap();
        for (li, layer) in stack.layers.iter().enumerate() {
            crit.check(
                layer.node_count() == n,
                format_args!("trial {trial}: layer {li} covers {} of {n} nodes", layer.node_count()),
            );
            let covered: usize = layer.communities().iter().map(Vec::len).sum();
            crit.check(
                covered == n,
                format_args!("trial {trial}: layer {li} assigns {covered} of {n} nodes"),
            );
        }
    }
    crit.finish();
}

#[test]
fn criterion_7_cli_determinism() {
    let mut crit = Criterion::new(7, "byte-identical reruns");
    let data = tempfile::tempdir().unwrap();
    cli::run([
        "hicode",
        "gen",
        "--preset",
        "synl2",
        "--seed",
        "7",
        "--out-dir",
        data.path().to_str().unwrap(),
    ])
    .unwrap();

    let mut outputs = Vec::new();
    for run_dir in ["a", "b"] {
        let out = data.path().join(run_dir);
        cli::run([
            "hicode",
            "detect",
            "--input",
            data.path().join("graph.txt").to_str().unwrap(),
            "--base",
            "louvain",
            "--reduction",
            "reduce-weight",
            "--seed",
            "42",
            "--out-dir",
            out.to_str().unwrap(),
        ])
        .unwrap();
        outputs.push(out);
    }

    let mut names: Vec<String> = std::fs::read_dir(&outputs[0])
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .filter(|n| n.ends_with(".cmty") || n == "manifest.csv")
        .collect();
    names.sort();
    crit.check(
        names.iter().any(|n| n == "layer2.cmty"),
        format_args!("expected at least two layer files, got {names:?}"),
    );
    for name in &names {
        let a = std::fs::read(outputs[0].join(name)).unwrap();
        let b = std::fs::read(outputs[1].join(name)).unwrap();
        crit.check(
            a == b,
            format_args!("{name} differs between identical runs"),
        );
    }
    crit.finish();
}
