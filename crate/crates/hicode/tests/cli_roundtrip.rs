//! CLI surface tests: file outputs, round-trips, config precedence,
//! determinism, and exit codes of the installed binary.

use hicode::cli;
use hicode::io::{communities_to_ids, parse_edge_list, read_community_file};
use std::fs;
use std::io::BufReader;
use std::path::Path;
use std::process::Command;

fn run(args: &[&str]) -> hicode::Result<()> {
    cli::run(std::iter::once("hicode").chain(args.iter().copied()))
}

fn gen_small(dir: &Path) {
    run(&[
        "gen",
        "--layers",
        "10:0.16,5:0.08",
        "--nodes",
        "300",
        "--seed",
        "11",
        "--out-dir",
        dir.to_str().unwrap(),
    ])
    .unwrap();
}

#[test]
fn gen_writes_graph_truth_and_params() {
    let dir = tempfile::tempdir().unwrap();
    gen_small(dir.path());
    let (graph, map) = parse_edge_list(BufReader::new(
        fs::File::open(dir.path().join("graph.txt")).unwrap(),
    ))
    .unwrap();
    assert_eq!(graph.node_count(), 300);
    assert!(graph.edge_count() > 0);

    for i in 1..=2 {
        let communities = read_community_file(BufReader::new(
            fs::File::open(dir.path().join(format!("planted{i}.cmty"))).unwrap(),
        ))
        .unwrap();
        // Every truth file resolves against the generated graph.
        let ids = communities_to_ids(&communities, &map).unwrap();
        let covered: usize = ids.iter().map(Vec::len).sum();
        assert_eq!(covered, 300);
    }
    let params = fs::read_to_string(dir.path().join("params.csv")).unwrap();
    assert!(params.starts_with("key,value\n"));
    assert!(params.contains("nodes,300"));
    assert!(params.contains("layer1_communities,10"));
}

#[test]
fn gen_is_deterministic_per_seed() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    gen_small(a.path());
    gen_small(b.path());
    for name in ["graph.txt", "planted1.cmty", "planted2.cmty", "params.csv"] {
        assert_eq!(
            fs::read(a.path().join(name)).unwrap(),
            fs::read(b.path().join(name)).unwrap(),
            "{name} differs between identical gen runs"
        );
    }
}

fn detect_small(graph_dir: &Path, out_dir: &Path, extra: &[&str]) {
    let input = graph_dir.join("graph.txt");
    let mut args = vec![
        "detect",
        "--input",
        input.to_str().unwrap(),
        "--fixed-layers",
        "2",
        "--refine-iters",
        "4",
        "--probe-iters",
        "2",
        "--seed",
        "5",
        "--out-dir",
        out_dir.to_str().unwrap(),
    ];
    args.extend_from_slice(extra);
    run(&args).unwrap();
}

#[test]
fn detect_writes_layers_and_manifest() {
    let data = tempfile::tempdir().unwrap();
    gen_small(data.path());
    let out = tempfile::tempdir().unwrap();
    detect_small(data.path(), out.path(), &[]);

    let (_, map) = parse_edge_list(BufReader::new(
        fs::File::open(data.path().join("graph.txt")).unwrap(),
    ))
    .unwrap();
    for i in 1..=2 {
        let communities = read_community_file(BufReader::new(
            fs::File::open(out.path().join(format!("layer{i}.cmty"))).unwrap(),
        ))
        .unwrap();
        let ids = communities_to_ids(&communities, &map).unwrap();
        let covered: usize = ids.iter().map(Vec::len).sum();
        assert_eq!(covered, 300, "layer {i} is not a full partition");
    }

    let manifest = fs::read_to_string(out.path().join("manifest.csv")).unwrap();
    assert!(manifest.starts_with("record,"));
    assert!(manifest.contains("config,base,louvain"));
    assert!(manifest.contains("result,chosen_layers,2"));
    assert!(manifest.contains("\nsweep,0,"));
    assert!(manifest.contains("\nsweep,4,"));
    let timing = fs::read_to_string(out.path().join("timing.csv")).unwrap();
    assert!(timing.starts_with("stage,seconds\n"));
}

#[test]
fn detect_runs_are_byte_identical() {
    let data = tempfile::tempdir().unwrap();
    gen_small(data.path());
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    detect_small(data.path(), a.path(), &[]);
    detect_small(data.path(), b.path(), &[]);
    for name in ["layer1.cmty", "layer2.cmty", "manifest.csv"] {
        assert_eq!(
            fs::read(a.path().join(name)).unwrap(),
            fs::read(b.path().join(name)).unwrap(),
            "{name} differs between identical detect runs"
        );
    }
}

#[test]
fn config_file_fills_defaults_and_cli_wins() {
    let data = tempfile::tempdir().unwrap();
    gen_small(data.path());
    let out = tempfile::tempdir().unwrap();
    let config_path = data.path().join("run.conf");
    fs::write(
        &config_path,
        format!(
            "# run settings\ninput = {}\nrefine-iters = 3\nprobe-iters = 1\nseed = 9\nfixed-layers = 2\n",
            data.path().join("graph.txt").display()
        ),
    )
    .unwrap();
    // --seed on the command line overrides the file; everything else comes
    // from the file.
    run(&[
        "detect",
        "--config",
        config_path.to_str().unwrap(),
        "--seed",
        "77",
        "--out-dir",
        out.path().to_str().unwrap(),
    ])
    .unwrap();
    let manifest = fs::read_to_string(out.path().join("manifest.csv")).unwrap();
    assert!(manifest.contains("config,seed,77"));
    assert!(manifest.contains("config,refine_iters,3"));
    assert!(manifest.contains("config,fixed_layers,2"));
}

#[test]
fn eval_prints_parseable_csv_scores() {
    let data = tempfile::tempdir().unwrap();
    gen_small(data.path());
    let out = tempfile::tempdir().unwrap();
    detect_small(data.path(), out.path(), &[]);

    // Self-comparison must give a perfect score.
    let truth = data.path().join("planted1.cmty");
    run(&[
        "eval",
        "--detected",
        truth.to_str().unwrap(),
        "--truth",
        truth.to_str().unwrap(),
        "--metric",
        "jcf1",
    ])
    .unwrap();

    // Detected layers against truth, exercising the graph-backed path.
    run(&[
        "eval",
        "--detected",
        out.path().join("layer1.cmty").to_str().unwrap(),
        "--truth",
        truth.to_str().unwrap(),
        "--metric",
        "nmi",
        "--input",
        data.path().join("graph.txt").to_str().unwrap(),
    ])
    .unwrap();

    run(&[
        "eval",
        "--detected",
        out.path().join("layer1.cmty").to_str().unwrap(),
        "--metric",
        "modularity",
        "--input",
        data.path().join("graph.txt").to_str().unwrap(),
    ])
    .unwrap();

    // Several files per side concatenate into one community set.
    run(&[
        "eval",
        "--detected",
        out.path().join("layer1.cmty").to_str().unwrap(),
        out.path().join("layer2.cmty").to_str().unwrap(),
        "--truth",
        data.path().join("planted1.cmty").to_str().unwrap(),
        data.path().join("planted2.cmty").to_str().unwrap(),
        "--metric",
        "jcf1",
        "--input",
        data.path().join("graph.txt").to_str().unwrap(),
    ])
    .unwrap();
}

#[test]
fn trace_reemits_sections() {
    let data = tempfile::tempdir().unwrap();
    gen_small(data.path());
    let out = tempfile::tempdir().unwrap();
    detect_small(data.path(), out.path(), &[]);
    let manifest = out.path().join("manifest.csv");
    let sweeps_out = out.path().join("sweeps.csv");
    run(&[
        "trace",
        "--manifest",
        manifest.to_str().unwrap(),
        "--section",
        "sweeps",
        "--out",
        sweeps_out.to_str().unwrap(),
    ])
    .unwrap();
    let text = fs::read_to_string(&sweeps_out).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "sweep,avg_orig_q,avg_reduced_q,max_pairwise_nmi"
    );
    assert_eq!(lines.count(), 5); // sweeps 0..=4
}

#[test]
fn binary_eval_emits_one_csv_score_line() {
    let data = tempfile::tempdir().unwrap();
    gen_small(data.path());
    let truth = data.path().join("planted1.cmty");
    let output = Command::new(env!("CARGO_BIN_EXE_hicode"))
        .args([
            "eval",
            "--detected",
            truth.to_str().unwrap(),
            "--truth",
            truth.to_str().unwrap(),
            "--metric",
            "jcf1",
        ])
        .output()
        .unwrap();
    assert!(output.status.success());
    let stdout = String::from_utf8(output.stdout).unwrap();
    let lines: Vec<&str> = stdout.lines().collect();
    assert_eq!(lines[0], "metric,value");
    let (metric, value) = lines[1].split_once(',').unwrap();
    assert_eq!(metric, "jcf1");
    assert_eq!(value.parse::<f64>().unwrap(), 1.0);
    assert_eq!(lines.len(), 2);
}

#[test]
fn binary_exit_codes() {
    let exe = env!("CARGO_BIN_EXE_hicode");
    // Usage error: unknown subcommand -> clap exits 2.
    let status = Command::new(exe).arg("frobnicate").output().unwrap();
    assert_eq!(status.status.code(), Some(2));
    // Runtime error: missing input file -> exit 1.
    let out_dir = tempfile::tempdir().unwrap();
    let status = Command::new(exe)
        .args([
            "detect",
            "--input",
            "/nonexistent/graph.txt",
            "--out-dir",
            out_dir.path().to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert_eq!(status.status.code(), Some(1));
    // Success -> exit 0.
    let data = tempfile::tempdir().unwrap();
    let status = Command::new(exe)
        .args([
            "gen",
            "--layers",
            "4:0.5",
            "--nodes",
            "40",
            "--seed",
            "1",
            "--out-dir",
            data.path().to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert_eq!(status.status.code(), Some(0));
}
