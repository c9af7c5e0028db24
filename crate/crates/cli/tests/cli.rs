use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn mog(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mog"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str]) -> String {
    let out = mog(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn generate_mog_render_pipeline() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    let graph = dir.join("torus.json");
    let summary = dir.join("summary.json");
    let svg = dir.join("summary.svg");
    ok(&[
        "generate",
        "--kind",
        "torus_mesh",
        "--param",
        "rows=16,cols=16",
        "--out",
        s(&graph),
    ]);
    ok(&[
        "mog",
        "--graph",
        s(&graph),
        "--lens",
        "l2",
        "--n",
        "3",
        "--eps",
        "0.3",
        "--largest-only",
        "--out",
        s(&summary),
    ]);
    let doc: Value = serde_json::from_str(&fs::read_to_string(&summary).unwrap()).unwrap();
    let nodes = doc["nodes"].as_array().unwrap();
    let edges = doc["edges"].as_array().unwrap();
    assert_eq!(nodes.len(), 3);
    assert_eq!(edges.len(), 3);
    assert_eq!(doc["meta"]["graph_nodes"], 256);
    assert!(doc["meta"]["graph_id"].is_string());
    let covered: usize = nodes
        .iter()
        .map(|n| n["size"].as_u64().unwrap() as usize)
        .sum();
    assert!(covered >= 256);

    ok(&["render", "--summary", s(&summary), "--out", s(&svg)]);
    let text = fs::read_to_string(&svg).unwrap();
    assert!(text.starts_with("<svg"));
    assert_eq!(text.matches("<circle").count(), 3);

    let laid = dir.join("laid.json");
    ok(&[
        "layout",
        "--graph",
        s(&graph),
        "--iterations",
        "50",
        "--out",
        s(&laid),
    ]);
    let graph_svg = dir.join("graph.svg");
    ok(&[
        "render",
        "--graph",
        s(&laid),
        "--lens",
        "pagerank",
        "--out",
        s(&graph_svg),
    ]);
    assert_eq!(
        fs::read_to_string(&graph_svg)
            .unwrap()
            .matches("<circle")
            .count(),
        256
    );
}

#[test]
fn outputs_are_reproducible() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    let graph = dir.join("g.txt");
    ok(&[
        "generate",
        "--kind",
        "random_geometric",
        "--param",
        "n=300,radius=0.12",
        "--seed",
        "9",
        "--out",
        s(&graph),
    ]);
    let again = ok(&[
        "generate",
        "--kind",
        "random_geometric",
        "--param",
        "n=300,radius=0.12",
        "--seed",
        "9",
    ]);
    assert_eq!(fs::read_to_string(&graph).unwrap(), again);
    for lens in ["agd", "l2", "pagerank"] {
        let a = ok(&["mog", "--graph", s(&graph), "--lens", lens]);
        let b = ok(&["mog", "--graph", s(&graph), "--lens", lens]);
        assert_eq!(a, b, "{lens}");
    }
    let a = ok(&[
        "layout",
        "--graph",
        s(&graph),
        "--seed",
        "3",
        "--iterations",
        "40",
    ]);
    let b = ok(&[
        "layout",
        "--graph",
        s(&graph),
        "--seed",
        "3",
        "--iterations",
        "40",
    ]);
    assert_eq!(a, b);
}

#[test]
fn missing_input_names_the_path() {
    let out = mog(&["mog", "--graph", "/definitely/not/here.txt"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("/definitely/not/here.txt"));
}

#[test]
fn malformed_input_reports_line() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    let graph = dir.join("bad.txt");
    fs::write(&graph, "a b\nc\n").unwrap();
    let out = mog(&["lens", "--graph", s(&graph)]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("bad.txt") && err.contains("line 2"), "{err}");
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(mog(&["mog", "--no-such-flag"]).status.code(), Some(2));
    assert_eq!(mog(&["mog"]).status.code(), Some(2));
    assert_eq!(mog(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn help_lists_defaults() {
    let help = ok(&["mog", "--help"]);
    for needle in [
        "[default: agd, pagerank for `bench`]",
        "[default: 5]",
        "[default: 0.1]",
        "[default: 2]",
        "[default: 0.85]",
    ] {
        assert!(help.contains(needle), "missing {needle}");
    }
    let top = ok(&["--help"]);
    for cmd in [
        "generate",
        "lens",
        "cover",
        "mog",
        "layout",
        "render",
        "bench",
        "serve",
        "fetch-datasets",
    ] {
        assert!(top.contains(cmd), "missing {cmd}");
    }
}

#[test]
fn lens_output_and_largest_component() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    let graph = dir.join("two.txt");
    fs::write(&graph, "a b\nb c\nx y\n").unwrap();
    let out = mog(&["lens", "--graph", s(&graph), "--lens", "l2"]);
    assert_eq!(out.status.code(), Some(1));
    let doc: Value = serde_json::from_str(&ok(&[
        "lens",
        "--graph",
        s(&graph),
        "--lens",
        "agd",
        "--largest-component",
        "--bins",
        "4",
    ]))
    .unwrap();
    assert_eq!(doc["restricted_to_largest_component"], true);
    assert_eq!(doc["nodes"], serde_json::json!(["a", "b", "c"]));
    assert_eq!(doc["normalized"], serde_json::json!([1.0, 0.0, 1.0]));
    assert_eq!(doc["histogram"]["counts"], serde_json::json!([1, 0, 0, 2]));
}

#[test]
fn cover_modification_reports_gaps() {
    let out = mog(&["cover", "--n", "3", "--eps", "0.1", "--modify", "1:0.5:0.6"]);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("not covered"));
    let doc: Value = serde_json::from_slice(&out.stdout).unwrap();
    let iv = &doc["intervals"][1];
    assert_eq!(
        (iv["lo"].as_f64(), iv["hi"].as_f64()),
        (Some(0.5), Some(0.6))
    );
    assert_eq!(doc["provenance"], "manual");
    assert_eq!(mog(&["cover", "--modify", "1:0.5"]).status.code(), Some(1));
}

#[test]
fn bench_reports_medians() {
    let one: Value = serde_json::from_str(&ok(&[
        "bench",
        "--generator",
        "grid",
        "--param",
        "rows=10,cols=10",
        "--repeats",
        "1",
        "--format",
        "json",
    ]))
    .unwrap();
    let five: Value = serde_json::from_str(&ok(&[
        "bench",
        "--generator",
        "grid",
        "--param",
        "rows=10,cols=10",
        "--repeats",
        "5",
        "--format",
        "json",
    ]))
    .unwrap();
    let keys = |v: &Value| v.as_object().unwrap().keys().cloned().collect::<Vec<_>>();
    assert_eq!(keys(&one), keys(&five));
    assert_eq!(one["statistic"], "median");
    assert_eq!(one["lens"], "pagerank");
    assert_eq!(one["intervals"], 5);
    assert_eq!(one["epsilon"], 0.15);
    assert_eq!(five["lens_samples"].as_array().unwrap().len(), 5);
    assert_eq!(one["summary_nodes"], five["summary_nodes"]);
    let tsv = ok(&[
        "bench",
        "--generator",
        "cycle",
        "--param",
        "n=30",
        "--repeats",
        "2",
    ]);
    let lines: Vec<&str> = tsv.lines().collect();
    assert_eq!(lines.len(), 2);
    assert_eq!(lines[0].split('\t').count(), lines[1].split('\t').count());
}

#[test]
fn config_file_sets_layout_defaults() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    let cfg = dir.join("mog.toml");
    fs::write(&cfg, "[layout]\niterations = 7\n\n[service]\nport = 9999\n").unwrap();
    let graph = dir.join("p.txt");
    fs::write(&graph, "a b\nb c\n").unwrap();
    let a = ok(&["layout", "--graph", s(&graph), "--config", s(&cfg)]);
    let b = ok(&["layout", "--graph", s(&graph), "--iterations", "7"]);
    assert_eq!(a, b);
    fs::write(&cfg, "[layout\n").unwrap();
    let out = mog(&["layout", "--graph", s(&graph), "--config", s(&cfg)]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("mog.toml"));
}

#[test]
fn dataset_catalogue_lists() {
    let list = ok(&["fetch-datasets", "--list"]);
    assert!(list.contains("ca-CondMat\t23133\t93497"));
    assert_eq!(
        mog(&["fetch-datasets", "--only", "karate", "--dest", "/tmp"])
            .status
            .code(),
        Some(1)
    );
}
