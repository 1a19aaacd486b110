use std::collections::BTreeSet;
use std::fs;
use std::path::Path;

use chainflow::analytics::read_centrality_csv;
use chainflow::pipeline::{
    run_pipeline, ConfigOverrides, ExternalSeries, PipelineConfig, PipelineError, SeriesKind,
    REPORT_FILES,
};
use chainflow::roles::{read_role_table, Role};
use chainflow::synth::{planted_network, synthetic_series, PlantedConfig, PlantedNetwork};

fn write_fixture(dir: &Path, cfg: &PlantedConfig) -> PlantedNetwork {
    let net = planted_network(cfg).unwrap();
    let mut edges = Vec::new();
    net.graph.write_edge_list(&mut edges).unwrap();
    fs::write(dir.join("edges.csv"), edges).unwrap();
    let price = ExternalSeries {
        kind: SeriesKind::PriceUsd,
        points: synthetic_series(cfg.start_ts, cfg.end_ts, 86_400, 5),
    };
    let mut buf = Vec::new();
    price.write_csv(&mut buf).unwrap();
    fs::write(dir.join("price.csv"), buf).unwrap();
    net
}

fn config(dir: &Path, out: &str) -> PipelineConfig {
    ConfigOverrides {
        edges_file: Some(dir.join("edges.csv")),
        price_file: Some(dir.join("price.csv")),
        out_dir: Some(dir.join(out)),
        seed: Some(42),
        ..Default::default()
    }
    .build()
    .unwrap()
}

fn small() -> PlantedConfig {
    PlantedConfig {
        nodes: 2_000,
        per_role: 50,
        ..PlantedConfig::default()
    }
}

#[test]
fn planted_roles_recovered() {
    let dir = tempfile::tempdir().unwrap();
    let net = write_fixture(dir.path(), &small());
    let summary = run_pipeline(&config(dir.path(), "out")).unwrap();
    for f in REPORT_FILES {
        assert!(summary.files.iter().any(|w| w == f), "missing {f}");
    }
    let rows = read_role_table(fs::File::open(dir.path().join("out/roles.csv")).unwrap()).unwrap();
    assert_eq!(rows.len(), 2_000);
    for role in Role::ALL {
        let found: BTreeSet<u64> = rows.iter().filter(|r| r.label.has(role)).map(|r| r.user_id).collect();
        let truth: BTreeSet<u64> = net.members(role).into_iter().map(u64::from).collect();
        assert_eq!(found, truth, "{}", role.name());
    }
    let scores = read_centrality_csv(fs::File::open(dir.path().join("out/centrality.csv")).unwrap()).unwrap();
    assert_eq!(scores.len(), 2_000);
    for (node, row) in scores.iter().enumerate() {
        assert_eq!(row.node, node as u64);
        assert_eq!(row.pagerank, net.pagerank[node]);
    }
    let corr = fs::read_to_string(dir.path().join("out/correlation_summary.csv")).unwrap();
    let line = corr
        .lines()
        .find(|l| l.starts_with("centrality_earnings,pagerank,log_log,"))
        .unwrap();
    let r: f64 = line.split(',').nth(3).unwrap().parse().unwrap();
    assert!((r - 1.0).abs() < 1e-6, "{line}");
    assert!(corr.lines().any(|l| l.starts_with("ratio_vs_price,")));
}

#[test]
fn rerun_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    write_fixture(dir.path(), &small());
    let a = run_pipeline(&config(dir.path(), "a")).unwrap();
    let b = run_pipeline(&config(dir.path(), "b")).unwrap();
    assert_eq!(a.files, b.files);
    for f in &a.files {
        let x = fs::read(dir.path().join("a").join(f)).unwrap();
        let y = fs::read(dir.path().join("b").join(f)).unwrap();
        assert!(x == y, "{f} differs");
    }
    let head = fs::read_to_string(dir.path().join("a/thresholds.csv")).unwrap();
    assert!(head.contains("# seed=42"));
    assert!(head.contains("seed,42"));
}

#[test]
fn missing_input_writes_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(dir.path(), "out");
    let err = run_pipeline(&cfg).unwrap_err();
    assert!(matches!(err, PipelineError::MissingInput { .. }), "{err:?}");
    assert_ne!(err.exit_code(), 0);
    assert!(!dir.path().join("out").exists());
}

#[test]
fn bad_price_row_writes_nothing() {
    let dir = tempfile::tempdir().unwrap();
    write_fixture(dir.path(), &small());
    fs::write(dir.path().join("price.csv"), "date_iso8601,value\n2013-01-01,5\n2013-01-02,-1\n").unwrap();
    let err = run_pipeline(&config(dir.path(), "out")).unwrap_err();
    assert_eq!(err.exit_code(), 2);
    assert!(err.to_string().contains("line 3"), "{err}");
    assert!(!dir.path().join("out").exists());
}

#[test]
fn non_convergence_marks_partial_bundle() {
    let dir = tempfile::tempdir().unwrap();
    write_fixture(dir.path(), &small());
    let mut cfg = config(dir.path(), "out");
    cfg.pagerank.max_iterations = 2;
    let err = run_pipeline(&cfg).unwrap_err();
    assert_eq!(err.exit_code(), 3);
    let out = dir.path().join("out");
    assert!(out.join("roles.csv").exists());
    assert!(!out.join("centrality.csv").exists());
    let error = fs::read_to_string(out.join("error.csv")).unwrap();
    assert!(error.contains("centrality,non_convergence,3,"), "{error}");
    let manifest = fs::read_to_string(out.join("manifest.csv")).unwrap();
    assert!(manifest.contains("bundle,partial"));
    assert!(manifest.contains("centrality.csv,missing"));
}
