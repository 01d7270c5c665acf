use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn netform(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_netform")).current_dir(dir).args(args).output().expect("spawn netform")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn ok(dir: &Path, args: &[&str]) -> Output {
    let out = netform(dir, args);
    assert_eq!(code(&out), 0, "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    out
}

fn json(path: PathBuf) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

/// Data rows of a CSV artifact, skipping `#` header lines.
fn rows(path: PathBuf) -> Vec<Vec<String>> {
    let text = fs::read_to_string(path).unwrap();
    let body: String = text.lines().filter(|l| !l.starts_with('#')).map(|l| format!("{l}\n")).collect();
    let mut r = csv::ReaderBuilder::new().has_headers(true).from_reader(body.as_bytes());
    r.records().map(|rec| rec.unwrap().iter().map(str::to_string).collect()).collect()
}

#[test]
fn generate_kautz_2_3() {
    let dir = TempDir::new().unwrap();
    ok(dir.path(), &["generate", "--type", "kautz", "--d", "2", "--D", "3", "-o", "k.json"]);
    let doc = json(dir.path().join("k.json"));
    assert_eq!(doc["format"], "netform-graph/1");
    assert_eq!(doc["n"], 12);
    assert_eq!(doc["speaking"].as_array().unwrap().len(), 24);
    assert_eq!(doc["provenance"]["command"], "generate");
    assert!(doc["provenance"]["version"].is_string());
}

#[test]
fn generate_flower_26_10() {
    let dir = TempDir::new().unwrap();
    let out = ok(dir.path(), &["generate", "--type", "flower", "--n", "26", "--k", "10", "-o", "f.json"]);
    let doc = json(dir.path().join("f.json"));
    assert_eq!(doc["n"], 26);
    assert_eq!(doc["speaking"].as_array().unwrap().len(), 30);
    let summary = String::from_utf8(out.stdout).unwrap();
    assert!(summary.contains("n=26") && summary.contains("speaking_edges=30") && summary.contains("diameter=10"));
}

#[test]
fn generate_rejects_bad_input() {
    let dir = TempDir::new().unwrap();
    let out = netform(dir.path(), &["generate", "--type", "cycle", "--n", "1"]);
    assert_eq!(code(&out), 1);
    assert!(!String::from_utf8_lossy(&out.stderr).is_empty());
    assert!(!dir.path().join("graph.json").exists());
    assert_eq!(code(&netform(dir.path(), &["generate", "--type", "kautz", "--d", "2"])), 1);
    assert_eq!(code(&netform(dir.path(), &["generate", "--type", "hexagon", "--n", "3"])), 1);
    assert_eq!(code(&netform(dir.path(), &["frobnicate"])), 1);
    assert_eq!(code(&netform(dir.path(), &["--help"])), 0);
}

#[test]
fn random_generation_records_drawn_seed() {
    let dir = TempDir::new().unwrap();
    let out = ok(dir.path(), &["generate", "--type", "random", "--n", "5", "--p", "0.5", "-o", "a.json"]);
    assert!(String::from_utf8_lossy(&out.stderr).contains("seed"));
    let doc = json(dir.path().join("a.json"));
    let seed = doc["provenance"]["config"]["seed"].as_u64().expect("seed recorded");
    ok(
        dir.path(),
        &["generate", "--type", "random", "--n", "5", "--p", "0.5", "--seed", &seed.to_string(), "-o", "b.json"],
    );
    let again = json(dir.path().join("b.json"));
    assert_eq!(doc["speaking"], again["speaking"]);
}

#[test]
fn dynamics_on_stable_graph_makes_no_mutations() {
    let dir = TempDir::new().unwrap();
    ok(dir.path(), &["generate", "--type", "cycle", "--n", "3", "-o", "c.json"]);
    ok(dir.path(), &["dynamics", "--graph", "c.json", "--cs", "1", "--k", "inf", "--seed", "1"]);
    assert!(rows(dir.path().join("trace.csv")).is_empty());
    let trace = fs::read_to_string(dir.path().join("trace.csv")).unwrap();
    assert!(trace.contains("# converged=true rounds_used=0 mutations=0"));
    let fin = json(dir.path().join("final.json"));
    assert_eq!(fin["speaking"], json(dir.path().join("c.json"))["speaking"]);
}

#[test]
fn dynamics_is_deterministic_under_a_seed() {
    let runs: Vec<TempDir> = (0..2).map(|_| TempDir::new().unwrap()).collect();
    for dir in &runs {
        let d = dir.path();
        ok(d, &["generate", "--type", "random", "--n", "6", "--p", "0.4", "--mode", "bidirected", "--seed", "11"]);
        ok(d, &["dynamics", "--graph", "graph.json", "--cs", "7/10", "--k", "3", "--seed", "7"]);
    }
    for file in ["graph.json", "trace.csv", "final.json"] {
        let a = fs::read(runs[0].path().join(file)).unwrap();
        let b = fs::read(runs[1].path().join(file)).unwrap();
        assert_eq!(a, b, "{file} differs between identical runs");
    }
}

#[test]
fn bidirected_random_dynamics_converge() {
    let dir = TempDir::new().unwrap();
    let d = dir.path();
    ok(d, &["generate", "--type", "random", "--n", "6", "--p", "0.4", "--mode", "bidirected", "--seed", "5"]);
    ok(
        d,
        &[
            "dynamics",
            "--graph",
            "graph.json",
            "--cs",
            "0.7",
            "--cl",
            "0.7",
            "--k",
            "3",
            "--seed",
            "2",
            "--max-rounds",
            "1000000",
        ],
    );
    let trace = fs::read_to_string(d.join("trace.csv")).unwrap();
    assert!(trace.starts_with("# format=netform-trace/1\n# provenance={"));
    assert!(trace.contains("# converged=true"));
    for row in rows(d.join("trace.csv")) {
        assert_eq!(row.len(), 7);
        assert!(row[4] == "added" || row[4] == "removed");
    }
    assert_eq!(json(d.join("final.json"))["provenance"]["result"]["converged"], true);
}

#[test]
fn dynamics_exit_codes() {
    let dir = TempDir::new().unwrap();
    let d = dir.path();
    ok(d, &["generate", "--type", "empty", "--n", "5"]);
    let capped = netform(
        d,
        &["dynamics", "--graph", "graph.json", "--cs", "1/2", "--k", "inf", "--seed", "3", "--max-rounds", "1"],
    );
    assert_eq!(code(&capped), 2);
    assert!(fs::read_to_string(d.join("trace.csv")).unwrap().contains("# converged=false"));

    let finite = netform(d, &["dynamics", "--graph", "graph.json", "--cs", "1/2", "--k", "2", "--seed", "3"]);
    assert!(String::from_utf8_lossy(&finite.stderr).contains("warning"));

    assert_eq!(code(&netform(d, &["dynamics", "--graph", "missing.json", "--cs", "1", "--k", "2", "--seed", "1"])), 1);
    assert_eq!(code(&netform(d, &["dynamics", "--graph", "graph.json", "--cs", "1", "--cl", "1", "--k", "2"])), 1);
    assert_eq!(code(&netform(d, &["dynamics", "--graph", "graph.json", "--cs", "-1", "--k", "2"])), 1);
    assert_eq!(code(&netform(d, &["dynamics", "--graph", "graph.json", "--cs", "1", "--k", "0"])), 1);
    fs::write(d.join("bad.json"), "{\"format\": \"netform-graph/9\"}").unwrap();
    assert_eq!(code(&netform(d, &["dynamics", "--graph", "bad.json", "--cs", "1", "--k", "2", "--seed", "1"])), 1);
}

#[test]
fn analyze_flower_10_6() {
    let dir = TempDir::new().unwrap();
    let d = dir.path();
    ok(d, &["generate", "--type", "flower", "--n", "10", "--k", "6"]);
    ok(d, &["analyze", "--graph", "graph.json", "--cs", "1.5", "--k", "6", "--nash", "--budget", "512"]);
    let report = json(d.join("report.json"));
    assert_eq!(report["format"], "netform-report/1");
    assert_eq!(report["edge_stable"], true);
    assert_eq!(report["nash_stable"], true);
    assert_eq!(report["welfare"], "72");
    assert_eq!(report["diameter"], 6);
    assert_eq!(report["bi_pairwise_stable"], Value::Null);

    let over = netform(d, &["analyze", "--graph", "graph.json", "--cs", "1.5", "--k", "6", "--nash", "--budget", "2"]);
    assert_eq!(code(&over), 1);
}

#[test]
fn analyze_kautz_2_4() {
    let dir = TempDir::new().unwrap();
    let d = dir.path();
    ok(d, &["generate", "--type", "kautz", "--d", "2", "--D", "4"]);
    ok(d, &["analyze", "--graph", "graph.json", "--cs", "0.9", "--k", "4"]);
    let report = json(d.join("report.json"));
    assert_eq!(report["edge_stable"], true);
    assert_eq!(report["symmetric"], true);
    assert_eq!(report["n"], 24);
}

#[test]
fn analyze_directed_three_cycle_clustering() {
    let dir = TempDir::new().unwrap();
    let d = dir.path();
    ok(d, &["generate", "--type", "cycle", "--n", "3"]);
    ok(
        d,
        &[
            "analyze",
            "--graph",
            "graph.json",
            "--cs",
            "1",
            "--k",
            "inf",
            "--clustering-dim",
            "1",
            "--clustering-csv",
            "cl.csv",
        ],
    );
    assert_eq!(json(d.join("report.json"))["clustering_global"], serde_json::json!(["0"]));
    let table = rows(d.join("cl.csv"));
    assert_eq!(table.len(), 4);
    assert_eq!(table[0], ["global", "", "1", "0", "0"]);
}

#[test]
fn analyze_bidirected_reports_pairwise_stability() {
    let dir = TempDir::new().unwrap();
    let d = dir.path();
    ok(d, &["generate", "--type", "complete", "--n", "3", "--mode", "bidirected"]);
    ok(d, &["analyze", "--graph", "graph.json", "--cs", "1/4", "--k", "1", "--clustering-dim", "2"]);
    let report = json(d.join("report.json"));
    assert_eq!(report["bi_pairwise_stable"], true);
    assert_eq!(report["clustering_global"].as_array().unwrap().len(), 2);
}

fn census(d: &Path, args: &[&str]) -> Value {
    let mut full = vec!["census"];
    full.extend_from_slice(args);
    ok(d, &full);
    json(d.join("census.json"))
}

#[test]
fn census_poa_and_pos_on_three_vertices() {
    let dir = TempDir::new().unwrap();
    let c = census(dir.path(), &["--n", "3", "--cs", "1", "--k", "inf"]);
    assert_eq!(c["format"], "netform-census/1");
    assert_eq!(c["graphs_visited"], 64);
    assert_eq!(c["poa"], "0");
    assert_eq!(c["pos"], "1");
}

#[test]
fn census_expensive_edges_leave_only_the_empty_graph() {
    let dir = TempDir::new().unwrap();
    let c = census(dir.path(), &["--n", "4", "--cs", "4", "--k", "inf"]);
    assert_eq!(c["graphs_visited"], 4096);
    let stable = c["stable_graphs"].as_array().unwrap();
    assert_eq!(stable.len(), 1);
    assert!(stable[0]["speaking"].as_array().unwrap().is_empty());
}

#[test]
fn census_horizon_one_keeps_only_the_complete_graph() {
    let dir = TempDir::new().unwrap();
    let c = census(dir.path(), &["--n", "3", "--cs", "0.5", "--k", "1"]);
    let stable = c["stable_graphs"].as_array().unwrap();
    assert_eq!(stable.len(), 1);
    assert_eq!(stable[0]["speaking"].as_array().unwrap().len(), 6);
}

#[test]
fn census_budget_is_enforced() {
    let dir = TempDir::new().unwrap();
    assert_eq!(code(&netform(dir.path(), &["census", "--n", "5", "--cs", "1", "--k", "inf"])), 1);
    assert!(!dir.path().join("census.json").exists());
}

#[test]
fn census_is_deterministic() {
    let runs: Vec<TempDir> = (0..2).map(|_| TempDir::new().unwrap()).collect();
    for dir in &runs {
        ok(dir.path(), &["census", "--n", "3", "--mode", "bidirected", "--cs", "1", "--k", "1", "--budget", "4096"]);
    }
    assert_eq!(
        fs::read(runs[0].path().join("census.json")).unwrap(),
        fs::read(runs[1].path().join("census.json")).unwrap()
    );
}

const BATCH: &str = r#"
seeds = [1, 2, 3]

[defaults]
n = 6
mode = "bidirected"
density = 0.4
c_s = "7/10"
k = 3

[[trial]]
seed = 2
variant = "vertex"

[[trial]]
seed = 4
density = 1.5
"#;

#[test]
fn batch_rows_warnings_and_aggregates() {
    let dir = TempDir::new().unwrap();
    let d = dir.path();
    fs::write(d.join("b.toml"), BATCH).unwrap();
    ok(d, &["batch", "--config", "b.toml", "--threads", "3"]);
    let table = rows(d.join("batch.csv"));
    let kind = |k: &str| table.iter().filter(|r| r[0] == k).cloned().collect::<Vec<_>>();
    let warnings = kind("warning");
    assert_eq!(warnings.len(), 1);
    assert_eq!(warnings[0][1], "3");
    let trials = kind("trial");
    assert_eq!(trials.iter().map(|r| r[1].as_str()).collect::<Vec<_>>(), ["0", "1", "2", "3", "4"]);
    assert!(trials[4][15].starts_with("error:"));
    assert!(trials[..4].iter().all(|r| r[10] == "true"));
    let metric = |name: &str| kind("aggregate").into_iter().find(|r| r[16] == name).map(|r| r[17].clone());
    assert_eq!(metric("trials").as_deref(), Some("5"));
    assert_eq!(metric("errors").as_deref(), Some("1"));
    assert_eq!(metric("convergence_fraction").as_deref(), Some("4/5"));

    // Thread count does not change the results.
    ok(d, &["batch", "--config", "b.toml", "--threads", "1", "-o", "serial.csv"]);
    assert_eq!(table, rows(d.join("serial.csv")));
}

#[test]
fn batch_trial_is_reproducible_standalone() {
    let dir = TempDir::new().unwrap();
    let d = dir.path();
    fs::write(d.join("b.toml"), BATCH).unwrap();
    ok(d, &["batch", "--config", "b.toml"]);
    let row = rows(d.join("batch.csv")).into_iter().find(|r| r[0] == "trial" && r[1] == "1").unwrap();

    ok(d, &["generate", "--type", "random", "--n", "6", "--p", "0.4", "--mode", "bidirected", "--seed", "2"]);
    ok(d, &["dynamics", "--graph", "graph.json", "--cs", "7/10", "--k", "3", "--seed", "2"]);
    let fin = json(d.join("final.json"));
    assert_eq!(fin["provenance"]["result"]["rounds_used"].to_string(), row[11]);
    assert_eq!(fin["provenance"]["result"]["mutations"].to_string(), row[12]);
}

#[test]
fn batch_edge_cases() {
    let dir = TempDir::new().unwrap();
    let d = dir.path();
    fs::write(d.join("empty.toml"), "").unwrap();
    ok(d, &["batch", "--config", "empty.toml"]);
    assert!(rows(d.join("batch.csv")).iter().all(|r| r[0] == "aggregate"));

    fs::write(d.join("noseed.toml"), "[[trial]]\nn = 4\nmode = \"directed\"\nc_s = 1\nk = \"inf\"\n").unwrap();
    assert_eq!(code(&netform(d, &["batch", "--config", "noseed.toml"])), 1);
    fs::write(
        d.join("typo.toml"),
        "[[trial]]\nseed = 1\nn = 4\nmode = \"directed\"\nc_s = 1\nk = \"inf\"\ncolour = 2\n",
    )
    .unwrap();
    assert_eq!(code(&netform(d, &["batch", "--config", "typo.toml"])), 1);
}

#[test]
fn converge_path_emits_moves_and_stable_graph() {
    let dir = TempDir::new().unwrap();
    let d = dir.path();
    ok(d, &["generate", "--type", "random", "--n", "7", "--p", "0.3", "--seed", "4"]);
    ok(d, &["converge-path", "--graph", "graph.json", "--cs", "3/2"]);
    for (i, row) in rows(d.join("moves.csv")).iter().enumerate() {
        assert_eq!(row[0], (i + 1).to_string());
        assert!(["1", "5", "6", "7", "8"].contains(&row[1].as_str()));
    }
    ok(d, &["analyze", "--graph", "final.json", "--cs", "3/2", "--k", "inf"]);
    assert_eq!(json(d.join("report.json"))["edge_stable"], true);

    ok(d, &["generate", "--type", "cycle", "--n", "4", "--mode", "bidirected", "-o", "bi.json"]);
    assert_eq!(code(&netform(d, &["converge-path", "--graph", "bi.json", "--cs", "1"])), 1);
}
