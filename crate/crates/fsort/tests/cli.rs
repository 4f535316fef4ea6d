//! End-to-end tests of the `fsort` binary: file formats, exit codes,
//! reproducibility.

use std::process::{Command, Output};

use fsort::reference::RunReport;

fn fsort(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fsort"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_of(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn gen_writes_a_valid_graph_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("g.fsort");
    let out = fsort(&[
        "gen", "--n", "100", "--q", "300", "--seed", "7", "-o",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("fsort 100 300\n"));
    assert_eq!(text.lines().count(), 301);
}

#[test]
fn gen_gnp_to_stdout() {
    let out = fsort(&["gen", "--n", "12", "--p", "0.5", "--seed", "7"]);
    assert!(out.status.success());
    assert!(stdout_of(&out).starts_with("fsort 12 "));
}

#[test]
fn gen_rejects_excess_q() {
    let out = fsort(&["gen", "--n", "10", "--q", "99"]);
    assert!(!out.status.success());
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn gen_needs_exactly_one_of_q_p() {
    let out = fsort(&["gen", "--n", "10"]);
    assert_eq!(out.status.code(), Some(1));
    let out = fsort(&["gen", "--n", "10", "--q", "3", "--p", "0.5"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn sort_reports_a_correct_run() {
    let dir = tempfile::tempdir().unwrap();
    let graph = dir.path().join("g.fsort");
    let order = dir.path().join("o.perm");
    assert!(fsort(&[
        "gen", "--n", "60", "--q", "120", "--seed", "3", "-o",
        graph.to_str().unwrap(), "--order-out", order.to_str().unwrap(),
    ])
    .status
    .success());

    let out = fsort(&[
        "sort", "--algo", "det", "--graph", graph.to_str().unwrap(), "--order",
        order.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let report: RunReport = serde_json::from_str(stdout_of(&out).trim()).unwrap();
    assert!(report.correct);
    assert_eq!(report.n, 60);
    assert_eq!(report.q, 120);
    assert!(report.probes > 0);
}

#[test]
fn sort_seeded_runs_are_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let graph = dir.path().join("g.fsort");
    assert!(fsort(&[
        "gen", "--n", "80", "--q", "200", "--seed", "5", "-o",
        graph.to_str().unwrap(),
    ])
    .status
    .success());

    let run = || {
        let out = fsort(&[
            "sort", "--algo", "rand", "--graph", graph.to_str().unwrap(),
            "--order-seed", "3", "--seed", "9",
        ]);
        assert!(out.status.success());
        let report: RunReport = serde_json::from_str(stdout_of(&out).trim()).unwrap();
        report.probes
    };
    assert_eq!(run(), run());
}

#[test]
fn sort_missing_graph_fails() {
    let out = fsort(&[
        "sort", "--algo", "det", "--graph", "missing.fsort", "--order-seed", "0",
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(!String::from_utf8_lossy(&out.stderr).is_empty());
}

#[test]
fn sort_emits_traces_and_poset_dump() {
    let dir = tempfile::tempdir().unwrap();
    let graph = dir.path().join("g.fsort");
    let dump = dir.path().join("poset.json");
    assert!(fsort(&[
        "gen", "--n", "120", "--q", "60", "--seed", "2", "-o",
        graph.to_str().unwrap(),
    ])
    .status
    .success());

    let out = fsort(&[
        "sort", "--algo", "det", "--graph", graph.to_str().unwrap(),
        "--order-seed", "1", "--trace", "--dump-poset", dump.to_str().unwrap(),
        "--covers",
    ]);
    assert!(out.status.success());
    let traces = String::from_utf8_lossy(&out.stderr);
    assert!(traces.lines().count() >= 1);
    let first: serde_json::Value = serde_json::from_str(traces.lines().next().unwrap()).unwrap();
    assert!(first.get("n_p").is_some());

    let dumped: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&dump).unwrap()).unwrap();
    assert_eq!(dumped["n"], 120);
    assert!(!dumped["relations"].as_array().unwrap().is_empty());
}

#[test]
fn bench_emits_the_fixed_csv_schema() {
    let out = fsort(&[
        "bench", "--algo", "det", "--grid", "n=32,64", "q=0,n,4n", "--seeds", "2",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = stdout_of(&out);
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "algo,n,q,seed,probes,bound,ratio,correct,ms"
    );
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 2 * 3 * 2);
    for row in rows {
        let fields: Vec<&str> = row.split(',').collect();
        assert_eq!(fields.len(), 9);
        assert_eq!(fields[0], "det");
        assert_eq!(fields[7], "true");
    }
}

#[test]
fn bench_randgraph_uses_p_axis() {
    let out = fsort(&[
        "bench", "--algo", "randgraph", "--grid", "n=48", "p=0.2,0.9", "--seeds",
        "3", "--emit", "json",
    ]);
    assert!(out.status.success());
    let reports: Vec<RunReport> = serde_json::from_str(stdout_of(&out).trim()).unwrap();
    assert_eq!(reports.len(), 6);
    assert!(reports.iter().all(|r| r.correct));

    // q axis for randgraph is a usage error, as is a missing p axis.
    let out = fsort(&["bench", "--algo", "randgraph", "--grid", "n=16", "q=0"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn bench_unknown_algo_is_usage_error() {
    let out = fsort(&["bench", "--algo", "quick", "--grid", "n=16", "q=0"]);
    assert_eq!(out.status.code(), Some(1));
}
