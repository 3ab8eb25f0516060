//! End-to-end command flows through the library surface of the binary.

use clap::Parser;
use tempfile::tempdir;

use collapse_cli::{run, Cli, EXIT_INFEASIBLE, EXIT_OK, EXIT_PARSE, EXIT_TIME_LIMIT};

fn data(name: &str) -> String {
    format!("{}/../../data/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn invoke(args: &[&str]) -> collapse_cli::CmdOutput {
    let mut argv = vec!["collapse"];
    argv.extend_from_slice(args);
    run(Cli::try_parse_from(argv).expect("argv parses"))
}

#[test]
fn decompose_karate_matches_table() {
    let path = data("karate.txt");
    let out = invoke(&["decompose", &path, "--k", "2"]);
    assert_eq!(out.code, EXIT_OK);
    assert!(out.stdout.starts_with("33 77\n"), "got: {}", out.stdout);
    assert!(out.stdout.contains("coreness 4: 10"));
}

#[test]
fn decompose_lesmis_matches_table() {
    let path = data("lesmis.txt");
    for (k, expected) in [(6, "38 186"), (4, "41 197"), (3, "48 215"), (2, "59 236")] {
        let out = invoke(&["decompose", &path, "--k", &k.to_string()]);
        assert_eq!(out.code, EXIT_OK);
        assert!(
            out.stdout.starts_with(&format!("{expected}\n")),
            "k={k}: got {}",
            out.stdout
        );
    }
}

#[test]
fn decompose_missing_file_exits_2() {
    let out = invoke(&["decompose", "/nonexistent/graph.txt", "--k", "2"]);
    assert_eq!(out.code, EXIT_PARSE);
}

#[test]
fn solve_methods_agree_and_report_zero_gap() {
    let path = data("karate.txt");
    let mut values = Vec::new();
    for method in ["brute", "bnb", "cutting-plane"] {
        let out = invoke(&[
            "solve", &path, "--k", "2", "--b", "1", "--method", method, "--format", "json",
        ]);
        assert_eq!(out.code, EXIT_OK, "stderr: {}", out.stderr);
        let v: serde_json::Value = serde_json::from_str(&out.stdout).unwrap();
        assert_eq!(v["gap_pct"], 0.0);
        assert_eq!(v["status"], "optimal");
        values.push(v["value"].as_u64().unwrap());
    }
    assert!(values.iter().all(|&v| v == values[0]));
    assert_eq!(values[0], 25);
}

#[test]
fn solve_csv_format() {
    let path = data("karate.txt");
    let out = invoke(&[
        "solve", &path, "--k", "2", "--b", "2", "--method", "bnb", "--format", "csv",
    ]);
    assert_eq!(out.code, EXIT_OK);
    let mut lines = out.stdout.lines();
    assert_eq!(
        lines.next().unwrap(),
        "instance,k,b,method,value,lb,gap_pct,time_s,nodes"
    );
    assert!(lines.next().unwrap().starts_with("karate,2,2,bnb,20,20,0.0000,"));
}

#[test]
fn solve_time_limit_exits_4() {
    let path = data("karate.txt");
    let out = invoke(&[
        "solve", &path, "--k", "2", "--b", "3", "--method", "bnb", "--time-limit", "0.0",
    ]);
    assert_eq!(out.code, EXIT_TIME_LIMIT);
    let v: serde_json::Value = serde_json::from_str(&out.stdout).unwrap();
    assert_eq!(v["status"], "feasible");
    let lb = v["lb"].as_u64().unwrap();
    let bound_m = v["bound_m"].as_u64().unwrap();
    assert!(lb >= bound_m);
}

#[test]
fn solve_infeasible_budget_exits_3() {
    let dir = tempdir().unwrap();
    let path = dir.path().join("tri.txt");
    std::fs::write(&path, "0 1\n1 2\n2 0\n").unwrap();
    let out = invoke(&[
        "solve",
        path.to_str().unwrap(),
        "--k",
        "2",
        "--b",
        "4",
        "--method",
        "brute",
    ]);
    assert_eq!(out.code, EXIT_INFEASIBLE);
}

#[test]
fn emit_models_round_trip_on_disk() {
    let dir = tempdir().unwrap();
    let karate = data("karate.txt");
    for model in ["td", "sparse", "dual", "detect"] {
        let out_path = dir.path().join(format!("{model}.lp"));
        let out = invoke(&[
            "emit", &karate, "--k", "2", "--b", "2", "--model", model,
            "--out", out_path.to_str().unwrap(),
        ]);
        assert_eq!(out.code, EXIT_OK, "{model}: {}", out.stderr);
        let text = std::fs::read_to_string(&out_path).unwrap();
        let ir = collapse_core::lp_format::parse_lp_text(&text).unwrap();
        let again = collapse_core::lp_format::write_lp_text(&ir).unwrap();
        assert_eq!(text, again, "{model} does not round trip");
    }
}

#[test]
fn emit_bilinear_dual_refused() {
    let dir = tempdir().unwrap();
    let karate = data("karate.txt");
    let out_path = dir.path().join("dual.lp");
    let out = invoke(&[
        "emit", &karate, "--k", "2", "--b", "2", "--model", "dual", "--no-linearize",
        "--out", out_path.to_str().unwrap(),
    ]);
    assert_eq!(out.code, EXIT_PARSE);
    assert!(out.stderr.contains("bilinear"));
}

#[test]
fn bench_rows_footer_and_budget_monotonicity() {
    let dir = tempdir().unwrap();
    std::fs::write(dir.path().join("tri.txt"), "0 1\n1 2\n2 0\n0 3\n1 3\n2 3\n").unwrap();
    std::fs::copy(data("karate.txt"), dir.path().join("karate.txt")).unwrap();
    let manifest = serde_json::json!({
        "instances": [
            {"graph_path": "tri.txt", "k": 2, "b": 1, "name": "k4"},
            {"graph_path": "karate.txt", "k": 2, "b": 1},
            {"graph_path": "karate.txt", "k": 2, "b": 2},
            {"graph_path": "karate.txt", "k": 2, "b": 3}
        ],
        "methods": ["bnb"],
        "time_limit": null
    });
    let mpath = dir.path().join("manifest.json");
    std::fs::write(&mpath, serde_json::to_string_pretty(&manifest).unwrap()).unwrap();
    let out = invoke(&["bench", mpath.to_str().unwrap()]);
    assert_eq!(out.code, EXIT_OK, "stderr: {}", out.stderr);

    let lines: Vec<&str> = out.stdout.lines().collect();
    assert_eq!(lines[0], "instance,k,b,method,value,lb,gap_pct,time_s,nodes");
    let rows: Vec<&str> = lines[1..].iter().filter(|l| !l.starts_with('#')).copied().collect();
    assert_eq!(rows.len(), 4);
    let footer = lines.iter().find(|l| l.starts_with("# summary:")).unwrap();
    // all four solved to optimality
    assert!(footer.contains("opt=4"), "footer: {footer}");

    // optimal value is nonincreasing in the budget
    let karate_values: Vec<u64> = rows
        .iter()
        .filter(|r| r.starts_with("karate"))
        .map(|r| r.split(',').nth(4).unwrap().parse().unwrap())
        .collect();
    assert_eq!(karate_values, vec![25, 20, 15]);

    // per-row failures recorded without aborting the run
    let manifest_bad = serde_json::json!({
        "instances": [
            {"graph_path": "missing.txt", "k": 2, "b": 1},
            {"graph_path": "karate.txt", "k": 2, "b": 1}
        ],
        "methods": ["bnb"]
    });
    std::fs::write(&mpath, serde_json::to_string(&manifest_bad).unwrap()).unwrap();
    let out = invoke(&["bench", mpath.to_str().unwrap()]);
    assert_eq!(out.code, EXIT_OK);
    assert!(out.stdout.contains("# error: missing"));
    assert!(out.stdout.lines().any(|l| l.starts_with("karate,")));
}
