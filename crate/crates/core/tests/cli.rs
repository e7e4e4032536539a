//! End-to-end runs of the `ttlab` binary: file formats, subcommand wiring,
//! report schema, and config-file/flag precedence.

use std::path::PathBuf;
use std::process::{Command, Output};

fn ttlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ttlab"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn scratch(name: &str) -> PathBuf {
    let mut dir = std::env::temp_dir();
    dir.push(format!("ttlab-test-{}-{name}", std::process::id()));
    dir
}

fn assert_ok(out: &Output, what: &str) -> String {
    assert!(
        out.status.success(),
        "{what} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn table_corrupt_recover_pipeline() {
    let table = scratch("clique3.stb");
    let mask = scratch("clique3.smk");
    let out = ttlab(&[
        "table", "build", "--problem", "clique", "--n", "3", "--out",
        table.to_str().unwrap(),
    ]);
    let stdout = assert_ok(&out, "table build");
    assert!(stdout.contains("24 entries"), "{stdout}");

    let out = ttlab(&[
        "table", "corrupt", "--problem", "clique", "--n", "3", "--table",
        table.to_str().unwrap(), "--delta", "1/4", "--seed", "7", "--out",
        mask.to_str().unwrap(),
    ]);
    let stdout = assert_ok(&out, "table corrupt");
    assert!(stdout.contains("mask selects 6 of 24"), "{stdout}");

    let out = ttlab(&[
        "recover", "one", "--problem", "clique", "--n", "3", "--table",
        table.to_str().unwrap(), "--mask", mask.to_str().unwrap(),
        "--instance", "5", "--epsilon", "1/4", "--sample-size", "3",
    ]);
    let stdout = assert_ok(&out, "recover one");
    assert!(stdout.contains("value"), "{stdout}");
    assert!(stdout.contains("branch"), "{stdout}");

    std::fs::remove_file(&table).ok();
    std::fs::remove_file(&mask).ok();
}

#[test]
fn experiment_report_schema_and_flag_precedence() {
    let config = scratch("exp.conf");
    let report = scratch("exp.json");
    std::fs::write(
        &config,
        "# pipeline smoke config\n\
         problem = clique\n\
         n = 4\n\
         delta = 1/4\n\
         epsilon = 1/4\n\
         sample_size = 6\n\
         trials = 1\n\
         seed = 11\n",
    )
    .unwrap();
    let out = ttlab(&[
        "experiment", "run", "--config", config.to_str().unwrap(),
        "--trials", "2", // flag overrides the file
        "--report", report.to_str().unwrap(), "--format", "json",
    ]);
    assert_ok(&out, "experiment run");

    let text = std::fs::read_to_string(&report).unwrap();
    let doc: serde_json::Value = serde_json::from_str(&text).unwrap();
    for key in ["config", "trials", "aggregate"] {
        assert!(doc.get(key).is_some(), "missing top-level `{key}`");
    }
    let trials = doc["trials"].as_array().unwrap();
    assert_eq!(trials.len(), 2, "flag must override the config file");
    for row in trials {
        for key in [
            "seed", "corrupted", "total", "symmetric", "query_branch", "correct",
            "majority_undefined", "queries", "ms",
        ] {
            assert!(row.get(key).is_some(), "missing trial key `{key}`");
        }
        assert_eq!(row["total"].as_u64().unwrap(), 256);
        assert_eq!(
            row["symmetric"].as_u64().unwrap() + row["query_branch"].as_u64().unwrap(),
            row["total"].as_u64().unwrap()
        );
    }
    for key in [
        "instance_success_rate",
        "trial_all_correct_rate",
        "theoretical_bound",
    ] {
        assert!(doc["aggregate"].get(key).is_some(), "missing aggregate `{key}`");
    }

    // The same config again: identical trial rows modulo wall time.
    let report2 = scratch("exp2.json");
    let out = ttlab(&[
        "experiment", "run", "--config", config.to_str().unwrap(),
        "--trials", "2",
        "--report", report2.to_str().unwrap(), "--format", "json",
    ]);
    assert_ok(&out, "experiment rerun");
    let doc2: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&report2).unwrap()).unwrap();
    let strip_ms = |mut v: serde_json::Value| {
        for row in v["trials"].as_array_mut().unwrap() {
            row["ms"] = 0.into();
        }
        v["config"]["report_path"] = serde_json::Value::Null;
        v
    };
    assert_eq!(strip_ms(doc), strip_ms(doc2));

    std::fs::remove_file(&config).ok();
    std::fs::remove_file(&report).ok();
    std::fs::remove_file(&report2).ok();
}

#[test]
fn experiment_rejects_bad_config() {
    let config = scratch("bad.conf");
    std::fs::write(&config, "problem = clique\nn = 4\nbogus = 1\n").unwrap();
    let out = ttlab(&["experiment", "run", "--config", config.to_str().unwrap()]);
    assert!(!out.status.success());
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("line 3"), "{stderr}");

    std::fs::write(&config, "problem = clique\nn = 4\ndelta = 0.6\n").unwrap();
    let out = ttlab(&["experiment", "run", "--config", config.to_str().unwrap()]);
    assert!(!out.status.success());
    std::fs::remove_file(&config).ok();
}

#[test]
fn classify_and_aut_order_on_graph_files() {
    let graph = scratch("k6.graph");
    // K_6 in edge-list form.
    let mut text = String::from("6\n");
    for i in 1..=6 {
        for j in i + 1..=6 {
            text.push_str(&format!("{i} {j}\n"));
        }
    }
    std::fs::write(&graph, &text).unwrap();
    let stdout = assert_ok(
        &ttlab(&["classify", "--graph", graph.to_str().unwrap(), "--k", "3"]),
        "classify",
    );
    assert!(stdout.contains("Complete"), "{stdout}");
    assert!(stdout.contains("720"), "{stdout}");
    assert!(stdout.contains("20"), "{stdout}");

    let stdout = assert_ok(
        &ttlab(&["aut", "order", "--graph", graph.to_str().unwrap()]),
        "aut order",
    );
    assert!(stdout.contains("720"), "{stdout}");

    // Path 1-2-3-4 via hex form: edges {1,2},{2,3},{3,4} = bits 0,3,5.
    std::fs::write(&graph, "4\n0x29\n").unwrap();
    let stdout = assert_ok(
        &ttlab(&["aut", "order", "--graph", graph.to_str().unwrap()]),
        "aut order on path",
    );
    assert!(stdout.contains("order: 2"), "{stdout}");
    std::fs::remove_file(&graph).ok();
}

#[test]
fn ov_and_parity_runs_emit_reports() {
    let report = scratch("ov.csv");
    let out = ttlab(&[
        "ov", "run", "--n", "4", "--d", "2", "--delta", "0.2", "--epsilon", "1/4",
        "--samples", "21", "--seed", "5", "--trials", "1",
        "--report", report.to_str().unwrap(), "--format", "csv",
    ]);
    assert_ok(&out, "ov run");
    let csv = std::fs::read_to_string(&report).unwrap();
    assert!(csv.starts_with(
        "seed,corrupted,total,symmetric,query_branch,correct,majority_undefined,queries,ms"
    ));
    assert_eq!(csv.lines().count(), 2);
    std::fs::remove_file(&report).ok();

    let out = ttlab(&[
        "parity", "run", "--n", "5", "--k", "3", "--delta", "0.2",
        "--samples", "21", "--seed", "5", "--trials", "1",
    ]);
    let stdout = assert_ok(&out, "parity run");
    assert!(stdout.contains("success rate"), "{stdout}");
}
