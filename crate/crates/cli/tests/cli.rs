//! End-to-end tests against the built binary: output documents, exit
//! codes, stream separation, and re-run stability.

use std::process::{Command, Output};

fn qfi(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qfi"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_json(args: &[&str]) -> serde_json::Value {
    let out = qfi(args);
    assert!(
        out.status.success(),
        "command {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("stdout is a JSON document")
}

#[test]
fn field_info_emits_named_invariants() {
    let doc = stdout_json(&["field-info", "ratfn(laurent(finite(7)))"]);
    assert_eq!(doc["m"], 8);
    assert_eq!(doc["u"], 8);
    assert_eq!(doc["au"], serde_json::json!([8]));
    assert_eq!(doc["n"], 1);
    // ratfn over a mixed tower is not ms-us-computable, so the key is absent
    assert!(doc.get("ms_us").is_none());
    assert!(doc.get("layer").is_none());
}

#[test]
fn field_info_reports_layer_for_semi_global() {
    let doc = stdout_json(&[
        "field-info",
        "semiglobal(laurent(laurent(finite(3))); {tree:true,components:[{tree:false,components:[leaf,leaf]}]})",
    ]);
    assert_eq!(doc["au"], serde_json::json!([4, 10, 16]));
    assert_eq!(doc["layer"], 2);
    assert_eq!(doc["fully_arboreal"], false);
    assert_eq!(doc["m"], 4);
    assert_eq!(doc["u"], 16);

    let doc = stdout_json(&[
        "field-info",
        "semiglobal(laurent(finite(5)); {tree:true,components:[ratleaf]})",
    ]);
    assert_eq!(doc["layer"], "inf");
    assert_eq!(doc["fully_arboreal"], true);
}

#[test]
fn attainable_lists_the_four_finite_sets() {
    let doc = stdout_json(&["attainable", "--n", "2", "--base", "finite"]);
    assert_eq!(doc["count"], 4);
    assert_eq!(
        doc["sets"],
        serde_json::json!([[2, 4, 10, 16], [2, 16], [4, 10, 16], [16]])
    );
}

#[test]
fn form_check_universal_example() {
    let doc = stdout_json(&[
        "form-check",
        "--tower",
        "5,1",
        "--form",
        "[1,s,t1,s*t1]",
        "--check",
        "universal",
    ]);
    assert_eq!(doc["result"], true);
    assert_eq!(doc["trace_depth"], 2);

    let doc = stdout_json(&["form-check", "--tower", "5,0", "--check", "radical"]);
    assert_eq!(doc["result"], serde_json::json!(["1", "s"]));
}

#[test]
fn layer_example_round_trips_through_field_info() {
    let doc = stdout_json(&["layer-example", "--n", "3", "--j", "2", "--base", "finite"]);
    assert_eq!(doc["layer"], 2);
    assert_eq!(doc["m"], 4);
    let descriptor = doc["descriptor"].as_str().unwrap();
    let info = stdout_json(&["field-info", descriptor]);
    assert_eq!(info["m"], 4);
    assert_eq!(info["layer"], 2);
}

#[test]
fn export_graph_prints_dot() {
    let out = qfi(&[
        "export-graph",
        "semiglobal(laurent(finite(3)); {graph:{v:4,e:[(0,2),(1,2),(0,3),(1,3)]},components:[leaf,leaf]})",
    ]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("graph reduction {"));
    assert_eq!(text.lines().filter(|l| l.contains("--")).count(), 4);
}

#[test]
fn verify_emits_the_report_and_echoes_the_seed() {
    let args = [
        "verify",
        "--tower",
        "3,1",
        "--dims",
        "1..3",
        "--mode",
        "random:50:42",
    ];
    let a = qfi(&args);
    assert!(a.status.success());
    let text = String::from_utf8(a.stdout.clone()).unwrap();
    assert!(text.starts_with("validation tower=3,1 dims=1..3 mode=random:50:42"));
    assert!(text.trim_end().ends_with("contradictions=0"));
    // stable under re-runs
    let b = qfi(&args);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn documents_are_stable_under_reruns() {
    let args = ["field-info", "laurent(laurent(finite(3)))"];
    assert_eq!(qfi(&args).stdout, qfi(&args).stdout);
}

#[test]
fn exit_codes_follow_the_contract() {
    // domain error: validation failure
    let out = qfi(&["field-info", "finite(4)"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(out.stdout.is_empty(), "errors never reach stdout");
    assert!(String::from_utf8_lossy(&out.stderr).contains("not an odd prime"));

    // domain error: hypothesis gate
    let out = qfi(&[
        "field-info",
        "semiglobal(laurent(custom(r=1,hyp=false)); {tree:true,components:[leaf]})",
    ]);
    assert_eq!(out.status.code(), Some(1));

    // syntax error in the DSL
    let out = qfi(&["field-info", "laurent(finite(5)"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("column"));

    // usage error from the argument parser
    let out = qfi(&["no-such-command"]);
    assert_eq!(out.status.code(), Some(2));

    // missing form for a pointwise check
    let out = qfi(&["form-check", "--tower", "5,1", "--check", "isotropic"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn descriptor_can_come_from_a_file() {
    let path = std::env::temp_dir().join(format!("qfi-desc-{}.txt", std::process::id()));
    std::fs::write(&path, "ratfn(laurent(finite(7)))\n").unwrap();
    let doc = stdout_json(&["field-info", &format!("@{}", path.display())]);
    assert_eq!(doc["m"], 8);
    std::fs::remove_file(&path).ok();
}

#[test]
fn human_mode_prints_key_value_lines() {
    let out = qfi(&["--human", "au-enumerate", "--tower", "5,1"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().any(|l| l.starts_with("m ") && l.contains('4')));
    assert!(serde_json::from_str::<serde_json::Value>(&text).is_err());
}
