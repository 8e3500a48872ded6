use std::process::{Command, Output};

use serde_json::Value;

fn aqfactor(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_aqfactor")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("json on stdout")
}

#[test]
fn exit_codes() {
    assert_eq!(aqfactor(&["compile", "144"]).status.code(), Some(1));
    assert_eq!(aqfactor(&["compile", "143", "--widths", "2", "2"]).status.code(), Some(1));
    assert_eq!(aqfactor(&["factor", "143", "--T", "-1"]).status.code(), Some(1));
    assert_eq!(aqfactor(&["simulate"]).status.code(), Some(1));
    assert_eq!(aqfactor(&["--help"]).status.code(), Some(0));

    let infeasible = aqfactor(&["compile", "25", "--widths", "2", "3"]);
    assert_eq!(infeasible.status.code(), Some(2));
    assert_eq!(json(&infeasible)["error"], "infeasible");

    let prime = aqfactor(&["factor", "13"]);
    assert_eq!(prime.status.code(), Some(2));
    assert_eq!(json(&prime)["error"], "not_factorable");
}

#[test]
fn compiled_system_round_trips_through_simulate() {
    let dir = std::env::temp_dir().join(format!("aqfactor-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("143.json");
    let path = path.to_str().unwrap();

    let compiled = aqfactor(&["compile", "143", "--widths", "4", "4", "--out", path]);
    assert!(compiled.status.success());
    assert!(compiled.stdout.is_empty());

    let from_file = aqfactor(&["simulate", "--system", path]);
    let fused = aqfactor(&["simulate", "143", "--widths", "4", "4"]);
    assert!(from_file.status.success() && fused.status.success());
    let (a, b) = (json(&from_file), json(&fused));
    assert_eq!(a["final_populations"], b["final_populations"]);
    assert_eq!(a["manifold"], serde_json::json!([6, 9]));
    assert_eq!(a["decodings"], b["decodings"]);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn spectrum_csv_starts_at_the_mixer_ground_energy() {
    let out = aqfactor(&["spectrum", "143", "--widths", "4", "4", "--points", "11"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("s,E0,E1,E2"));
    assert!(lines.next().unwrap().starts_with("0,-2.4,"));
    assert_eq!(text.lines().count(), 12);
}

#[test]
fn trace_csv_has_one_row_per_state_per_checkpoint() {
    let out = aqfactor(&["simulate", "143", "--widths", "4", "4", "--format", "csv", "--checkpoints", "0,20"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().next(), Some("step,s,index,population"));
    assert_eq!(text.lines().count(), 1 + 2 * 16);
    assert!(text.lines().nth(1).unwrap().starts_with("0,0,0,0.0625"));
}

#[test]
fn sweep_keeps_input_order() {
    let out = aqfactor(&["sweep", "143", "--axis", "T", "--values", "20,1e-9"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let rows: Vec<&str> = text.lines().skip(1).collect();
    assert!(rows[0].starts_with("20,0.98875"));
    assert!(rows[1].starts_with("1e-9,0.125"));
}

#[test]
fn factor_reports_preprocessed_instances() {
    let out = aqfactor(&["factor", "9"]);
    assert!(out.status.success());
    let doc = json(&out);
    assert_eq!((doc["p"].as_u64(), doc["q"].as_u64()), (Some(3), Some(3)));
    assert_eq!(doc["mode"], "preprocessed");
}
