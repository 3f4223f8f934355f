use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn data(rel: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data").join(rel).display().to_string()
}

fn medsolve(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_medsolve")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    assert!(out.status.success() || out.status.code() == Some(4), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn f(v: &Value) -> f64 {
    v.as_f64().expect("number")
}

#[test]
fn think_tank_cheap_talk_closed_form() {
    let out = medsolve(&["solve", "--game", &data("games/thinktank.json"), "--protocol", "ct-max", "--prior", "0.2,0.4,0.4"]);
    let r = json(&out);
    assert_eq!(f(&r["value"]), 2.0);
    assert_eq!(r["protocol"], "CT_MAX");
}

#[test]
fn rotated_s_persuasion_value() {
    let g = data("games/rotated_s.json");
    let r = json(&medsolve(&["solve", "--game", &g, "--protocol", "bp", "--prior", "0.3", "--grid", "800"]));
    assert!((f(&r["value"]) - 4.8 / 409.0).abs() < 1e-4);
}

#[test]
fn no_disclosure_is_one_atom() {
    let r = json(&medsolve(&["solve", "--game", &data("games/rotated_s.json"), "--protocol", "nd"]));
    assert_eq!(r["plan"]["atoms"].as_array().unwrap().len(), 1);
    assert_eq!(r["value"], r["plan"]["atoms"][0]["selection"]);
}

#[test]
fn exact_outcome_program_agrees_with_float() {
    let g = data("games/thinktank.json");
    let float = json(&medsolve(&["solve", "--game", &g, "--protocol", "md"]));
    let exact = json(&medsolve(&["solve", "--game", &g, "--protocol", "md", "--exact-lp"]));
    assert!((f(&float["value"]) - f(&exact["value"])).abs() < 1e-9);
    assert_eq!(float["method"], "OutcomeLp");
}

#[test]
fn output_is_byte_deterministic() {
    let g = data("games/thinktank.json");
    let args = ["solve", "--game", &g, "--protocol", "bp", "--prior", "0.3,0.3,0.4"];
    assert_eq!(medsolve(&args).stdout, medsolve(&args).stdout);
}

#[test]
fn malformed_input_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{ not json").unwrap();
    let bad = bad.display().to_string();
    assert_eq!(medsolve(&["solve", "--game", &bad, "--protocol", "bp"]).status.code(), Some(2));
    let g = data("games/thinktank.json");
    assert_eq!(medsolve(&["solve", "--game", &g, "--protocol", "bp", "--prior", "0.5,0.5"]).status.code(), Some(2));
    assert_eq!(medsolve(&["solve", "--game", &g, "--protocol", "bp", "--prior", "a,b,c"]).status.code(), Some(2));
    assert_eq!(medsolve(&["solve", "--game", "/no/such/file", "--protocol", "bp"]).status.code(), Some(2));
    assert_eq!(medsolve(&["fixtures", "--name", "nope"]).status.code(), Some(2));
    let rs = data("games/rotated_s.json");
    assert_eq!(medsolve(&["solve", "--game", &rs, "--protocol", "md", "--method", "outcome"]).status.code(), Some(2));
}

#[test]
fn think_tank_diagnoses() {
    let g = data("games/thinktank.json");
    let green = json(&medsolve(&["diagnose", "--game", &g, "--prior", "0.5,0.25,0.25"]));
    assert_eq!(green["improvable"], true);
    assert_eq!(green["trichotomy"], "BP_GT_MD_GT_CT");
    assert!(green["binary_crossing"].is_null() && green["mean_class"].is_null());
    let blue = json(&medsolve(&["diagnose", "--game", &g, "--prior", "0.2,0.4,0.4"]));
    assert_eq!(blue["improvable"], false);
    assert_eq!(blue["trichotomy"], "BP_GT_MD_EQ_CT");
}

#[test]
fn monotone_binary_game_has_no_mediation_gain() {
    let r = json(&medsolve(&["diagnose", "--game", &data("games/binary_monotone.json"), "--prior", "0.4"]));
    assert_eq!(r["binary_crossing"]["single_crossing"], true);
    assert!((f(&r["values"]["md"]) - f(&r["values"]["ct_max"])).abs() < 1e-6);
}

#[test]
fn sine_diagnosis_reports_mean_class() {
    let r = json(&medsolve(&["diagnose", "--game", &data("games/sine.json"), "--prior", "0.2"]));
    assert_eq!(r["mean_class"]["class"], "IMPROVABLE");
    assert_eq!(r["full_disclosure"]["optimal"], false);
}

fn read_csv(path: &std::path::Path) -> (Vec<String>, Vec<Vec<String>>) {
    let mut reader = csv::Reader::from_path(path).unwrap();
    let header = reader.headers().unwrap().iter().map(String::from).collect();
    let rows = reader.records().map(|r| r.unwrap().iter().map(String::from).collect()).collect();
    (header, rows)
}

#[test]
fn rotated_s_sweep_orders_the_protocols() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("rs.csv");
    let g = data("games/rotated_s.json");
    let status =
        medsolve(&["sweep", "--game", &g, "--protocols", "bp,md,ct-max", "--prior-grid", "100", "--out", out.to_str().unwrap()]);
    assert!(status.status.success());
    let (header, rows) = read_csv(&out);
    assert_eq!(header, ["p0", "p1", "bp", "md", "ct-max", "trichotomy"]);
    assert_eq!(rows.len(), 99);
    for row in &rows {
        let v: Vec<f64> = row[..5].iter().map(|s| s.parse().unwrap()).collect();
        assert!(v[2] >= v[3] - 1e-7 && v[3] >= v[4] - 1e-7);
        if v[1] < 0.55 {
            assert!(v[4].abs() < 1e-6);
            assert_eq!(row[5], "BP_GT_MD_GT_CT");
        }
    }
}

#[test]
fn think_tank_sweep_matches_the_region_map() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.csv"), dir.path().join("b.csv"));
    let g = data("games/thinktank.json");
    for (out, jobs) in [(&a, "1"), (&b, "4")] {
        let r = medsolve(&["sweep", "--game", &g, "--prior-grid", "40", "--out", out.to_str().unwrap(), "--jobs", jobs]);
        assert!(r.status.success());
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    let (_, rows) = read_csv(&a);
    let cell = 1.0 / 40.0 + 1e-12;
    for row in rows {
        let p: Vec<f64> = row[..3].iter().map(|s| s.parse().unwrap()).collect();
        if (p[2] - 2.0 / 3.0).abs() <= cell || (p[0] - 1.0 / 3.0).abs() <= cell {
            continue;
        }
        let expected = if p[2] >= 2.0 / 3.0 {
            "ALL_EQUAL"
        } else if p[0] > 1.0 / 3.0 {
            "BP_GT_MD_GT_CT"
        } else {
            "BP_GT_MD_EQ_CT"
        };
        assert_eq!(row[6], expected, "{p:?}");
    }
}

#[test]
fn one_state_sweep_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("x.csv");
    let r = medsolve(&["sweep", "--game", &data("games/one_state.json"), "--prior-grid", "4", "--out", out.to_str().unwrap()]);
    assert_eq!(r.status.code(), Some(2));
}

#[test]
fn constructed_plan_checks_as_mediation_only() {
    let r = json(&medsolve(&[
        "check",
        "--game",
        &data("games/rotated_s.json"),
        "--plan",
        &data("plans/rotated_s_mediation.json"),
    ]));
    assert_eq!(r["verdict"]["md"], true);
    assert_eq!(r["verdict"]["ct"], false);
}

#[test]
fn solved_plans_round_trip_through_check() {
    let dir = tempfile::tempdir().unwrap();
    let g = data("games/thinktank.json");
    let report = json(&medsolve(&["solve", "--game", &g, "--protocol", "md", "--prior", "0.5,0.25,0.25"]));
    let plan = dir.path().join("plan.json");
    std::fs::write(&plan, serde_json::to_string(&report["plan"]).unwrap()).unwrap();
    let r = json(&medsolve(&["check", "--game", &g, "--plan", plan.to_str().unwrap(), "--prior", "0.5,0.25,0.25"]));
    assert_eq!(r["verdict"]["md"], true);
}

#[test]
fn improve_exit_codes() {
    let r = medsolve(&["improve", "--game", &data("games/rotated_s.json"), "--prior", "0.3"]);
    assert_eq!(r.status.code(), Some(0));
    assert!(f(&json(&r)["value_gain"]) > 0.0);
    let r = medsolve(&["improve", "--game", &data("games/thinktank.json"), "--prior", "0.2,0.4,0.4"]);
    assert_eq!(r.status.code(), Some(4));
    assert_eq!(json(&r)["improvable"], false);
}

#[test]
fn fixtures_pass() {
    let r = medsolve(&["fixtures"]);
    assert_eq!(r.status.code(), Some(0), "{}", String::from_utf8_lossy(&r.stdout));
    let reports = json(&r);
    assert!(reports.as_array().unwrap().iter().all(|x| x["passed"] == true));
}
