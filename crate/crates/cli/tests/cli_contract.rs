use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;
use stdsub_cli::anchors::{self, ANCHORS};
use stdsub_cli::scenario::{Mode, Scenario};
use stdsub_cli::{run_scenario, run_suite, CliError};

fn stdsub(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_stdsub")).args(args).output().expect("binary runs")
}

fn scratch_file(name: &str, contents: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("stdsub-cli-contract-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, contents).unwrap();
    path
}

fn report_of(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is a JSON report")
}

#[test]
fn malformed_scenario_exits_with_usage_code() {
    let path = scratch_file("malformed.json", "{\"mode\": \"lattice\", \"seed\": ");
    let out = stdsub(&["--scenario", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 1"), "parse error carries a position: {err}");
}

#[test]
fn unknown_scenario_field_is_named_in_the_error() {
    let path = scratch_file("unknown.json", r#"{"mode": "lattice", "lattice": {"d_max": 3, "casess": 5}}"#);
    let out = stdsub(&["--scenario", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("casess"));

    match Scenario::parse(r#"{"mode": "fock", "fock": {"cutof": 8}}"#) {
        Err(CliError::Parse { line, column, message }) => {
            assert_eq!(line, 1);
            assert!(column > 0);
            assert!(message.contains("cutof"));
        }
        other => panic!("expected a parse error, got {other:?}"),
    }
}

#[test]
fn subcommand_must_agree_with_scenario_mode() {
    let path = scratch_file("mode.json", r#"{"mode": "classify"}"#);
    let out = stdsub(&["--scenario", path.to_str().unwrap(), "lattice"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn missing_subcommand_and_scenario_is_a_usage_error() {
    assert_eq!(stdsub(&[]).status.code(), Some(2));
    assert_eq!(stdsub(&["lattice", "--cases", "many"]).status.code(), Some(2));
}

#[test]
fn unit_skeleton_passes_from_the_command_line() {
    let out = stdsub(&["skeleton", "--dims", "1,1,1,1"]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let report = report_of(&out);
    let checks = report["checks"].as_array().unwrap();
    let even = checks.iter().find(|c| c["name"] == "skeleton.even-radical-trivial").expect("even check");
    assert_eq!(even["verdict"], "pass");
    assert_eq!(report["summary"]["failed"], 0);
}

#[test]
fn zero_tolerance_fails_rounded_checks() {
    let out = stdsub(&["lattice", "--cases", "5", "--tol", "0"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn infeasible_model_gives_failure_exit_code() {
    let out = stdsub(&["seqmodel", "--angles", r#"{"kind":"constant","theta":0.7}"#]);
    assert_eq!(out.status.code(), Some(1), "stderr: {}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn timing_is_opt_in_and_output_file_is_written() {
    let path = std::env::temp_dir().join(format!("stdsub-timing-{}.json", std::process::id()));
    let out = stdsub(&["classify", "--timing", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let timed: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert!(timed["wall_time_seconds"].as_f64().is_some());

    let plain = report_of(&stdsub(&["classify"]));
    assert!(plain.get("wall_time_seconds").is_none());
    std::fs::remove_file(path).ok();
}

#[test]
fn lattice_scenario_in_four_dimensions_passes() {
    let mut s = Scenario::new(Mode::Lattice, 1);
    s.lattice.d_max = 4;
    s.lattice.cases = 200;
    let report = run_scenario(&s).unwrap();
    assert!(report.all_passed(), "{}", report.summary_table());
    assert!(report.checks.iter().all(|c| c.name.starts_with("lattice.")));
}

#[test]
fn same_scenario_gives_identical_bytes() {
    let mut s = Scenario::new(Mode::Modular, 11);
    s.modular.cases = 10;
    s.modular.direct_sums = 3;
    assert_eq!(run_scenario(&s).unwrap().to_json(), run_scenario(&s).unwrap().to_json());
}

#[test]
fn tolerance_override_keeps_residuals_and_loosens_verdicts() {
    let strict = run_suite(42, None).unwrap();
    let loose = run_suite(42, Some(1e-3)).unwrap();
    assert_eq!(strict.checks.len(), loose.checks.len());
    for (a, b) in strict.checks.iter().zip(&loose.checks) {
        assert_eq!(a.name, b.name);
        assert_eq!(a.residual.to_bits(), b.residual.to_bits(), "{} residual moved", a.name);
        assert_eq!(b.tolerance, 1e-3);
        assert_eq!(b.passed(), b.residual <= 1e-3);
        if a.passed() && a.tolerance <= 1e-3 {
            assert!(b.passed(), "{} passed strictly but fails loosely", a.name);
        }
    }
}

#[test]
fn every_check_carries_a_documented_anchor() {
    let doc = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/../../docs/anchors.md"))
        .expect("docs/anchors.md exists");
    for (key, _) in ANCHORS {
        assert!(doc.contains(&format!("`{key}`")), "anchor {key} missing from docs/anchors.md");
    }
    let report = run_suite(3, None).unwrap();
    for c in &report.checks {
        assert!(anchors::is_known(&c.anchor), "{} has unknown anchor {}", c.name, c.anchor);
    }
    for o in &report.out_of_scope {
        assert!(anchors::is_known(&o.anchor), "unknown out-of-scope anchor {}", o.anchor);
    }
    assert_eq!(report.out_of_scope.len(), 4);
}
