mod common;

use std::process::Command;

use serde_json::Value;

use common::{argv, examples_dir, fixtures};

fn ctis() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_ctis"));
    cmd.env_remove("CTIS_DEPTH_BOUND");
    cmd
}

fn example(name: &str) -> String {
    examples_dir().join(name).display().to_string()
}

fn json_of(args: &[&str]) -> Value {
    let out = ctis().arg("--json").args(args).output().unwrap();
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn fixtures_exit_as_declared() {
    let all = fixtures();
    assert!(all.len() >= 20, "only {} fixtures found", all.len());
    for f in all {
        let status = ctis().args(&f.args).output().unwrap().status;
        assert_eq!(status.code(), Some(f.exit), "{}", f.path.display());
    }
}

#[test]
fn json_output_is_byte_identical_across_runs() {
    for f in fixtures() {
        let first = ctis().arg("--json").args(&f.args).output().unwrap();
        let second = ctis().arg("--json").args(&f.args).output().unwrap();
        assert_eq!(first.stdout, second.stdout, "{}", f.path.display());
        assert_eq!(first.status.code(), Some(f.exit), "{}", f.path.display());
    }
}

#[test]
fn execution_mode_does_not_change_output() {
    let run = |mode: &str| {
        ctis()
            .args([
                "--json",
                "verify-theorem",
                "--runs",
                "60",
                "--seed",
                "3",
                "--execution",
                mode,
            ])
            .output()
            .unwrap()
            .stdout
    };
    assert_eq!(run("sequential"), run("parallel"));
}

#[test]
fn json_envelope() {
    let v = json_of(&[
        "entails",
        "--program",
        &example("bird.pl"),
        "--query",
        "flies(a)",
    ]);
    assert_eq!(v["schema"], "ctis/1");
    assert_eq!(v["command"], "entails");
    assert_eq!(v["status"], "pass");
    assert_eq!(v["payload"]["entailed"], true);
    assert_eq!(v["payload"]["support"][1], "flies(a) :- bird(a).");
    assert_eq!(v["diagnostics"].as_array().unwrap().len(), 0);
}

#[test]
fn subsumption_witness_in_json() {
    let v = json_of(&[
        "check-subsume",
        "--c",
        "p(X) :- q(X).",
        "--d",
        "p(a) :- q(a), r(a).",
    ]);
    assert_eq!(v["payload"]["theta"]["X"], "a");
}

#[test]
fn theorem_payload_counts_witnesses() {
    let v = json_of(&["verify-theorem", "--runs", "50", "--seed", "7"]);
    assert_eq!(v["payload"]["passed"], 50);
    assert_eq!(v["payload"]["subsumption_witnesses"], 50);
    assert_eq!(v["payload"]["condition_failures"], 0);
    assert_eq!(v["payload"]["seed"], 7);
}

#[test]
fn derive_ct_witnesses_and_output_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("t.ct");
    let v = json_of(&[
        "derive-ct",
        "--program",
        &example("abc_program.pl"),
        "--hypothesis",
        &example("abc_hypothesis.pl"),
        "--example",
        "c",
        "--output",
        out.to_str().unwrap(),
    ]);
    assert_eq!(v["payload"]["ctis"], true);
    assert_eq!(v["payload"]["ctg"], true);
    assert_eq!(
        v["payload"]["connected_theory"],
        serde_json::json!([["c :- b."], ["b :- a."]])
    );
    let status = ctis()
        .args([
            "verify-ct",
            "--program",
            &example("abc_program.pl"),
            "--layers",
            out.to_str().unwrap(),
        ])
        .args(["--example", "c"])
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
}

#[test]
fn theory_subsumption_mode() {
    let dir = tempfile::tempdir().unwrap();
    let general = dir.path().join("s.pl");
    let specific = dir.path().join("t.pl");
    std::fs::write(&general, "p(X) :- q(X).\n").unwrap();
    std::fs::write(&specific, "p(a) :- q(a).\np(b) :- q(b).\n").unwrap();
    let v = json_of(&[
        "check-subsume",
        "--general",
        general.to_str().unwrap(),
        "--specific",
        specific.to_str().unwrap(),
    ]);
    assert_eq!(v["status"], "pass");
    assert_eq!(v["payload"]["witnesses"].as_array().unwrap().len(), 2);
    std::fs::write(&specific, "r(a).\n").unwrap();
    let v = json_of(&[
        "check-subsume",
        "--general",
        general.to_str().unwrap(),
        "--specific",
        specific.to_str().unwrap(),
    ]);
    assert_eq!(v["status"], "fail");
    assert_eq!(v["payload"]["unsubsumed"][0], "r(a).");
}

#[test]
fn hidden_oracle_flag() {
    let v = json_of(&["least-model", "--program", &example("bird.pl"), "--oracle"]);
    assert_eq!(v["payload"]["oracle_agrees"], true);
    let v = json_of(&[
        "least-model",
        "--program",
        &example("ancestors.pl"),
        "--oracle",
    ]);
    assert_eq!(v["status"], "error");
    assert!(v["diagnostics"][0].as_str().unwrap().contains("limit 16"));
}

#[test]
fn depth_bound_flag_overrides_environment() {
    let program = example("separation_entails.pl");
    let args = [
        "entails",
        "--program",
        program.as_str(),
        "--query",
        "p(f(f(a)))",
    ];
    let code = |env: Option<&str>, extra: &[&str]| {
        let mut cmd = ctis();
        if let Some(k) = env {
            cmd.env("CTIS_DEPTH_BOUND", k);
        }
        cmd.args(extra).args(args).status().unwrap().code()
    };
    assert_eq!(code(None, &[]), Some(2));
    assert_eq!(code(Some("2"), &[]), Some(0));
    assert_eq!(code(Some("1"), &[]), Some(1));
    assert_eq!(code(Some("1"), &["--depth-bound", "2"]), Some(0));
}

#[test]
fn usage_errors_exit_2() {
    for args in [
        vec!["frobnicate"],
        vec!["entails", "--program"],
        vec![
            "entails",
            "--program",
            "/nonexistent/file.pl",
            "--query",
            "p",
        ],
        vec!["entails", "--program", "/dev/null", "--query", "p(X)"],
        vec!["verify-theorem", "--runs", "0"],
    ] {
        let out = ctis().args(&args).output().unwrap();
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(!out.stderr.is_empty(), "{args:?}");
    }
    let v = json_of(&[
        "entails",
        "--program",
        "/nonexistent/file.pl",
        "--query",
        "p",
    ]);
    assert_eq!(v["status"], "error");
    assert!(v["diagnostics"][0]
        .as_str()
        .unwrap()
        .contains("/nonexistent/file.pl"));
}

#[test]
fn parse_errors_carry_file_and_location() {
    let v = json_of(&[
        "entails",
        "--program",
        &example("broken.pl"),
        "--query",
        "p(a)",
    ]);
    let msg = v["diagnostics"][0].as_str().unwrap();
    assert!(msg.ends_with("broken.pl:3:2: unclosed `(`"), "{msg}");
}

#[test]
fn arity_clash_across_files() {
    let dir = tempfile::tempdir().unwrap();
    let h = dir.path().join("h.pl");
    std::fs::write(&h, "flies(X, Y) :- bird(X).\n").unwrap();
    let out = ctis()
        .args([
            "derive-ct",
            "--program",
            &example("bird_program.pl"),
            "--hypothesis",
            h.to_str().unwrap(),
        ])
        .args(["--example", "flies(a)"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("arity"));
}

#[test]
fn help_and_version_exit_0() {
    assert_eq!(ctis().arg("--help").status().unwrap().code(), Some(0));
    assert_eq!(ctis().arg("--version").status().unwrap().code(), Some(0));
}

#[test]
fn in_process_run_matches_binary() {
    let args = ["check-subsume", "--c", "p(X).", "--d", "q(a)."];
    let r = ctis_cli::run(argv(&args));
    assert_eq!(r.exit_code(), 1);
    let out = ctis().args(args).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(String::from_utf8(out.stdout).unwrap(), r.render());
}
