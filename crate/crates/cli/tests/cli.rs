use std::path::PathBuf;
use std::process::{Command, Output};

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

fn causerep(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_causerep"));
    for (k, _) in std::env::vars() {
        if k.starts_with("CAUSEREP_") {
            cmd.env_remove(k);
        }
    }
    cmd.args(args).envs(env.iter().copied()).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn run_ok(args: &[&str]) -> String {
    let o = causerep(args, &[]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    stdout(&o)
}

fn json(args: &[&str]) -> serde_json::Value {
    let mut all = vec!["--format", "json"];
    all.extend_from_slice(args);
    serde_json::from_str(&run_ok(&all)).unwrap()
}

#[test]
fn repairs_of_the_running_example() {
    let f = fixture("example1.cdl");
    let out = run_ok(&["repairs", f.to_str().unwrap()]);
    assert!(out.contains("3 repairs"));
    assert!(out.contains("#1 removed {6}"));
    assert!(out.contains("#2 removed {1, 3}"));
    assert!(out.contains("#3 removed {3, 4}"));

    let v = json(&["--minimality", "cardinality", "repairs", f.to_str().unwrap()]);
    let repairs = v["repairs"].as_array().unwrap();
    assert_eq!(repairs.len(), 1);
    assert_eq!(repairs[0]["removed"], serde_json::json!([6]));
}

#[test]
fn causes_table_is_ordered_and_exact() {
    let f = fixture("example1.cdl");
    let out = run_ok(&["causes", f.to_str().unwrap()]);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], "query q holds");
    assert!(lines[2].starts_with("6 ") && lines[2].contains(" 1 ") && lines[2].ends_with("{}"));
    assert!(lines[3].starts_with("1 ") && lines[3].contains("1/2"));
    assert!(lines[4].starts_with("3 ") && lines[4].ends_with("{1} {4}"));

    let v = json(&["causes", f.to_str().unwrap()]);
    let c = &v["causes"][0];
    assert_eq!(c["id"], 6);
    assert_eq!(c["responsibility"], serde_json::json!({"num": 1, "den": 1}));
    assert_eq!(c["contingency_sets"], serde_json::json!([[]]));
}

#[test]
fn responsibility_of_one_tuple_and_the_maximum() {
    let f = fixture("example1.cdl");
    let f = f.to_str().unwrap();
    assert!(run_ok(&["responsibility", "--tid", "3", f]).contains("rho(3) = 1/2"));
    assert!(run_ok(&["responsibility", "--tid", "2", f]).contains("rho(2) = 0"));
    assert!(run_ok(&["responsibility", f]).contains("most responsible (rho = 1): 6"));
}

#[test]
fn null_semantics_reports_positions() {
    let f = fixture("example2.cdl");
    let f = f.to_str().unwrap();
    let v = json(&["--semantics", "null", "causes", f]);
    let positions: Vec<&str> = v["causes"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c["position"].as_str().unwrap())
        .collect();
    assert_eq!(positions, ["P[1;1]", "Q[3;1]", "R[4;1]"]);
    assert_eq!(v["causes"][1]["contingency_sets"], serde_json::json!([["R[4;1]"]]));
    assert_eq!(v["tuple_causes"].as_array().unwrap().len(), 3);

    let out = run_ok(&["--semantics", "null", "responsibility", "--position", "Q[3;1]", f]);
    assert!(out.contains("rho(Q[3;1]) = 1/2"));

    let f12 = fixture("example12.cdl");
    let out = run_ok(&["--semantics", "null", "repairs", f12.to_str().unwrap()]);
    assert!(out.contains("#1 delta P[8;2]"));
    assert!(out.contains("R(9;null,1)"));
}

#[test]
fn environment_variables_configure_options() {
    let f = fixture("example2.cdl");
    let o = causerep(
        &["causes", f.to_str().unwrap()],
        &[("CAUSEREP_SEMANTICS", "null"), ("CAUSEREP_FORMAT", "json")],
    );
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["semantics"], "null");
}

#[test]
fn inclusion_dependencies_as_hard_constraints() {
    let f = fixture("example_sec7.cdl");
    let f = f.to_str().unwrap();
    let v = json(&["--ics", "--query", "Q2", "--answer", "john", "causes", f]);
    let causes = v["causes"].as_array().unwrap();
    assert_eq!(causes.len(), 2);
    for c in causes {
        assert_eq!(c["responsibility"], serde_json::json!({"num": 1, "den": 3}));
    }
    let v = json(&["--query", "Q2", "--answer", "john", "causes", f]);
    assert_eq!(
        v["causes"][0]["responsibility"],
        serde_json::json!({"num": 1, "den": 2})
    );
}

#[test]
fn emit_and_check_round_trip() {
    let f = fixture("example1.cdl");
    let f = f.to_str().unwrap();
    let program = run_ok(&["emit-asp", "--flavor", "disjunctive", f]);
    let golden = std::fs::read_to_string(fixture("example3_disjunctive.dlv")).unwrap();
    assert!(causerep_core::asp::programs_equivalent(&golden, &program));

    let dir = std::env::temp_dir().join(format!("causerep-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("p.dlv");
    let out = run_ok(&[
        "emit-asp",
        "--include",
        "causes,cau-cont,contingency-sets,pre-rho",
        "-o",
        path.to_str().unwrap(),
        f,
    ]);
    assert!(out.starts_with("wrote"));
    assert!(std::fs::read_to_string(&path).unwrap().contains("#maxint = 100."));
    std::fs::remove_dir_all(&dir).unwrap();

    let models = fixture("example3_models.txt");
    let out = run_ok(&["check", "--models", models.to_str().unwrap(), f]);
    assert!(out.contains("one-to-one"));
}

#[test]
fn exit_codes() {
    let f1 = fixture("example1.cdl");
    let f1 = f1.to_str().unwrap();
    // Mismatch between solver output and repairs.
    let wrong = fixture("example5_models.txt");
    let o = causerep(&["check", "--models", wrong.to_str().unwrap(), f1], &[]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stdout(&o).contains("mismatch"));
    // Unreadable input.
    assert_eq!(causerep(&["repairs", "/nonexistent.cdl"], &[]).status.code(), Some(1));
    // Unknown flag.
    assert_eq!(causerep(&["repairs", "--bogus", f1], &[]).status.code(), Some(1));
    // Option not available for the semantics.
    let f12 = fixture("example12.cdl");
    let o = causerep(
        &[
            "--semantics",
            "null",
            "emit-asp",
            "--include",
            "pre-rho",
            f12.to_str().unwrap(),
        ],
        &[],
    );
    assert_eq!(o.status.code(), Some(1));
    // Syntax error in the problem file.
    let dir = std::env::temp_dir().join(format!("causerep-bad-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let bad = dir.join("bad.cdl");
    std::fs::write(&bad, "R(1;a.\n").unwrap();
    let o = causerep(&["repairs", bad.to_str().unwrap()], &[]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("1:"));
    std::fs::remove_dir_all(&dir).unwrap();
    // Help is not an error.
    assert_eq!(causerep(&["--help"], &[]).status.code(), Some(0));
}

#[test]
fn eval_lists_answers() {
    let f = fixture("example_sec7.cdl");
    let out = run_ok(&["eval", f.to_str().unwrap()]);
    assert!(out.contains("Q1(X): {(john), (kevin), (patrick)}"));
    assert!(out.contains("Q2(X): {(eli), (john), (kevin), (patrick)}"));
    assert!(out.contains("inclusion dependencies: satisfied"));
}
