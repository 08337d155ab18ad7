use std::fs;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cusp-smoother"))
        .args(args)
        .env_remove("CUSP_SMOOTHER_THREADS")
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_str(stdout(o).trim()).expect("valid JSON on stdout")
}

#[test]
fn dual_examples() {
    let o = run(&["dual", "[3,2,2,2,2]"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o), "[7]\n");
    let o = run(&["dual", "[3]"]);
    assert_eq!((code(&o), stdout(&o)), (0, "[3]\n".to_string()));
    assert_eq!(code(&run(&["dual", "[2,2]"])), 2);
}

#[test]
fn input_is_canonicalized() {
    assert_eq!(
        stdout(&run(&["dual", "[2, 3, 2]"])),
        stdout(&run(&["dual", "[3,2,2]"]))
    );
}

#[test]
fn classify_examples() {
    let o = run(&["--json", "classify", "[13]"]);
    assert_eq!(code(&o), 1);
    assert_eq!(json(&o)["smoothable"], false);

    let o = run(&["--json", "classify", "[3,2,2]", "--case", "r_lt_b2"]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert_eq!(v["deformation"]["class"], "rational");
    assert_eq!(v["deformation"]["b2"], 13);

    let o = run(&["--json", "classify", "[4,2]", "--case", "r_eq_b2"]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert_eq!(v["deformation"]["class"], "enriques");
    assert_eq!(v["deformation"]["b2"], 10);

    assert_eq!(code(&run(&["classify", "[3,2]", "--case", "r_eq_b2"])), 2);
    assert_eq!(code(&run(&["classify", "[3]", "--case", "sideways"])), 2);
}

#[test]
fn classify_certificate_flag() {
    let without = json(&run(&["--json", "classify", "[7]"]));
    assert!(without["certificate"].is_null());
    let with = json(&run(&["--json", "classify", "[7]", "--certificate"]));
    assert_eq!(
        with["certificate"]["target"],
        serde_json::json!([2, 2, 2, 2, 3])
    );
}

#[test]
fn realizable_exit_mirrors_answer() {
    let o = run(&["--json", "realizable", "[1,-5]"]);
    assert_eq!(code(&o), 0);
    assert_eq!(
        stdout(&o),
        "{\"type\":[-5,1],\"required_depth\":1,\"realizable\":true}\n"
    );
    assert_eq!(code(&run(&["realizable", "[3,2,2,2,2,2,2,2,2,2,2]"])), 1);
    assert_eq!(code(&run(&["realizable", "[1,x]"])), 2);
}

#[test]
fn certify_then_verify() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cert.json");
    let o = run(&["certify", "[1,-5]", "--out", path.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let cert: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(cert["base"], "nodal_cubic");
    assert_eq!(
        cert["moves"],
        serde_json::json!([{"kind": "node", "pos": 0}])
    );

    let o = run(&["--json", "verify", path.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    assert_eq!(json(&o)["valid"], true);

    let tampered = dir.path().join("tampered.json");
    fs::write(
        &tampered,
        r#"{"base":"nodal_cubic","moves":[{"kind":"node","pos":0}],"target":[-4,1]}"#,
    )
    .unwrap();
    let o = run(&["--json", "verify", tampered.to_str().unwrap()]);
    assert_eq!(code(&o), 1);
    let v = json(&o);
    assert_eq!(v["valid"], false);
    assert!(!v["violations"].as_array().unwrap().is_empty());

    let o = run(&["verify", tampered.to_str().unwrap()]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).starts_with("invalid"));
}

#[test]
fn certify_to_stdout_and_unrealizable() {
    let o = run(&["certify", "[-7]"]);
    assert_eq!(code(&o), 0);
    assert_eq!(
        stdout(&o),
        "{\"base\":\"nodal_cubic\",\"moves\":[],\"target\":[-7]}\n"
    );
    assert_eq!(code(&run(&["certify", "[-8]"])), 1);
}

#[test]
fn malformed_inputs_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let garbage = dir.path().join("garbage.json");
    fs::write(&garbage, "not json").unwrap();
    let unknown_base = dir.path().join("base.json");
    fs::write(
        &unknown_base,
        r#"{"base":"quartic","moves":[],"target":[-7]}"#,
    )
    .unwrap();
    let cases: Vec<Vec<&str>> = vec![
        vec!["dual", ""],
        vec!["dual", "[]"],
        vec!["dual", "[3,-1]"],
        vec!["dual", "[3,2"],
        vec!["classify", "[1]"],
        vec!["classify", "3,2,2"],
        vec!["realizable", "[]"],
        vec!["verify", "/nonexistent/cert.json"],
        vec!["verify", garbage.to_str().unwrap()],
        vec!["verify", unknown_base.to_str().unwrap()],
        vec!["sweep", "--max-r", "0"],
        vec!["--threads", "0", "dual", "[3]"],
        vec!["--memo-limit", "0", "dual", "[3]"],
        vec!["--deterministic", "maybe", "dual", "[3]"],
        vec!["frobnicate"],
        vec![],
    ];
    for args in cases {
        let o = run(&args);
        assert_eq!(
            code(&o),
            2,
            "{args:?}: {}",
            String::from_utf8_lossy(&o.stderr)
        );
    }
}

#[test]
fn memo_limit_aborts_with_3() {
    let o = run(&["--memo-limit", "5", "realizable", "[3,2,2,2,2,2,2,2,2,2,2]"]);
    assert_eq!(code(&o), 3, "{}", String::from_utf8_lossy(&o.stderr));
    let o = run(&["--memo-limit", "5", "classify", "[14]"]);
    assert_eq!(code(&o), 3);
}

#[test]
fn enumerate_lists_types() {
    let o = run(&["enumerate", "2", "2"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o), "[2,4]\n[3,3]\n");
    let o = run(&["--json", "enumerate", "2", "2"]);
    assert_eq!(json(&o), serde_json::json!([[2, 4], [3, 3]]));
}

#[test]
fn sweep_reports_and_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let tsv = dir.path().join("rows.tsv");
    let o = run(&[
        "--json",
        "sweep",
        "--max-r",
        "5",
        "--max-s",
        "6",
        "--tsv",
        tsv.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert_eq!(v["counterexamples"], serde_json::json!([]));
    let rows = fs::read_to_string(&tsv).unwrap();
    assert_eq!(
        rows.lines().count() as u64,
        1 + v["total"].as_u64().unwrap()
    );

    // Excess 11 and 12 at r = 1 are exactly [13] and [14]: unsmoothable but
    // beyond the excess bound, so still not counterexamples.
    let o = run(&["--json", "sweep", "--max-r", "1", "--max-s", "12"]);
    assert_eq!(code(&o), 0);
    assert_eq!(
        json(&o)["unsmoothable_types"],
        serde_json::json!([[13], [14]])
    );
}

#[test]
fn full_sweep_is_clean() {
    let o = run(&["sweep", "--max-r", "12", "--max-s", "10"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("counterexamples 0"));
}

#[test]
fn json_output_is_byte_stable() {
    let commands: [&[&str]; 4] = [
        &["--json", "classify", "[5,2,3,4]", "--certificate"],
        &["--json", "certify", "[1,2,2,2,2,2,2,2,2,3]"],
        &["--json", "sweep", "--max-r", "6", "--max-s", "6"],
        &[
            "--json",
            "--threads",
            "1",
            "classify",
            "[2,2,3,2,2,3]",
            "--case",
            "r_eq_b2",
        ],
    ];
    for args in commands {
        let a = run(args);
        let b = run(args);
        assert_eq!(a.stdout, b.stdout, "{args:?}");
        assert_eq!(code(&a), code(&b));
    }
}

#[test]
fn nondeterministic_mode_agrees_on_answers() {
    let a = json(&run(&["--json", "classify", "[3,4,5]"]));
    let b = json(&run(&[
        "--json",
        "--deterministic",
        "false",
        "classify",
        "[3,4,5]",
    ]));
    assert_eq!(a["smoothable"], b["smoothable"]);
}
