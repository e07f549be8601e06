use std::process::{Command, Output};

use bptower::obstruction::{Certificate, TowerRow};

fn bptower(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bptower"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8")
}

fn first_line(args: &[&str]) -> String {
    let out = bptower(args);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    stdout(&out).lines().next().unwrap_or_default().to_string()
}

fn field(text: &str, key: &str) -> String {
    text.lines()
        .find_map(|l| l.strip_prefix(&format!("{key}: ")))
        .unwrap_or_else(|| panic!("no {key} in {text}"))
        .to_string()
}

#[test]
fn eval_examples() {
    assert_eq!(
        first_line(&["--p", "2", "--k", "3", "eval", "Q1*Q0(x1*x2)"]),
        "x1^4*x2^2 + x1^2*x2^4"
    );
    assert_eq!(first_line(&["--p", "3", "--k", "2", "eval", "b(x1)"]), "y1");
    assert_eq!(
        first_line(&["--p", "2", "--k", "1", "eval", "Q1*Q0(x1)"]),
        "0"
    );
}

#[test]
fn eval_engines_agree_and_infer_k() {
    let der = first_line(&["--p", "3", "eval", "Q1*Q0(x1*x2*x3)"]);
    let rec = first_line(&[
        "--p",
        "3",
        "eval",
        "--engine",
        "recursive",
        "Q1*Q0(x1*x2*x3)",
    ]);
    assert_eq!(der, rec);
    assert!(!der.is_empty() && der != "0");
}

#[test]
fn eval_json_reports_degree() {
    let out = bptower(&[
        "--p",
        "2",
        "--k",
        "2",
        "--format",
        "json",
        "eval",
        "Sq1(x1*x2)",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["result"], "x1^2*x2 + x1*x2^2");
    assert_eq!(doc["degree"], "3");
}

#[test]
fn verify_passes_default_grids() {
    for p in ["2", "3"] {
        let n_max = if p == "2" { "2" } else { "1" };
        let out = bptower(&["--p", p, "--n-max", n_max, "verify", "--samples", "30"]);
        assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
        let text = stdout(&out);
        assert!(!text.contains("FAIL"));
        assert!(text.trim_end().ends_with("0 failures"));
    }
}

#[test]
fn verify_flags_level_zero_omission() {
    let out = bptower(&[
        "--p",
        "3",
        "--n-max",
        "1",
        "verify",
        "--sign-rule",
        "skip-level-zero",
    ]);
    assert_eq!(out.status.code(), Some(1));
    let text = stdout(&out);
    assert!(text.contains("FAIL"));
    assert!(text.contains("difference: "));
}

#[test]
fn verify_json_is_structured() {
    let out = bptower(&[
        "--p",
        "5",
        "--n-max",
        "0",
        "--format",
        "json",
        "verify",
        "--samples",
        "5",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["passed"], true);
    assert_eq!(doc["cells"].as_array().unwrap().len(), 3);
}

#[test]
fn certify_examples() {
    let out = bptower(&["--p", "2", "--n", "0", "--format", "json", "certify"]);
    assert_eq!(out.status.code(), Some(0));
    let cert = Certificate::from_json(&stdout(&out)).unwrap();
    assert_eq!(cert.bp_degree, 4);
    assert_eq!(cert.variety_dimension, 7);
    assert_eq!(cert.source_class.to_string(), "x1*x2*x3");
    assert!(!cert.witness.is_zero());

    let text = stdout(&bptower(&["--p", "2", "--n", "1", "certify"]));
    assert_eq!(field(&text, "bp_degree"), "8");

    let text = stdout(&bptower(&["--p", "5", "--n", "0", "certify"]));
    assert_eq!(field(&text, "bp_degree"), "4");
    assert_eq!(field(&text, "k"), "3");
}

#[test]
fn certify_text_and_json_agree() {
    let text = stdout(&bptower(&["--p", "3", "--n", "1", "certify"]));
    let json = stdout(&bptower(&[
        "--p", "3", "--n", "1", "--format", "json", "certify",
    ]));
    let doc = Certificate::from_json(&json).unwrap().to_doc();
    assert_eq!(field(&text, "schema"), doc.schema);
    assert_eq!(field(&text, "source_class"), doc.source_class);
    assert_eq!(field(&text, "witness"), doc.witness);
    assert_eq!(
        field(&text, "witness_degree"),
        doc.witness_degree.to_string()
    );
    assert_eq!(field(&text, "statement"), doc.statement);
}

#[test]
fn certify_all_levels() {
    let out = bptower(&[
        "--p", "2", "--n-max", "2", "--format", "json", "certify", "--all-n",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let docs: Vec<serde_json::Value> = serde_json::from_slice(&out.stdout).unwrap();
    let bp: Vec<u64> = docs
        .iter()
        .map(|d| d["bp_degree"].as_u64().unwrap())
        .collect();
    assert_eq!(bp, [4, 8, 16]);
}

#[test]
fn certify_below_threshold_is_absent() {
    let out = bptower(&["--p", "2", "--n", "1", "--m", "2", "certify"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).starts_with("absent: "));

    let text = stdout(&bptower(&["--p", "3", "--n", "0", "--m", "4", "certify"]));
    assert_eq!(field(&text, "m"), "4");
    assert_eq!(field(&text, "witness_degree"), "10");
}

#[test]
fn certify_writes_output_file() {
    let dir = std::env::temp_dir().join(format!("bptower-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("cert.json");
    let path_str = path.to_str().unwrap();
    let out = bptower(&[
        "--p", "2", "--n", "0", "--format", "json", "certify", "--output", path_str,
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let cert = Certificate::from_json(&std::fs::read_to_string(&path).unwrap()).unwrap();
    cert.verify().unwrap();
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn table_examples() {
    let out = bptower(&["--p", "2", "--n-max", "3", "--format", "json", "table"]);
    let rows: Vec<TowerRow> = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(rows.len(), 4);
    for pair in rows.windows(2) {
        let (a, b) = (pair[0], pair[1]);
        assert!(b.q_degree > a.q_degree && b.w > a.w && b.wilson_bound > a.wilson_bound);
        assert!(b.bp_degree > a.bp_degree && b.variety_dimension > a.variety_dimension);
    }
    assert!(rows[2].v_shift > rows[1].v_shift);
    assert_eq!(rows[0].v_shift, 0);

    let out = bptower(&["--p", "3", "--n-max", "0", "--format", "json", "table"]);
    let rows: Vec<TowerRow> = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(rows.len(), 1);
    assert_eq!((rows[0].wilson_bound, rows[0].bp_degree), (2, 4));

    let text = stdout(&bptower(&["--p", "2", "--n-max", "1", "table"]));
    assert_eq!(text.lines().next(), Some("# p = 2"));
    assert_eq!(text.lines().count(), 4);
}

#[test]
fn exit_codes() {
    let code = |args: &[&str]| bptower(args).status.code();
    assert_eq!(code(&["--p", "2", "eval", "Q1*(x1"]), Some(2));
    assert_eq!(code(&["--p", "2", "--k", "1", "eval", "Q0(x2)"]), Some(2));
    assert_eq!(code(&["--p", "4", "eval", "x1"]), Some(2));
    assert_eq!(code(&["--p", "2", "eval", "y1"]), Some(2));
    assert_eq!(code(&["--p", "3", "eval", "x1^2"]), Some(2));
    assert_eq!(code(&["--bogus"]), Some(2));
    assert_eq!(code(&["--p", "2", "eval", "Q9(x1)"]), Some(3));
    assert_eq!(code(&["--p", "3", "--n-max", "9", "table"]), Some(3));
    assert_eq!(
        code(&["--p", "2", "--recursion-cap", "1", "eval", "Q2(x1)"]),
        Some(3)
    );
    assert_eq!(code(&["--help"]), Some(0));
}

#[test]
fn reruns_are_byte_identical() {
    let args = [
        "--p",
        "3",
        "--n-max",
        "1",
        "--seed",
        "11",
        "--format",
        "json",
        "verify",
        "--samples",
        "25",
    ];
    let a = bptower(&args);
    let b = bptower(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);

    let other = bptower(&[
        "--p",
        "3",
        "--n-max",
        "1",
        "--seed",
        "12",
        "--format",
        "json",
        "verify",
        "--samples",
        "25",
    ]);
    assert_eq!(other.status.code(), Some(0));
}
