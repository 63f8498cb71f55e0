//! End-to-end tests of the `entrofunc` binary.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_entrofunc"));
    c.env_remove("ENTROFUNC_TAU");
    c
}

struct Run {
    code: i32,
    report: Option<Value>,
    stdout: String,
    stderr: String,
}

fn finish(out: Output) -> Run {
    let stdout = String::from_utf8_lossy(&out.stdout).to_string();
    Run {
        code: out.status.code().expect("exit code"),
        report: serde_json::from_str(&stdout).ok(),
        stdout,
        stderr: String::from_utf8_lossy(&out.stderr).to_string(),
    }
}

fn run(args: &[&str]) -> Run {
    finish(bin().args(args).output().expect("binary runs"))
}

fn schema() -> jsonschema::JSONSchema {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("schema/report.schema.json");
    let text = std::fs::read_to_string(path).unwrap();
    let value: Value = serde_json::from_str(&text).unwrap();
    jsonschema::JSONSchema::compile(&value).expect("schema compiles")
}

fn assert_valid(report: &Value) {
    let s = schema();
    let msgs: Vec<String> = match s.validate(report) {
        Ok(()) => Vec::new(),
        Err(errors) => errors.map(|e| e.to_string()).collect(),
    };
    assert!(msgs.is_empty(), "schema violations {msgs:?} in {report:#}");
}

fn report(r: &Run) -> &Value {
    let v = r.report.as_ref().unwrap_or_else(|| {
        panic!(
            "no JSON report; stdout {:?} stderr {:?}",
            r.stdout, r.stderr
        )
    });
    assert_valid(v);
    assert_eq!(v["exit_code"].as_i64().unwrap(), r.code as i64);
    v
}

fn sample(dir: &Path, name: &str, args: &[&str]) -> PathBuf {
    let path = dir.join(name);
    let mut full = vec!["sample"];
    full.extend_from_slice(args);
    full.extend_from_slice(&["--out", path.to_str().unwrap()]);
    let r = run(&full);
    assert_eq!(r.code, 0, "{}", r.stderr);
    path
}

#[test]
fn eq1_tsallis_form_passes() {
    let r = run(&[
        "check",
        "eq1",
        "power-affine:c_star=1,c=-1,q=2",
        "--q",
        "2",
        "--grid",
        "100x100",
    ]);
    assert_eq!(r.code, 0);
    let v = report(&r);
    assert_eq!(v["verdict"], "pass");
    assert_eq!(v["command"], "check");
    assert!(v["max_abs_residual"].as_f64().unwrap() < 1e-12);
    assert_eq!(v["parameters"]["q"], 2.0);
}

#[test]
fn eq1_square_fails_with_witness() {
    let r = run(&["check", "eq1", "custom-square", "--q", "1", "--grid", "1x1"]);
    assert_eq!(r.code, 1);
    let v = report(&r);
    assert_eq!(v["verdict"], "fail");
    assert_eq!(v["witness"], serde_json::json!([0.5, 0.5]));
    assert!((v["max_abs_residual"].as_f64().unwrap() - 0.375).abs() < 1e-14);
    assert!(
        (v["details"]["interior"]["residual_at_witness"]
            .as_f64()
            .unwrap()
            + 0.375)
            .abs()
            < 1e-14
    );
}

#[test]
fn f_of_one_nonzero_fails_at_probe() {
    let dir = tempfile::tempdir().unwrap();
    let path = sample(
        dir.path(),
        "t.csv",
        &["power-affine:c_star=1,c=-1,q=2", "--n", "16"],
    );
    let text = std::fs::read_to_string(&path).unwrap();
    let patched: String = text
        .lines()
        .map(|l| {
            if l.starts_with("1,") {
                "1,0.5".to_string()
            } else {
                l.to_string()
            }
        })
        .collect::<Vec<_>>()
        .join("\n");
    std::fs::write(&path, patched + "\n").unwrap();
    let r = run(&["check", "eq1", path.to_str().unwrap(), "--q", "2"]);
    assert_eq!(r.code, 1);
    let v = report(&r);
    assert_eq!(v["details"]["interior"]["verdict"], "pass");
    assert_eq!(v["details"]["boundary_probe"]["verdict"], "fail");
    assert_eq!(v["witness"][1], 1.0);
    assert!(
        (v["details"]["boundary_probe"]["residual_at_witness"]
            .as_f64()
            .unwrap()
            + 0.5)
            .abs()
            < 1e-15
    );
    assert!(v["notes"][0]
        .as_str()
        .unwrap()
        .contains("y=1 boundary probe"));
}

#[test]
fn tabulated_solution_passes() {
    let dir = tempfile::tempdir().unwrap();
    let path = sample(
        dir.path(),
        "s.csv",
        &["power-affine:c_star=1,c=-1,q=2", "--n", "16"],
    );
    let r = run(&["check", "eq1", path.to_str().unwrap(), "--q", "2"]);
    assert_eq!(r.code, 0, "{}", r.stdout);
    report(&r);
    let r = run(&[
        "check",
        "eq2",
        path.to_str().unwrap(),
        "--alpha",
        "1",
        "--beta",
        "3",
    ]);
    assert_eq!(r.code, 1);
}

#[test]
fn other_equations() {
    let ok = |args: &[&str], code: i32| {
        let r = run(args);
        assert_eq!(r.code, code, "{args:?}: {}", r.stdout);
        report(&r);
    };
    ok(
        &[
            "check",
            "eq2",
            "power-diff:c=2,alpha=1,beta=3",
            "--alpha",
            "1",
            "--beta",
            "3",
            "--grid",
            "50x50",
        ],
        0,
    );
    ok(
        &[
            "check",
            "eq2",
            "power-log:c=-1,alpha=2",
            "--alpha",
            "2",
            "--beta",
            "2",
            "--grid",
            "50x50",
        ],
        0,
    );
    ok(
        &["check", "additive", "custom-linear:c=3", "--grid", "40x40"],
        0,
    );
    ok(
        &["check", "additive", "custom-square", "--grid", "40x40"],
        1,
    );
    ok(
        &[
            "check",
            "multiplicative",
            "custom-power:p=2.5",
            "--grid",
            "40x40",
        ],
        0,
    );
    ok(
        &["check", "logarithmic", "custom-log", "--grid", "40x40"],
        0,
    );
    ok(
        &["check", "logarithmic", "custom-identity", "--grid", "40x40"],
        1,
    );
}

#[test]
fn cocycle_reports_three_sub_verdicts() {
    let r = run(&[
        "check",
        "cocycle",
        "power-affine:c_star=0,c=1,q=2",
        "--q",
        "2",
        "--grid",
        "30x30",
    ]);
    assert_eq!(r.code, 0);
    let v = report(&r);
    for part in ["symmetry", "cocycle", "homogeneity"] {
        assert_eq!(v["details"][part]["verdict"], "pass");
    }
    // C_f of x^2 is 2-homogeneous, not 3-homogeneous
    let r = run(&[
        "check",
        "cocycle",
        "power-affine:c_star=0,c=1,q=2",
        "--q",
        "3",
        "--grid",
        "30x30",
    ]);
    assert_eq!(r.code, 1);
    let v = report(&r);
    assert_eq!(v["details"]["homogeneity"]["verdict"], "fail");
    assert_eq!(v["details"]["cocycle"]["verdict"], "pass");
}

#[test]
fn reconstruct_examples() {
    let r = run(&[
        "reconstruct",
        "--alpha",
        "1",
        "--beta",
        "2",
        "--t1",
        "1/2",
        "--t2",
        "1/2",
        "--f-t1",
        "1/4",
        "--exact",
    ]);
    assert_eq!(r.code, 0);
    let v = report(&r);
    assert_eq!(v["details"]["kind"], "power-diff");
    assert_eq!(v["parameters"]["c"], 1.0);
    assert_eq!(v["parameters"]["alpha"], 1.0);
    assert_eq!(v["parameters"]["beta"], 2.0);
    assert_eq!(v["details"]["exact"]["denominator"], "1/64");
    assert_eq!(v["details"]["exact"]["f(t)"], "-t^2 + t");
    let table = v["details"]["table"].as_array().unwrap();
    assert_eq!(table.len(), 100);
    for row in table {
        let x = row["x"].as_f64().unwrap();
        assert!((row["f"].as_f64().unwrap() - (x - x * x)).abs() < 1e-12);
    }

    let r = run(&[
        "reconstruct",
        "--alpha",
        "2",
        "--beta",
        "2",
        "--t1",
        "1/2",
        "--t2",
        "1/2",
        "--f-t1",
        "1/4",
    ]);
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("multiplicative"));
    assert_eq!(report(&r)["verdict"], "error");

    let r = run(&[
        "reconstruct",
        "--alpha",
        "1",
        "--beta",
        "2",
        "--t1",
        "1/2",
        "--t2",
        "1/2",
        "--f-t1",
        "0",
    ]);
    assert_eq!(r.code, 0);
    assert_eq!(report(&r)["parameters"]["c"], 0.0);
}

#[test]
fn fit_examples() {
    let dir = tempfile::tempdir().unwrap();
    let path = sample(
        dir.path(),
        "p.csv",
        &["power-affine:c_star=2,c=-3,q=0.5", "--n", "64"],
    );
    let r = run(&["fit", "eq1", path.to_str().unwrap()]);
    assert_eq!(r.code, 0);
    let v = report(&r);
    let p = &v["parameters"];
    assert!((p["c_star"].as_f64().unwrap() - 2.0).abs() < 1e-6);
    assert!((p["c"].as_f64().unwrap() + 3.0).abs() < 1e-6);
    assert!((p["q"].as_f64().unwrap() - 0.5).abs() < 1e-6);
    assert!(v["residual_norm"].as_f64().unwrap() < 1e-10);
    assert_eq!(
        v["details"]["alternatives"][0]["family"]
            .as_str()
            .unwrap()
            .split(':')
            .next(),
        Some("xlogx")
    );
    assert_eq!(v["details"]["continuity"]["continuous"], false);
    assert!(v["notes"]
        .as_array()
        .unwrap()
        .iter()
        .any(|n| n == "regular-branch"));

    let path = sample(dir.path(), "l.csv", &["xlogx:c=-1,c_star=0", "--n", "32"]);
    let r = run(&[
        "fit",
        "eq2",
        path.to_str().unwrap(),
        "--alpha",
        "1",
        "--beta",
        "1",
    ]);
    assert_eq!(r.code, 0);
    assert!((report(&r)["parameters"]["c"].as_f64().unwrap() + 1.0).abs() < 1e-10);

    let r = run(&["fit", "eq1", path.to_str().unwrap(), "--q", "1"]);
    let v = report(&r);
    assert_eq!(v["details"]["continuity"]["continuous"], true);

    let r = run(&["fit", "eq1", path.to_str().unwrap(), "--q", "1.0000001"]);
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("q = 1"));
}

#[test]
fn demo_pathological_is_exact() {
    let r = run(&["demo-pathological", "--trials", "100"]);
    assert_eq!(r.code, 0);
    let v = report(&r);
    assert!(v["notes"][0]
        .as_str()
        .unwrap()
        .contains("100/100 residuals are the canonical zero element"));
    assert_eq!(v["details"]["zero_residuals"], 100);

    let r = run(&[
        "demo-pathological",
        "--trials",
        "10",
        "--c-star",
        "1/2",
        "--seed",
        "3",
    ]);
    assert_eq!(r.code, 1);
    let v = report(&r);
    assert!(v["witness"].is_array());
    assert!(v["details"]["first_nonzero"]["residual"].is_string());
}

#[test]
fn exact_csv_check() {
    let dir = tempfile::tempdir().unwrap();
    let path = sample(
        dir.path(),
        "e.csv",
        &[
            "exact-derivation:c_star=0,scale=3/2",
            "--exact",
            "--n",
            "12",
        ],
    );
    let head = std::fs::read_to_string(&path).unwrap();
    assert!(head.starts_with("x_exact,f_exact"));
    let r = run(&["check", "eq1", path.to_str().unwrap(), "--exact"]);
    assert_eq!(r.code, 0, "{}", r.stdout);
    report(&r);
    let r = run(&["check", "eq1", "custom-square", "--exact", "--trials", "5"]);
    assert_eq!(r.code, 1);
    report(&r);
    let r = run(&["check", "eq1", "custom-log", "--exact"]);
    assert_eq!(r.code, 2);
}

#[test]
fn malformed_inputs_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.csv");
    std::fs::write(&bad, "x,f\n0.5,1\n0.25,abc\n").unwrap();
    let r = run(&["check", "eq1", bad.to_str().unwrap(), "--q", "2"]);
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("line 3, column 2"), "{}", r.stderr);
    report(&r);

    let exact_bad = dir.path().join("bad_exact.csv");
    std::fs::write(&exact_bad, "x_exact,f_exact\n1/2,t + * 2\n").unwrap();
    let r = run(&["check", "eq1", exact_bad.to_str().unwrap(), "--exact"]);
    assert_eq!(r.code, 2);
    assert!(
        r.stderr.contains("line 2, column 2, character 5"),
        "{}",
        r.stderr
    );

    let header = dir.path().join("header.csv");
    std::fs::write(&header, "a,b\n0.5,1\n").unwrap();
    assert_eq!(run(&["fit", "eq1", header.to_str().unwrap()]).code, 2);

    let r = run(&["check", "eq1", "no-such-family", "--q", "2"]);
    assert_eq!(r.code, 2);
    report(&r);
    assert_eq!(run(&["check", "eq1", "missing.csv", "--q", "2"]).code, 2);
    assert_eq!(run(&["check", "eq1", "custom-square"]).code, 2);
    assert_eq!(run(&["fit", "eq1", "definitely-missing.csv"]).code, 2);
    let r = finish(
        bin()
            .env("ENTROFUNC_TAU", "2")
            .args(["demo-pathological", "--trials", "1"])
            .output()
            .unwrap(),
    );
    assert_eq!(r.code, 2);
}

#[test]
fn tau_override_is_used() {
    let r = finish(
        bin()
            .env("ENTROFUNC_TAU", "0.6180339887498949")
            .args(["demo-pathological", "--trials", "20", "--seed", "5"])
            .output()
            .unwrap(),
    );
    assert_eq!(r.code, 0);
    let v = report(&r);
    assert_eq!(v["inputs"]["tau"], 0.6180339887498949);
}

#[test]
fn out_file_matches_stdout_and_reruns_agree() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report.json");
    let args = [
        "check",
        "eq1",
        "custom-square",
        "--q",
        "1",
        "--grid",
        "20x20",
        "--out",
        out.to_str().unwrap(),
    ];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.code, b.code);
    assert_eq!(a.stdout, b.stdout);
    let file: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(Some(file), a.report);
}

#[test]
fn csv_roundtrip_is_bit_exact() {
    let dir = tempfile::tempdir().unwrap();
    let path = sample(
        dir.path(),
        "r.csv",
        &[
            "power-log:c=0.3,alpha=1.7",
            "--n",
            "50",
            "--noise",
            "1e-3",
            "--seed",
            "9",
        ],
    );
    let text = std::fs::read_to_string(&path).unwrap();
    let copy = dir.path().join("copy.csv");
    // re-emit parsed values and compare the text
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("x,f"));
    let parsed: Vec<(f64, f64)> = lines
        .map(|l| {
            let (a, b) = l.split_once(',').unwrap();
            (a.parse().unwrap(), b.parse().unwrap())
        })
        .collect();
    let re: String = std::iter::once("x,f".to_string())
        .chain(parsed.iter().map(|(a, b)| format!("{a},{b}")))
        .collect::<Vec<_>>()
        .join("\n")
        + "\n";
    std::fs::write(&copy, &re).unwrap();
    assert_eq!(re, text);
    let r1 = run(&[
        "fit",
        "eq2",
        path.to_str().unwrap(),
        "--alpha",
        "1.7",
        "--beta",
        "1.7",
    ]);
    let r2 = run(&[
        "fit",
        "eq2",
        copy.to_str().unwrap(),
        "--alpha",
        "1.7",
        "--beta",
        "1.7",
    ]);
    assert_eq!(report(&r1)["parameters"], report(&r2)["parameters"]);
}
