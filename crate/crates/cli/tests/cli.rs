use std::io::Write;
use std::process::{Command, Output};

use serde_json::Value;

fn rsb(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rsb"))
        .args(args)
        .env_remove("RSB_SEED")
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn json(o: &Output) -> Value {
    assert_eq!(o.status.code(), Some(0), "{}", stderr(o));
    serde_json::from_slice(&o.stdout).unwrap()
}

fn floats(v: &Value) -> Vec<f64> {
    v.as_array()
        .unwrap()
        .iter()
        .map(|x| x.as_f64().unwrap())
        .collect()
}

#[test]
fn list_is_stable_and_names_entries() {
    let a = rsb(&["list"]);
    assert_eq!(a.status.code(), Some(0));
    let text = stdout(&a);
    assert!(text.contains("SU(3)/SO(3)"));
    assert!(text.lines().count() > 10);
    assert_eq!(stdout(&rsb(&["list"])), text);
    let entries = json(&rsb(&["list", "--format", "json"]));
    assert!(!entries.as_array().unwrap().is_empty());
}

#[test]
fn product_family_has_proper_row() {
    let out = json(&rsb(&[
        "classify", "--family", "A1xA1", "--mult", "1,2", "--format", "json",
    ]));
    let mut found = false;
    for cell in out["cells"].as_array().unwrap() {
        for s in cell["solutions"].as_array().unwrap() {
            let w = floats(&s["report"]["factor_weights"]);
            if (w[0] - 0.5).abs() < 1e-9 {
                assert_eq!(s["report"]["classification"], "proper_biharmonic");
                found = true;
            }
        }
    }
    assert!(found);
    let table = stdout(&rsb(&["classify", "--family", "A1xA1", "--mult", "1,2"]));
    assert!(table.contains("proper_biharmonic"));
}

#[test]
fn su3_full_cell_has_one_symmetric_minimal_row() {
    let out = json(&rsb(&[
        "classify",
        "--catalog",
        "SU(3)/SO(3)",
        "--cell",
        "full",
        "--format",
        "json",
    ]));
    let cells = out["cells"].as_array().unwrap();
    assert_eq!(cells.len(), 1);
    let sols = cells[0]["solutions"].as_array().unwrap();
    assert_eq!(sols.len(), 1);
    assert_eq!(sols[0]["report"]["classification"], "minimal");
    let h = floats(&sols[0]["report"]["point"]["h"]);
    let s = 0.5f64.sqrt();
    for (a, b) in h.iter().zip([s, 0.0, -s]) {
        assert!((a - b).abs() < 1e-10, "{h:?}");
    }
    // the same entry through --param
    let by_param = json(&rsb(&[
        "classify",
        "--catalog",
        "SU(n)/SO(n)",
        "--param",
        "n=3",
        "--cell",
        "full",
        "--format",
        "json",
    ]));
    assert_eq!(by_param["cells"], out["cells"]);
}

#[test]
fn bad_custom_file_exits_1() {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    writeln!(
        f,
        "ambient_dim 3\nrank 2\nsimple 1 -1 0\nsimple 2 -2 0\nroot 1 -1 0 mult 1"
    )
    .unwrap();
    let o = rsb(&["classify", "--custom", f.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("rank mismatch"), "{}", stderr(&o));
    let o = rsb(&["classify", "--custom", "/nonexistent.rs"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn usage_errors_exit_1() {
    for args in [
        vec!["bogus"],
        vec!["classify"],
        vec!["classify", "--family", "A2", "--catalog", "G2/SO(4)"],
        vec!["classify", "--family", "A2", "--tol", "-1"],
        vec!["classify", "--family", "A2", "--seeds", "0"],
        vec!["classify", "--family", "A2", "--parallel", "0"],
        vec!["classify", "--family", "Q2"],
        vec!["classify", "--family", "B2", "--mult", "1"],
        vec!["classify", "--catalog", "nope"],
        vec!["classify", "--catalog", "SU(n)/SO(n)", "--param", "n=1"],
        vec!["classify", "--family", "A2", "--cell", "4"],
        vec!["product", "--left", "A2:x", "--right", "A1"],
        vec!["verify", "--family", "A2", "--h=1,2"],
    ] {
        let o = rsb(&args);
        assert_eq!(o.status.code(), Some(1), "{args:?}: {}", stderr(&o));
        assert!(!stderr(&o).is_empty());
    }
    assert_eq!(rsb(&["--help"]).status.code(), Some(0));
}

#[test]
fn numerical_failures_exit_2() {
    let o = rsb(&["classify", "--family", "A2", "--tol", "1e-300"]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
    assert!(stderr(&o).contains("no solution"));
    let o = rsb(&[
        "product", "--left", "A2:1", "--right", "A1:4", "--tol", "1e-300",
    ]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
}

#[test]
fn product_command() {
    let o = rsb(&["product", "--left", "A1:1", "--right", "A1:2"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("proper biharmonic at cos^2(theta) = 1/2"));
    let o = rsb(&["product", "--left", "A1:2", "--right", "A1:2"]);
    assert!(stdout(&o).contains("no proper point"));
    let r = json(&rsb(&[
        "product", "--left", "A2:1", "--right", "A1:4", "--format", "json",
    ]));
    assert_eq!(r["pass"], true);
    assert_eq!(r["angles"]["n1"], 3);
    assert_eq!(r["angles"]["n2"], 4);
}

#[test]
fn verify_dual_vector_and_outside_point() {
    let r = json(&rsb(&[
        "verify",
        "--family",
        "A2",
        "--h=0.6666666666666666,-0.3333333333333333,-0.3333333333333333",
        "--format",
        "json",
    ]));
    let van = r["vanishing_roots"].as_array().unwrap();
    assert_eq!(van.len(), 1);
    assert_eq!(floats(&van[0]), vec![0.0, 1.0, -1.0]);
    assert_eq!(r["report"]["point"]["cell"], serde_json::json!([0]));

    let r = json(&rsb(&[
        "verify",
        "--family",
        "A2",
        "--h=1,0.2,-1.2",
        "--format",
        "json",
    ]));
    assert!(r["report"]["tension_norm"].as_f64().unwrap() > 1e-3);
    assert!(r["report"]["bitension_norm"].as_f64().unwrap() > 1e-3);
    for x in floats(&r["orthogonality"]) {
        assert!(x.abs() < 1e-12);
    }

    let o = rsb(&["verify", "--family", "A2", "--h=-1,1,0"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("alpha_1"), "{}", stderr(&o));
}

fn verify_h(source: &[&str], h: &[f64]) -> Value {
    let coords: Vec<String> = h.iter().map(|x| format!("{x:?}")).collect();
    let arg = format!("--h={}", coords.join(","));
    let mut args = vec!["verify"];
    args.extend_from_slice(source);
    args.extend([arg.as_str(), "--format", "json"]);
    json(&rsb(&args))
}

#[test]
fn json_round_trip_through_verify() {
    let source = ["--family", "B2", "--mult", "2,1"];
    let mut args = vec!["classify"];
    args.extend_from_slice(&source);
    args.extend(["--format", "json"]);
    let out = json(&rsb(&args));
    let mut n = 0;
    for cell in out["cells"].as_array().unwrap() {
        for s in cell["solutions"].as_array().unwrap() {
            let rep = &s["report"];
            let again = verify_h(&source, &floats(&rep["point"]["h"]));
            for k in ["tension_norm", "bitension_norm"] {
                let (a, b) = (
                    rep[k].as_f64().unwrap(),
                    again["report"][k].as_f64().unwrap(),
                );
                assert!((a - b).abs() < 1e-10, "{k}: {a} vs {b}");
            }
            assert_eq!(rep["classification"], again["report"]["classification"]);
            n += 1;
        }
    }
    assert!(n >= 3);
}

#[test]
fn csv_round_trip_through_verify() {
    let source = ["--family", "A1xA1", "--mult", "1,3"];
    let mut args = vec!["classify"];
    args.extend_from_slice(&source);
    args.extend(["--format", "csv"]);
    let o = rsb(&args);
    assert_eq!(o.status.code(), Some(0));
    let mut reader = csv::Reader::from_reader(o.stdout.as_slice());
    let header = reader.headers().unwrap().clone();
    let col = |name: &str| header.iter().position(|h| h == name).unwrap();
    let mut n = 0;
    for rec in reader.records() {
        let cells = rec.unwrap();
        if &cells[col("class")] == "none" {
            continue;
        }
        n += 1;
        let h: Vec<f64> = cells[col("H")]
            .split(' ')
            .map(|t| t.parse().unwrap())
            .collect();
        let again = verify_h(&source, &h);
        let b: f64 = cells[col("bitension")].parse().unwrap();
        assert!((b - again["report"]["bitension_norm"].as_f64().unwrap()).abs() < 1e-10);
    }
    assert_eq!(n, 4);
}

#[test]
fn parallel_and_seed_do_not_change_results() {
    let base = stdout(&rsb(&[
        "classify", "--family", "G2", "--mult", "1,2", "--format", "csv",
    ]));
    let one = stdout(&rsb(&[
        "classify",
        "--family",
        "G2",
        "--mult",
        "1,2",
        "--format",
        "csv",
        "--parallel",
        "1",
    ]));
    assert_eq!(base, one);
    let seeded = Command::new(env!("CARGO_BIN_EXE_rsb"))
        .args([
            "classify", "--family", "A1xA1", "--mult", "1,2", "--format", "json",
        ])
        .env("RSB_SEED", "42")
        .output()
        .unwrap();
    let v: Value = serde_json::from_slice(&seeded.stdout).unwrap();
    let count: usize = v["cells"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c["solutions"].as_array().unwrap().len())
        .sum();
    assert_eq!(count, 4);
    let bad = Command::new(env!("CARGO_BIN_EXE_rsb"))
        .args(["classify", "--family", "A2"])
        .env("RSB_SEED", "abc")
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(1));
}

#[test]
fn output_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("list.csv");
    let o = rsb(&[
        "list",
        "--format",
        "csv",
        "--output",
        path.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    assert!(std::fs::read_to_string(&path)
        .unwrap()
        .starts_with("name,example"));
}
