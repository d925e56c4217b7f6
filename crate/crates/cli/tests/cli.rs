use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

use wreath_core::autgroup::color_aut_group;
use wreath_core::cayley::{sring_wreath, ClassPartition, GroupTable, SringDescriptor};
use wreath_core::io::{adjacency_text, parse_scheme, parse_sring, scheme_to_json};
use wreath_core::products::{class_one, kernel_scheme, wreath_product};
use wreath_core::spectral::{decompose, DEFAULT_TOL};
use wreath_core::tower::Tower;

fn wreath(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wreath"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn write(dir: &TempDir, name: &str, contents: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, contents).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn kernel_build_then_schurian() {
    let dir = TempDir::new().unwrap();
    let k = dir.path().join("k.json");
    let o = wreath(&["build", "kernel", "--n", "2", "--v", "2", "-o", s(&k)]);
    assert!(o.status.success());
    let built = parse_scheme(&std::fs::read_to_string(&k).unwrap()).unwrap();
    assert_eq!(built, kernel_scheme(2, 2).unwrap());

    let o = wreath(&["aut", s(&k), "--schurian"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("schurian: true"));
}

#[test]
fn wreath_then_eigenmatrix() {
    let dir = TempDir::new().unwrap();
    let h = write(&dir, "h12.json", &scheme_to_json(&class_one(2).unwrap()));
    let w = dir.path().join("w.json");
    assert!(wreath(&["product", "wreath", s(&h), s(&h), "-o", s(&w)])
        .status
        .success());
    let expected = wreath_product(&class_one(2).unwrap(), &class_one(2).unwrap()).unwrap();
    assert_eq!(
        parse_scheme(&std::fs::read_to_string(&w).unwrap()).unwrap(),
        expected
    );

    let o = wreath(&["--json", "analyze", s(&w), "--eigenmatrix"]);
    let report: Value = serde_json::from_str(&stdout(&o)).unwrap();
    let p = &report["spectrum"]["eigenmatrix"];
    assert_eq!(
        p,
        &serde_json::json!([["1", "1", "1"], ["2", "-2", "0"], ["1", "1", "-1"]])
    );
    let library =
        serde_json::to_value(decompose(&expected, DEFAULT_TOL).unwrap().export(false)).unwrap();
    assert_eq!(report["spectrum"], library);
}

#[test]
fn verify_reports_product_closure() {
    let dir = TempDir::new().unwrap();
    // Kernel(2,2) with one symmetric cell pair relabelled: transposes stay
    // consistent, intersection numbers do not.
    let mut rows = kernel_scheme(2, 2).unwrap().rows();
    rows[0][1] = 1;
    rows[1][0] = 1;
    let doc = serde_json::json!({"size": 4, "num_relations": 3, "relation": rows}).to_string();
    let bad = write(&dir, "bad.json", &doc);
    let o = wreath(&["verify", s(&bad)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("axiom (2) product closure"));

    let o = wreath(&["--json", "verify", s(&bad)]);
    let report: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(report["ok"], Value::Bool(false));
    assert_eq!(report["violations"][0]["kind"], "intersection_not_constant");
}

#[test]
fn exit_codes() {
    let dir = TempDir::new().unwrap();
    assert_eq!(wreath(&["nonsense"]).status.code(), Some(2));
    assert_eq!(
        wreath(&["build", "kernel", "--n", "2"]).status.code(),
        Some(2)
    );
    assert_eq!(
        wreath(&["verify", "/nonexistent/x.json"]).status.code(),
        Some(2)
    );
    assert_eq!(
        wreath(&["build", "kernel", "--n", "13", "--v", "2"])
            .status
            .code(),
        Some(3)
    );
    assert_eq!(
        wreath(&[
            "--max-points",
            "8",
            "build",
            "kernel",
            "--n",
            "4",
            "--v",
            "2"
        ])
        .status
        .code(),
        Some(3)
    );
    let out_of_range = write(
        &dir,
        "r.json",
        r#"{"size":2,"num_relations":2,"relation":[[0,2],[2,0]]}"#,
    );
    let o = wreath(&["analyze", s(&out_of_range)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("relation[0][1]"));
    assert_eq!(wreath(&["--help"]).status.code(), Some(0));
}

#[test]
fn json_output_is_deterministic() {
    let dir = TempDir::new().unwrap();
    let k = write(
        &dir,
        "k.json",
        &scheme_to_json(&kernel_scheme(3, 2).unwrap()),
    );
    let args = [
        "--json",
        "analyze",
        s(&k),
        "--valencies",
        "--intersection",
        "--eigenmatrix",
        "--idempotents",
    ];
    let a = wreath(&args);
    let b = wreath(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let a = wreath(&["--json", "aut", s(&k), "--full"]);
    let b = wreath(&["--json", "aut", s(&k), "--full", "--threads", "3"]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn aut_matches_library() {
    let dir = TempDir::new().unwrap();
    let x = wreath_product(&class_one(2).unwrap(), &class_one(3).unwrap()).unwrap();
    let f = write(&dir, "x.json", &scheme_to_json(&x));
    let o = wreath(&["--json", "aut", s(&f)]);
    let report: Value = serde_json::from_str(&stdout(&o)).unwrap();
    let g = color_aut_group(&x);
    assert_eq!(report["order"], Value::String(g.order_string()));
    assert_eq!(report["order"], "72");
    assert_eq!(
        report["generators"],
        serde_json::to_value(g.generators()).unwrap()
    );
}

#[test]
fn sring_commands_match_library() {
    let dir = TempDir::new().unwrap();
    let z3 = write(
        &dir,
        "z3.json",
        r#"{"group":{"kind":"cyclic","n":3},"classes":[[0],[1],[2]]}"#,
    );
    let z4 = write(
        &dir,
        "z4.json",
        r#"{"group":{"kind":"cyclic","n":4},"classes":[[0],[2],[1,3]]}"#,
    );
    let bad = write(
        &dir,
        "z5.json",
        r#"{"group":{"kind":"cyclic","n":5},"classes":[[0],[1,2],[3,4]]}"#,
    );

    assert_eq!(
        wreath(&["sring", "validate", s(&z3)]).status.code(),
        Some(0)
    );
    let o = wreath(&["sring", "validate", s(&bad)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("product closure: false"));

    let o = wreath(&["sring", "wreath", s(&z3), s(&z4)]);
    assert!(o.status.success());
    let cli = parse_sring(&stdout(&o)).unwrap();
    let g3 = GroupTable::cyclic(3).unwrap();
    let g4 = GroupTable::cyclic(4).unwrap();
    let p3 = ClassPartition::thin(3);
    let p4 = ClassPartition::new(4, vec![vec![0], vec![2], vec![1, 3]]).unwrap();
    let (g, p) = sring_wreath(&g3, &p3, &g4, &p4).unwrap();
    assert_eq!(cli, SringDescriptor::from_parts(&g, &p));

    let o = wreath(&["sring", "schurian", s(&z4)]);
    assert!(stdout(&o).contains("schurian: true"));

    let cay = dir.path().join("cay.json");
    assert!(wreath(&["build", "cayley", "--in", s(&z4), "-o", s(&cay)])
        .status
        .success());
    let scheme = parse_scheme(&std::fs::read_to_string(&cay).unwrap()).unwrap();
    assert_eq!(scheme.rows()[0], vec![0, 2, 1, 2]);
}

#[test]
fn fixture_command() {
    let path = concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/../../fixtures/non_schurian_z5x5.json"
    );
    let o = wreath(&["sring", "fixture", path]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("schurian: false"));

    let dir = TempDir::new().unwrap();
    let schurian = write(
        &dir,
        "z4.json",
        r#"{"group":{"kind":"cyclic","n":4},"classes":[[0],[2],[1,3]]}"#,
    );
    assert_eq!(
        wreath(&["sring", "fixture", s(&schurian)]).status.code(),
        Some(1)
    );
}

#[test]
fn tower_commands_match_library() {
    let dir = TempDir::new().unwrap();
    let t = write(
        &dir,
        "t.json",
        r#"{"factors":[{"ref":"kernel-base","v":2}],"repeat":true}"#,
    );
    let o = wreath(&["tower", "truncate", "--in", s(&t), "--depth", "4"]);
    let cli = parse_scheme(&stdout(&o)).unwrap();
    assert_eq!(cli, *Tower::kernel(2).unwrap().truncation(4).unwrap());

    let o = wreath(&["tower", "verify", "--in", s(&t), "--depth", "5"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("projective system: true"));

    let o = wreath(&["--json", "tower", "labels", "--in", s(&t), "--depth", "3"]);
    let labels: Value = serde_json::from_str(&stdout(&o)).unwrap();
    let lib = serde_json::to_value(Tower::kernel(2).unwrap().limit_labels(3).unwrap()).unwrap();
    assert_eq!(labels, lib);
    assert_eq!(labels["i_labels"].as_array().unwrap().len(), 4);

    let finite = write(
        &dir,
        "f.json",
        r#"{"factors":[{"ref":"kernel-base","v":2}]}"#,
    );
    assert_eq!(
        wreath(&["tower", "truncate", "--in", s(&finite), "--depth", "2"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn export_formats() {
    let dir = TempDir::new().unwrap();
    let x = kernel_scheme(2, 3).unwrap();
    let f = write(&dir, "x.json", &scheme_to_json(&x));
    let o = wreath(&["export", s(&f), "--format", "matrix-text"]);
    assert_eq!(stdout(&o), adjacency_text(&x));
    let o = wreath(&["export", s(&f), "--format", "json"]);
    assert_eq!(stdout(&o), scheme_to_json(&x) + "\n");
}

#[test]
fn in_process_run_matches_binary() {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = wreath_cli::run(
        ["wreath", "build", "class-one", "--v", "3"],
        &mut out,
        &mut err,
    );
    assert_eq!(code, 0);
    assert_eq!(out, wreath(&["build", "class-one", "--v", "3"]).stdout);
}
