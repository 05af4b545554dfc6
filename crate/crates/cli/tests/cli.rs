use std::path::PathBuf;
use std::process::{Command, Output};

fn endodyn(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_endodyn"))
        .args(args)
        .env_remove("ENDODYN_JOBS")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn specs_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../specs")
}

#[test]
fn analyze_stretch_map() {
    let o = endodyn(&["analyze", "--n", "12", "--a", "4"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("nil part: 4 elements"));
    assert!(out.contains("per part: 3 elements"));
    assert!(out.contains("identity behavior: (4)"));
    assert!(out.contains("cycles: [(1,3)]"));

    let o = endodyn(&["analyze", "--n", "5", "--a", "1", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["cycles"], serde_json::json!([[1, 5]]));
    assert_eq!(v["passed"], true);
}

#[test]
fn analyze_table_group_file() {
    let path = specs_dir().join("s3_sign.json");
    let o = endodyn(&["analyze", "--input", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("nil part: 3 elements"));
    assert!(out.contains("per part: 2 elements"));
    assert!(out.contains("nil part normal: yes"));
}

#[test]
fn invalid_input_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(
        &bad,
        r#"{"type":"abelian","orders":[4,2],"matrix":[[0,1],[0,0]]}"#,
    )
    .unwrap();
    let o = endodyn(&["analyze", "--input", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("(1, 2)"));

    let o = endodyn(&[
        "analyze",
        "--input",
        dir.path().join("missing.json").to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("missing.json"));

    assert_eq!(
        endodyn(&["analyze", "--n", "0", "--a", "1"]).status.code(),
        Some(2)
    );
    assert_eq!(endodyn(&["census", "--n", "0"]).status.code(), Some(2));
}

#[test]
fn census_single() {
    let o = endodyn(&["census", "--n", "8", "--brute-force"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("(agrees)"));

    let o = endodyn(&["census", "--n", "12", "--brute-force", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let expected = serde_json::json!({"total": 12, "trees": 2, "cycle_unions": 4, "mixed": 6});
    assert_eq!(v["formula"], expected);
    assert_eq!(v["bruteForce"], expected);
    assert_eq!(v["classes"].as_array().unwrap().len(), 12);
    assert_eq!(
        v["classes"][0],
        serde_json::json!({"rep": 0, "behavior": [12], "cycles": [[1, 1]], "size": 1})
    );

    let o = endodyn(&["census", "--n", "1", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["overlap"], true);
    assert_eq!(v["formula"]["total"], 1);
    assert!(v["bruteForce"].is_null());
}

#[test]
fn census_range() {
    let o = endodyn(&["census", "--max-n", "100", "--jobs", "2"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("agree for all n in 1..=100"));
}

#[test]
fn realize_chain() {
    let o = endodyn(&["realize", "--chain", "4,2"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.starts_with(r#"{"type":"abelian","orders":[4,2],"matrix":[[0,2],[0,0]]}"#));
    assert!(out.contains("verified"));

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("z6.json");
    let o = endodyn(&[
        "realize",
        "--chain",
        "6",
        "--output",
        path.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let written = std::fs::read_to_string(&path).unwrap();
    let v: serde_json::Value = serde_json::from_str(&written).unwrap();
    assert_eq!(
        v,
        serde_json::json!({"type": "abelian", "orders": [6], "matrix": [[0]]})
    );

    // the written file is valid input
    let o = endodyn(&["analyze", "--input", path.to_str().unwrap()]);
    assert!(stdout(&o).contains("identity behavior: (6)"));

    let o = endodyn(&["realize", "--chain", "2,4"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("position 1"));
}

#[test]
fn graph_export() {
    let o = endodyn(&["graph", "--n", "4", "--a", "0"]);
    let out = stdout(&o);
    assert_eq!(out.matches(" -> 0;").count(), 4);
    assert!(out.starts_with("digraph state_space {\n"));
    assert!(out.ends_with("}\n"));

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("g.dot");
    let o = endodyn(&[
        "graph",
        "--n",
        "9",
        "--a",
        "3",
        "--output",
        path.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let dot = std::fs::read_to_string(&path).unwrap();
    for x in 0..9 {
        assert!(dot.contains(&format!("  {x} -> {};\n", 3 * x % 9)));
    }

    let o = endodyn(&["graph", "--n", "7", "--a", "2", "--labels"]);
    assert!(stdout(&o).contains("[label="));
}

#[test]
fn verify_is_deterministic() {
    let a = endodyn(&[
        "verify", "--seed", "42", "--budget", "20", "--format", "json",
    ]);
    let b = endodyn(&[
        "verify", "--seed", "42", "--budget", "20", "--format", "json",
    ]);
    assert_eq!(a.status.code(), Some(0), "{}", stdout(&a));
    assert_eq!(a.stdout, b.stdout);
    let v: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    let names: Vec<&str> = v["suites"]
        .as_array()
        .unwrap()
        .iter()
        .map(|s| s["name"].as_str().unwrap())
        .collect();
    assert!(names.contains(&"census") && names.contains(&"tensor-decomposition"));
}

/// Every `console` block in the guide's command-line chapter shows real output.
#[test]
fn guide_examples_match() {
    let guide = std::fs::read_to_string(
        PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../book/src/cli.md"),
    )
    .unwrap();
    let mut checked = 0;
    for block in guide.split("```console\n").skip(1) {
        let block = &block[..block.find("```").unwrap()];
        let (command, expected) = block.split_once('\n').unwrap();
        let args: Vec<&str> = command
            .strip_prefix("$ endodyn ")
            .unwrap()
            .split_whitespace()
            .collect();
        if args[0] == "verify" {
            continue;
        }
        let o = endodyn(&args);
        assert_eq!(stdout(&o), expected, "{command}");
        checked += 1;
    }
    assert_eq!(checked, 4);
}
