use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn infoorder(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_infoorder"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn payload(out: &Output) -> Value {
    let doc: Value = serde_json::from_slice(&out.stdout).expect("json on stdout");
    doc["payload"].clone()
}

fn write_poset(dir: &Path, name: &str, elements: &[String], covers: &[(String, String)]) -> String {
    let covers: Vec<[&str; 2]> = covers
        .iter()
        .map(|(a, b)| [a.as_str(), b.as_str()])
        .collect();
    let doc = serde_json::json!({ "elements": elements, "covers": covers });
    let path = dir.join(name);
    fs::write(&path, doc.to_string()).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn malformed_flags_exit_with_config_code() {
    assert_eq!(
        infoorder(&["--trials", "many", "axioms"]).status.code(),
        Some(2)
    );
    assert_eq!(infoorder(&["nosuchcommand"]).status.code(), Some(2));
    assert_eq!(
        infoorder(&["--trials", "0", "qubit", "--axes", "z"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn unreadable_or_cyclic_input_exits_with_input_code() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("missing.json");
    let out = infoorder(&["poset", missing.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(
        infoorder(&["boxes", "--n", "3", "--ball", "7"])
            .status
            .code(),
        Some(3)
    );
    assert_eq!(
        infoorder(&["boxes", "--order", "0,0,1"]).status.code(),
        Some(3)
    );
    assert_eq!(infoorder(&["qubit", "--axes", "q"]).status.code(), Some(3));

    let labels: Vec<String> = ["a", "b"].iter().map(|s| s.to_string()).collect();
    let cyclic = write_poset(
        dir.path(),
        "cycle.json",
        &labels,
        &[("a".into(), "b".into()), ("b".into(), "a".into())],
    );
    let out = infoorder(&["poset", &cyclic]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("cycle"));
}

#[test]
fn oversized_poset_exits_with_resource_code() {
    let dir = tempfile::tempdir().unwrap();
    let labels: Vec<String> = (0..16).map(|i| format!("p{i}")).collect();
    // Sixteen pairwise incomparable elements.
    let path = write_poset(dir.path(), "wide.json", &labels, &[]);
    assert_eq!(infoorder(&["poset", &path]).status.code(), Some(4));

    let small = write_poset(dir.path(), "small.json", &labels[..15], &[]);
    assert_eq!(infoorder(&["poset", &small]).status.code(), Some(0));
}

#[test]
fn poset_report_and_dot_export() {
    let dir = tempfile::tempdir().unwrap();
    let labels: Vec<String> = ["bot", "x", "y", "top"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    let covers = [("bot", "x"), ("bot", "y"), ("x", "top"), ("y", "top")]
        .map(|(a, b)| (a.to_string(), b.to_string()));
    let path = write_poset(dir.path(), "diamond.json", &labels, &covers);
    let dot = dir.path().join("diamond.dot");
    let out = infoorder(&["poset", &path, "--dot", dot.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let p = payload(&out);
    assert_eq!(p["report"]["is_dcpo"], true);
    assert_eq!(p["report"]["maximal_elements"], serde_json::json!(["top"]));
    assert_eq!(p["report"]["proposition1_holds"], true);

    let dot = fs::read_to_string(dot).unwrap();
    assert!(dot.starts_with("digraph"));
    for edge in [
        "\"x\" -> \"bot\"",
        "\"y\" -> \"bot\"",
        "\"top\" -> \"x\"",
        "\"top\" -> \"y\"",
    ] {
        assert!(dot.contains(edge), "missing {edge} in\n{dot}");
    }
    assert!(!dot.contains("\"top\" -> \"bot\""), "transitive edge kept");
}

#[test]
fn out_file_matches_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("boxes.csv");
    let out = infoorder(&[
        "--format",
        "csv",
        "--out",
        target.to_str().unwrap(),
        "boxes",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let written = fs::read(&target).unwrap();
    assert_eq!(written, out.stdout);
    let text = String::from_utf8(written).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(
        lines[0],
        "step,box_or_axis,outcome,entropy_bits,state_components"
    );
    assert_eq!(lines.len(), 4);
}

#[test]
fn unwritable_out_path_fails() {
    let out = infoorder(&[
        "--out",
        "/nonexistent-dir/x/result.json",
        "context",
        "z",
        "x",
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn context_accepts_basis_files() {
    let dir = tempfile::tempdir().unwrap();
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let basis = serde_json::json!({ "columns": [[[h, 0.0], [h, 0.0]], [[h, 0.0], [-h, 0.0]]] });
    let path = dir.path().join("hadamard.json");
    fs::write(&path, basis.to_string()).unwrap();
    let out = infoorder(&["context", "z", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(payload(&out)["report"]["classification"], "OrthogonalBases");

    fs::write(
        &path,
        r#"{ "columns": [[[1, 0], [0, 0]], [[1, 0], [0, 0]]] }"#,
    )
    .unwrap();
    assert_eq!(
        infoorder(&["context", "z", path.to_str().unwrap()])
            .status
            .code(),
        Some(3)
    );
}

#[test]
fn qubit_payload_shape() {
    let out = infoorder(&[
        "--trials", "2000", "--seed", "5", "qubit", "--axes", "z,x,z,x",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let p = payload(&out);
    let h: Vec<f64> = p["aggregate"]["per_step_entropy_bits"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_f64().unwrap())
        .collect();
    assert_eq!(h, [0.0, 1.0, 1.0, 1.0]);
}

#[test]
fn negative_axes_are_accepted() {
    let out = infoorder(&["context", "-z", "z"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(
        payload(&out)["report"]["classification"],
        "IdenticalContext"
    );

    let out = infoorder(&["--trials", "10", "qubit", "--input", "-z", "--axes=-z,x"]);
    assert_eq!(out.status.code(), Some(0));
    let h = &payload(&out)["aggregate"]["per_step_entropy_bits"];
    assert_eq!(h, &serde_json::json!([0.0, 1.0]));
}
