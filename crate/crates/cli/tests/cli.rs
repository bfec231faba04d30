use std::path::Path;
use std::process::{Command, Output};

use minkowski::{Gauge, GaugeSpec};
use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use serde_json::Value;

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_minkowski"))
        .current_dir(dir)
        .args(args)
        .output()
        .unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

fn join(v: &Value) -> String {
    v.as_array()
        .unwrap()
        .iter()
        .map(|x| format!("{:e}", x.as_f64().unwrap()))
        .collect::<Vec<_>>()
        .join(",")
}

fn triangle_file(dir: &Path) {
    let spec = GaugeSpec::vertices(2, vec![vec![1.0, 0.0], vec![0.0, 1.0], vec![-1.0, -1.0]]);
    std::fs::write(dir.join("triangle.json"), spec.to_json()).unwrap();
}

#[test]
fn eval_builtin() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["eval", "--gauge", "builtin:linf", "--point", "3,-4"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["value"], 4.0);
    let out = run(dir.path(), &["eval", "--gauge", "builtin:l1", "--point", "3,-4"]);
    assert_eq!(json(&out)["value"], 7.0);
}

#[test]
fn eval_reverse_triangle() {
    let dir = tempfile::tempdir().unwrap();
    triangle_file(dir.path());
    let out = run(dir.path(), &["eval", "--gauge", "triangle.json", "--point", "1,0", "--reverse"]);
    assert_eq!(json(&out)["value"], 2.0);
}

#[test]
fn malformed_input_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("bad.json"), "{\"kind\": \"vertices\", \"dim\": 2,").unwrap();
    let out = run(dir.path(), &["eval", "--gauge", "bad.json", "--point", "1,0"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line"));
    assert_eq!(run(dir.path(), &["eval", "--point", "1,0"]).status.code(), Some(2));
    assert_eq!(run(dir.path(), &["eval", "--gauge", "builtin:nope", "--point", "1,0"]).status.code(), Some(2));
    assert_eq!(run(dir.path(), &["eval", "--gauge", "builtin:l1", "--point", "1,x"]).status.code(), Some(2));
}

#[test]
fn witness_on_a_norm_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["witness", "--gauge", "builtin:euclidean"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(out.stdout.is_empty());
}

#[test]
fn witness_line_is_not_coproximinal() {
    let dir = tempfile::tempdir().unwrap();
    triangle_file(dir.path());
    let out = run(dir.path(), &["witness", "--gauge", "triangle.json", "--emit-gauge", "emitted.json"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let w = json(&out);
    assert_eq!(w["verification"]["passed"], true);
    let k = &w["witness"]["K"];
    let flat = format!("base={};dir={}", join(&k["base"]), join(&k["directions"][0]));
    let point = join(&w["witness"]["target"]);
    let out = run(dir.path(), &["coapprox", "--gauge", "triangle.json", "--flat", &flat, "--point", &point]);
    assert_eq!(out.status.code(), Some(0));
    let c = json(&out);
    assert_eq!(c["status"], "empty");
    assert!(c["lower_bound"].as_f64().unwrap() > 0.0);

    let original = Gauge::from_spec(&GaugeSpec::vertices(2, vec![vec![1.0, 0.0], vec![0.0, 1.0], vec![-1.0, -1.0]])).unwrap();
    let text = std::fs::read_to_string(dir.path().join("emitted.json")).unwrap();
    let emitted = Gauge::from_spec(&GaugeSpec::from_json(&text).unwrap()).unwrap();
    let mut rng = rand::rngs::StdRng::seed_from_u64(5);
    for _ in 0..200 {
        let x = DVector::from_fn(2, |_, _| rng.gen_range(-5.0..5.0));
        assert!((original.value(&x) - emitted.value(&x)).abs() <= 1e-12);
    }
}

#[test]
fn euclidean_bisector_is_one_polyline() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(
        dir.path(),
        &[
            "bisector", "--gauge", "builtin:euclidean", "--x", "-1,0", "--y", "1,0.5",
            "--resolution", "80,80", "--svg", "b.svg", "--csv", "b.csv",
        ],
    );
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["contours"], 1);
    let svg = std::fs::read_to_string(dir.path().join("b.svg")).unwrap();
    assert_eq!(svg.matches("<polyline").count(), 1);
    let csv = std::fs::read_to_string(dir.path().join("b.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 80 * 80);
}

#[test]
fn verify_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("suites.json"),
        r#"{"lines": {"random": 1, "lines_per_gauge": 3}, "witnesses": {"random": 2},
            "extensions": {"random": 0}, "planes": {"planes": 2, "search": []}}"#,
    )
    .unwrap();
    let args = ["verify", "--config", "suites.json", "--seed", "3"];
    let (a, b) = (run(dir.path(), &args), run(dir.path(), &args));
    assert_eq!(a.status.code(), Some(0), "{}", String::from_utf8_lossy(&a.stderr));
    assert_eq!(a.stdout, b.stdout);
    let text = run(dir.path(), &["verify", "--config", "suites.json", "--seed", "3", "--format", "text"]);
    assert_eq!(text.status.code(), Some(0));
    assert!(!text.stdout.is_empty());
}
