use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_sweeptopo"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn ok(args: &[&str]) -> Output {
    let out = run(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    out
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn box_steps_report_no_interior_critical_points() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let (mesh, bc, field) = (d.join("box.vtk"), d.join("bc.json"), d.join("f.txt"));
    ok(&["generate", "--kind", "box", "--n", "4", "--nz", "4", "--mesh", s(&mesh), "--boundary", s(&bc), "--report", s(&d.join("gen.json"))]);
    ok(&["solve", "--mesh", s(&mesh), "--boundary", s(&bc), "--weights", "uniform", "--field", s(&field), "--report", s(&d.join("solve.json"))]);
    ok(&["classify", "--mesh", s(&mesh), "--field", s(&field), "--report", s(&d.join("classify.json"))]);

    let c = json(&d.join("classify.json"));
    assert_eq!(c["schema"], "sweeptopo.run/1");
    assert_eq!(c["classify"]["critical"].as_array().unwrap().len(), 0);
    assert!(c["manifest"]["input_mesh"]["sha256"].as_str().unwrap().len() == 64);

    let solve = json(&d.join("solve.json"));
    assert_eq!(solve["solve"]["max_principle"]["violations"].as_array().unwrap().len(), 0);
    assert_eq!(solve["manifest"]["weight_scheme"], "uniform");

    // Merge the two reports' sections the way a pipeline run would.
    let mut merged = solve.clone();
    merged["classify"] = c["classify"].clone();
    let path = d.join("merged.json");
    std::fs::write(&path, serde_json::to_string(&merged).unwrap()).unwrap();
    let text = String::from_utf8(ok(&["report", s(&path)]).stdout).unwrap();
    assert!(text.contains("no interior critical points; maximum principle: holds"), "{text}");
}

#[test]
fn counterexample_pipeline_finds_the_cancelling_pair() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    ok(&["pipeline", "--config", s(&configs().join("counterexample.toml")), "--out-dir", s(&out)]);
    let r = json(&out.join("run.json"));
    let critical = r["classify"]["critical"].as_array().unwrap();
    let kinds: Vec<&str> = critical.iter().map(|c| c["kind"].as_str().unwrap()).collect();
    assert_eq!(kinds, ["1-saddle", "2-saddle"]);
    assert_eq!(r["transitions"]["net_delta"], serde_json::json!([0, 0, 0]));
    let deltas: Vec<&Value> = r["transitions"]["transitions"].as_array().unwrap().iter().map(|t| &t["delta"]).collect();
    assert_eq!(deltas, [&serde_json::json!([0, 2, 0]), &serde_json::json!([0, -2, 0])]);
    assert!(r["trace"]["census"]["merged_pairs"].as_array().unwrap().len() + r["trace"]["census"]["counts"]["stalled_at_saddle"].as_u64().unwrap() as usize > 0);

    let summary = std::fs::read_to_string(out.join("summary.txt")).unwrap();
    assert!(summary.contains("a=mid-gap: β=(1,2,0)"), "{summary}");
    assert!(out.join("levelset-mid-gap.obj").exists());
    assert!(out.join("traces.obj").exists());
}

#[test]
fn pipeline_runs_are_byte_identical_and_verifiable() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    let cfg = configs().join("box.toml");
    ok(&["pipeline", "--config", s(&cfg), "--out-dir", s(&a)]);
    ok(&["pipeline", "--config", s(&cfg), "--out-dir", s(&b)]);
    for name in ["run.json", "summary.txt", "field.txt", "mesh.vtk", "traces.obj"] {
        assert_eq!(std::fs::read(a.join(name)).unwrap(), std::fs::read(b.join(name)).unwrap(), "{name}");
    }
    let summary = std::fs::read_to_string(a.join("summary.txt")).unwrap();
    assert!(summary.contains("merged pairs 0"), "{summary}");

    let rendered = ok(&["report", "--verify", s(&a.join("run.json"))]).stdout;
    assert_eq!(rendered, std::fs::read(a.join("summary.txt")).unwrap());

    std::fs::write(a.join("field.txt"), "0\n").unwrap();
    let out = run(&["report", "--verify", s(&a.join("run.json"))]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("field"));
}

#[test]
fn missing_mesh_is_an_input_error() {
    let out = run(&["classify", "--mesh", "/nonexistent/m.vtk", "--field", "/nonexistent/f.txt"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("stage input"));
}

#[test]
fn malformed_config_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    std::fs::write(&cfg, "[mesh]\ngenerate = \"box\"\nfile = \"m.vtk\"\n").unwrap();
    let out = run(&["pipeline", "--config", s(&cfg), "--out-dir", s(&dir.path().join("o"))]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("stage config"));

    std::fs::write(&cfg, "[mesh]\ngenerate = \"box\"\n[trace]\nstarts = \"grid 0x3\"\n").unwrap();
    assert_eq!(run(&["pipeline", "--config", s(&cfg), "--out-dir", s(&dir.path().join("o"))]).status.code(), Some(2));

    // clap reports its own usage errors with status 2.
    assert_eq!(run(&["solve", "--weights", "harmonic"]).status.code(), Some(2));
}

#[test]
fn negative_cotangent_weights_are_annotated() {
    // One flat-ish tetrahedron: the dihedral angle at edge 0-1 is obtuse,
    // which makes the weight of the opposite edge 2-3 negative.
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let mesh = d.join("sliver.mesh");
    std::fs::write(&mesh, "4 1\n0 0 0\n1 0 0\n0.5 0.8 0.1\n0.5 -0.8 0.1\n0 1 2 3\n").unwrap();
    let bc = d.join("bc.json");
    std::fs::write(&bc, "{\"gamma0\": [0], \"gamma1\": [1]}").unwrap();
    let report = d.join("r.json");
    ok(&["solve", "--mesh", s(&mesh), "--boundary", s(&bc), "--weights", "cotangent", "--field", s(&d.join("f.txt")), "--report", s(&report)]);
    let r = json(&report);
    assert!(r["solve"]["negative_weights"].as_u64().unwrap() > 0);
    let text = String::from_utf8(ok(&["report", s(&report)]).stdout).unwrap();
    assert!(text.contains("scheme not guaranteed positive"), "{text}");
}

#[test]
fn degenerate_saddle_fails_the_transition_check() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let (mesh, bc) = (d.join("m.mesh"), d.join("bc.json"));
    ok(&["generate", "--kind", "box", "--n", "4", "--nz", "4", "--mesh", s(&mesh), "--boundary", s(&bc), "--report", s(&d.join("g.json"))]);
    // Centre vertex at 0 with three isolated lower neighbours at -1.
    let idx = |i: usize, j: usize, k: usize| i + 5 * (j + 5 * k);
    let mut values = vec![1.0; 125];
    values[idx(2, 2, 2)] = 0.0;
    for (i, j, k) in [(3, 2, 2), (2, 3, 2), (2, 2, 3)] {
        values[idx(i, j, k)] = -1.0;
    }
    let field = d.join("f.txt");
    std::fs::write(&field, values.iter().map(|v| format!("{v}\n")).collect::<String>()).unwrap();
    let report = d.join("t.json");
    let out = run(&["transitions", "--mesh", s(&mesh), "--field", s(&field), "--report", s(&report)]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("stage transitions"));
    let r = json(&report);
    assert_eq!(r["transitions"]["transitions"][0]["pattern"], Value::Null);
    let text = String::from_utf8(ok(&["report", s(&report)]).stdout).unwrap();
    assert!(text.contains("PATTERN MISMATCH"));
}

#[test]
fn box_traces_report_base_parameters() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let (mesh, bc, field) = (d.join("m.vtk"), d.join("bc.json"), d.join("f.txt"));
    ok(&["generate", "--kind", "box", "--n", "4", "--nz", "4", "--mesh", s(&mesh), "--boundary", s(&bc), "--report", s(&d.join("g.json"))]);
    ok(&["solve", "--mesh", s(&mesh), "--boundary", s(&bc), "--weights", "cotangent", "--field", s(&field), "--report", s(&d.join("s.json"))]);
    let out = ok(&["trace", "--mesh", s(&mesh), "--boundary", s(&bc), "--field", s(&field), "--starts", "grid 2x2", "--box-parameters", "--paths", s(&d.join("p.obj"))]);
    let r: Value = serde_json::from_slice(&out.stdout).unwrap();
    let params = r["trace"]["box_parameters"].as_array().unwrap();
    assert_eq!(params.len(), 4);
    let first: Vec<f64> = params[0].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect();
    assert!((first[0] - 0.25).abs() < 1e-8 && (first[1] - 0.25).abs() < 1e-8 && (first[2] - 1.0).abs() < 1e-8, "{first:?}");
    assert!(r["manifest"]["outputs"]["traces"]["sha256"].is_string());
}
