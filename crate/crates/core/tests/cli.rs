//! End-to-end runs of the `stationary-discs` binary: every subcommand, the
//! report fields downstream tooling keys on, and each documented exit code.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_stationary-discs"))
}

fn write(dir: &Path, name: &str, content: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, content).unwrap();
    path
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("process was signalled")
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!(
            "stdout is not JSON ({e}): {}",
            String::from_utf8_lossy(&out.stdout)
        )
    })
}

const REFERENCE: &str = r#"
[model]
d = [4, 6]
k = [2, 3]
p1 = [[2, "1", "0"]]
p2 = [[3, "1", "0"]]

[lift]
c = ["1/2", "1/3"]
"#;

#[test]
fn analyze_reproduces_the_reference_integers() {
    let dir = tempfile::tempdir().unwrap();
    let config = write(dir.path(), "ref.toml", REFERENCE);
    let out = bin().args(["analyze", "--config"]).arg(&config).output().unwrap();
    assert_eq!(code(&out), 0, "stderr: {}", String::from_utf8_lossy(&out.stderr));

    let r = stdout_json(&out);
    assert_eq!(r["schema_version"], 1);
    assert_eq!(r["partial_indices"]["middle"], serde_json::json!([4, 4, 5, 5]));
    assert_eq!(
        r["partial_indices"]["full"],
        serde_json::json!([0, 0, 4, 4, 5, 5, 6, 6])
    );
    assert_eq!(r["det_winding"], 18);
    assert_eq!(r["maslov_index"], 30);
    assert_eq!(r["index_formula"]["value"], 30);
    assert_eq!(r["kernel_dimension"], 20);
    assert_eq!(r["solvability"]["surjective"], true);
    assert_eq!(r["equations"]["block_upper"], true);
}

#[test]
fn invalid_band_is_a_validation_error() {
    let dir = tempfile::tempdir().unwrap();
    let config = write(dir.path(), "bad.toml", &REFERENCE.replace("k = [2, 3]", "k = [4, 3]"));
    let out = bin().args(["analyze", "--config"]).arg(&config).output().unwrap();
    assert_eq!(code(&out), 2);
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("model.p1"), "stderr does not name the field: {err}");
}

#[test]
fn unknown_config_keys_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let config = write(dir.path(), "typo.toml", &format!("{REFERENCE}\n[solver]\nn_nodes = 8\n"));
    let out = bin().args(["analyze", "--config"]).arg(&config).output().unwrap();
    assert_eq!(code(&out), 2);
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("n_nodes"), "stderr does not name the key: {err}");
}

#[test]
fn export_then_verify_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let config = write(dir.path(), "ref.toml", REFERENCE);
    let disc = dir.path().join("f0.json");

    let out = bin()
        .args(["export-initial", "--config"])
        .arg(&config)
        .arg("--out")
        .arg(&disc)
        .output()
        .unwrap();
    assert_eq!(code(&out), 0, "stderr: {}", String::from_utf8_lossy(&out.stderr));

    let out = bin()
        .args(["verify", "--config"])
        .arg(&config)
        .arg("--disc")
        .arg(&disc)
        .output()
        .unwrap();
    assert_eq!(code(&out), 0, "stderr: {}", String::from_utf8_lossy(&out.stderr));

    let r = stdout_json(&out);
    assert_eq!(r["pass"], true);
    assert_eq!(r["residual_linf"], 0.0);
    let c = &r["recovered_c"];
    assert!((c[0][0].as_f64().unwrap() - 0.5).abs() < 1e-12);
    assert!((c[1][0].as_f64().unwrap() - 1.0 / 3.0).abs() < 1e-12);
}

#[test]
fn corrupted_disc_fails_verification_naming_the_equation() {
    let dir = tempfile::tempdir().unwrap();
    let config = write(dir.path(), "ref.toml", REFERENCE);
    let disc = dir.path().join("f0.json");
    bin()
        .args(["export-initial", "--config"])
        .arg(&config)
        .arg("--out")
        .arg(&disc)
        .output()
        .unwrap();

    let mut doc: Value = serde_json::from_str(&std::fs::read_to_string(&disc).unwrap()).unwrap();
    let coeff = doc["components"][0][0][1].as_f64().unwrap();
    doc["components"][0][0][1] = (coeff + 0.25).into();
    std::fs::write(&disc, serde_json::to_string(&doc).unwrap()).unwrap();

    let out = bin()
        .args(["verify", "--config"])
        .arg(&config)
        .arg("--disc")
        .arg(&disc)
        .output()
        .unwrap();
    assert_eq!(code(&out), 2);
    let r = stdout_json(&out);
    assert_eq!(r["pass"], false);
    let failures = r["failures"].as_array().unwrap();
    assert!(
        failures.iter().any(|f| f.as_str().unwrap().contains("equation")),
        "failures do not name an equation: {failures:?}"
    );
}

#[test]
fn solve_continues_a_small_model_and_the_solution_verifies() {
    let dir = tempfile::tempdir().unwrap();
    let config = write(
        dir.path(),
        "small.toml",
        r#"
[model]
d = [2, 2]
k = [1, 1]
p1 = [[1, "1", "0"]]
p2 = [[1, "1", "0"]]

[lift]
c = ["1", "1"]

[perturbation]
eps = 1e-3

[[perturbation.term]]
equation = 1
re = "1/2"
im = "0"
z = [3, 0]

[[perturbation.term]]
equation = 1
re = "1/2"
im = "0"
zbar = [3, 0]
"#,
    );
    let report = dir.path().join("report.json");
    let disc = dir.path().join("sol.json");

    let out = bin()
        .args(["solve", "--config"])
        .arg(&config)
        .arg("--out")
        .arg(&report)
        .arg("--disc-out")
        .arg(&disc)
        .output()
        .unwrap();
    assert_eq!(code(&out), 0, "stderr: {}", String::from_utf8_lossy(&out.stderr));

    let r: Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(r["identity_continuation"], false);
    assert_eq!(r["eps"], 1e-3);
    assert!(r["residual_sup_refined"].as_f64().unwrap() < 1e-10);
    assert!(r["certificate"]["residual_linf"].as_f64().unwrap() < 1e-9);

    // the solution disc must pass an independent verify run against the
    // same perturbed equations
    let out = bin()
        .args(["verify", "--config"])
        .arg(&config)
        .arg("--disc")
        .arg(&disc)
        .output()
        .unwrap();
    assert_eq!(code(&out), 0, "stderr: {}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(stdout_json(&out)["pass"], true);
}

#[test]
fn zero_perturbation_is_an_identity_continuation() {
    let dir = tempfile::tempdir().unwrap();
    let config = write(dir.path(), "ref.toml", REFERENCE);
    let f0 = dir.path().join("f0.json");
    let sol = dir.path().join("sol.json");

    bin()
        .args(["export-initial", "--config"])
        .arg(&config)
        .arg("--out")
        .arg(&f0)
        .output()
        .unwrap();
    let out = bin()
        .args(["solve", "--config"])
        .arg(&config)
        .arg("--disc-out")
        .arg(&sol)
        .output()
        .unwrap();
    assert_eq!(code(&out), 0, "stderr: {}", String::from_utf8_lossy(&out.stderr));

    let r = stdout_json(&out);
    assert_eq!(r["identity_continuation"], true);
    assert_eq!(r["newton_iters"], 0);

    let a: Value = serde_json::from_str(&std::fs::read_to_string(&f0).unwrap()).unwrap();
    let b: Value = serde_json::from_str(&std::fs::read_to_string(&sol).unwrap()).unwrap();
    assert_eq!(a, b, "the zero-size continuation must return the initial disc verbatim");
}

#[test]
fn singular_symbol_exits_with_the_dedicated_code() {
    let dir = tempfile::tempdir().unwrap();
    let config = write(
        dir.path(),
        "singular.toml",
        r#"
[model]
d = [4, 6]
k = [3, 3]
p1 = [[2, "1", "0"], [3, "4/3", "0"]]
p2 = [[3, "1", "0"]]

[lift]
c = ["1/2", "1/3"]
"#,
    );
    let out = bin().args(["analyze", "--config"]).arg(&config).output().unwrap();
    assert_eq!(code(&out), 3, "stderr: {}", String::from_utf8_lossy(&out.stderr));
}
