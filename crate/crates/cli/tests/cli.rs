use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn qthermo(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qthermo"))
        .args(args)
        .output()
        .unwrap()
}

fn write_config(dir: &Path, body: &str) -> String {
    let path = dir.join("config.json");
    fs::write(&path, body).unwrap();
    path.to_string_lossy().into_owned()
}

fn read_csv(path: &Path) -> (Vec<String>, Vec<Vec<f64>>) {
    let mut reader = csv::Reader::from_path(path).unwrap();
    let header = reader.headers().unwrap().iter().map(String::from).collect();
    let rows = reader
        .records()
        .map(|r| r.unwrap().iter().map(|x| x.parse().unwrap()).collect())
        .collect();
    (header, rows)
}

#[test]
fn bad_config_exits_with_two_and_names_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        r#"{"scenario": "replicator",
            "replicator": {"n0": 3, "gamma_up": 0.2, "gamma_down": 0.4,
                           "t_max": 1.0, "steps": 4, "trajectories": 10, "bogus": 1}}"#,
    );
    let out = dir.path().join("out");
    let result = qthermo(&["run", &cfg, "--out", out.to_str().unwrap()]);
    assert_eq!(result.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&result.stderr);
    assert!(stderr.contains("replicator"), "{stderr}");
    assert!(stderr.contains("bogus"), "{stderr}");
    assert!(!out.exists());
}

#[test]
fn unknown_scenario_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), r#"{"scenario": "teleport"}"#);
    let result = qthermo(&["run", &cfg, "--out", dir.path().join("o").to_str().unwrap()]);
    assert_eq!(result.status.code(), Some(2));
}

#[test]
fn pv_sweep_crosses_near_open_circuit_voltage() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        r#"{"scenario": "pv-sweep",
            "pv_sweep": {"cell": {
                "conduction_energies": [1.0], "valence_energies": [-1.0],
                "beta": 1.0, "beta_photon": 0.3,
                "intra_conduction": [[0.0]], "intra_valence": [[0.0]],
                "inter": [[0.01]], "mu_c": 0.0, "mu_v": 0.0,
                "amplitude": 0.1, "frequency": 1.0}}}"#,
    );
    let out = dir.path().join("out");
    let result = qthermo(&["run", &cfg, "--out", out.to_str().unwrap()]);
    assert!(result.status.success(), "{}", String::from_utf8_lossy(&result.stderr));
    let (header, rows) = read_csv(&out.join("pv_curve.csv"));
    assert_eq!(header, ["V", "p_analytic", "p_numeric"]);
    assert_eq!(rows.len(), 25);
    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap();
    let v_oc = manifest["extras"]["v_oc"].as_f64().unwrap();
    assert!((v_oc - 1.4).abs() < 1e-12);
    let crossing = rows
        .windows(2)
        .find(|w| w[0][1] > 0.0 && w[1][1] <= 0.0)
        .map(|w| (w[0][0], w[1][0]))
        .unwrap();
    assert!(crossing.0 <= v_oc + 1e-12 && v_oc <= crossing.1 + 1e-12);
}

#[test]
fn frozen_replicator_keeps_its_population() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        r#"{"scenario": "replicator",
            "replicator": {"n0": 7, "gamma_up": 0.0, "gamma_down": 0.0,
                           "t_max": 2.0, "steps": 4, "trajectories": 50}}"#,
    );
    let out = dir.path().join("out");
    assert!(qthermo(&["run", &cfg, "--out", out.to_str().unwrap()]).status.success());
    let (_, rows) = read_csv(&out.join("repl_stats.csv"));
    for row in rows {
        assert_eq!(row[1], 7.0);
        assert_eq!(row[3], 7.0);
        assert_eq!(row[5], 0.0);
    }
}

#[test]
fn seed_flag_and_overrides_take_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        r#"{"scenario": "replicator", "seed": 1,
            "replicator": {"n0": 3, "gamma_up": 0.3, "gamma_down": 0.2,
                           "t_max": 2.0, "steps": 4, "trajectories": 200}}"#,
    );
    let out = dir.path().join("out");
    let result = qthermo(&[
        "run",
        &cfg,
        "--out",
        out.to_str().unwrap(),
        "--seed",
        "42",
        "--override",
        "replicator.trajectories=300",
        "--override",
        "seed=9",
    ]);
    assert!(result.status.success(), "{}", String::from_utf8_lossy(&result.stderr));
    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["config"]["seed"], 42);
    assert_eq!(manifest["config"]["replicator"]["trajectories"], 300);
}

#[test]
fn evolve_writes_law_residual_columns() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        r#"{"scenario": "evolve",
            "evolve": {"model": {
                "energies": [0.0, 1.0], "drive": [0.0, 1.0], "amplitude": 0.2, "frequency": 2.0,
                "baths": [
                    {"label": "hot", "beta": 0.2, "transitions": [{"lower": 0, "upper": 1, "rate": 0.6}]},
                    {"label": "cold", "beta": 2.0, "transitions": [{"lower": 0, "upper": 1, "rate": 1.0}]}
                ]},
                "initial_populations": [0.9, 0.1], "t_max": 1.0, "steps": 200}}"#,
    );
    let out = dir.path().join("out");
    let result = qthermo(&["run", &cfg, "--out", out.to_str().unwrap()]);
    assert!(result.status.success(), "{}", String::from_utf8_lossy(&result.stderr));
    let (header, rows) = read_csv(&out.join("thermo_trace.csv"));
    assert_eq!(
        header,
        ["t", "U", "P", "J_hot", "J_cold", "S", "sigma", "first_law_residual", "second_law_residual"]
    );
    assert_eq!(rows.len(), 201);
    assert!(rows.iter().all(|r| r[7].abs() < 1e-4 && r[6] >= -1e-10));
}

#[test]
fn missing_manifest_is_an_io_error() {
    let dir = tempfile::tempdir().unwrap();
    let result = qthermo(&[
        "replay",
        dir.path().join("nope.json").to_str().unwrap(),
        "--out",
        dir.path().join("o").to_str().unwrap(),
    ]);
    assert_eq!(result.status.code(), Some(1));
}
