use std::path::Path;

use killing::cli::{run, ExperimentConfig};
use killing::mesh::{io, Triangulation};
use killing::geometry::catalog;
use serde_json::Value;

fn solve(dir: &Path, extra: &[&str]) -> i32 {
    let mut args = vec!["killing", "solve", "--outputs", dir.to_str().unwrap()];
    args.extend_from_slice(extra);
    run(args)
}

fn report(dir: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(dir.join("report.json")).unwrap()).unwrap()
}

#[test]
fn zero_mode_counts_match_known_dimensions() {
    let tmp = tempfile::tempdir().unwrap();
    let cases = [
        (["--manifold", "standard_torus", "--problem", "K"], 1),
        (["--manifold", "standard_torus", "--problem", "CK"], 2),
        (["--manifold", "flat_torus", "--problem", "K"], 2),
    ];
    for (i, (args, expect)) in cases.iter().enumerate() {
        let dir = tmp.path().join(i.to_string());
        let mut all = args.to_vec();
        all.extend(["--element", "P2", "--n", "10"]);
        assert_eq!(solve(&dir, &all), 0);
        let r = report(&dir);
        assert_eq!(r["zero_mode_count"], *expect, "{args:?}");
        assert_eq!(r["eigenvalues"].as_array().unwrap().len(), 6);
        assert!(dir.join("spectrum.csv").exists() && dir.join("fields.vtk").exists());
    }
}

#[test]
fn same_seed_gives_identical_outputs() {
    let tmp = tempfile::tempdir().unwrap();
    let args = ["--manifold", "klein_bottle", "--problem", "CK", "--element", "P1", "--n", "12", "--seed", "7"];
    assert_eq!(solve(&tmp.path().join("a"), &args), 0);
    assert_eq!(solve(&tmp.path().join("b"), &args), 0);
    for f in ["report.json", "spectrum.csv", "fields.vtk"] {
        assert_eq!(std::fs::read(tmp.path().join("a").join(f)).unwrap(), std::fs::read(tmp.path().join("b").join(f)).unwrap(), "{f}");
    }
}

#[test]
fn config_file_with_flag_override() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("c.json");
    std::fs::write(&cfg, r#"{"manifold": "flat_torus", "element": "P1", "n": 6, "eigen": {"k": 4}}"#).unwrap();
    let out = tmp.path().join("out");
    let code = run(["killing", "solve", "--config", cfg.to_str().unwrap(), "--n", "8", "--outputs", out.to_str().unwrap()]);
    assert_eq!(code, 0);
    let r = report(&out);
    assert_eq!(r["ntri"], 128);
    assert_eq!(r["solver"]["k"], 4);
}

#[test]
fn misspelled_key_fails_before_computing() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("c.json");
    std::fs::write(&cfg, r#"{"manifold": "flat_torus", "elemnt": "P1"}"#).unwrap();
    let out = tmp.path().join("out");
    assert_eq!(run(["killing", "solve", "--config", cfg.to_str().unwrap(), "--outputs", out.to_str().unwrap()]), 2);
    assert!(!out.exists());
    assert_eq!(run(["killing", "solve", "--manifold", "sphere"]), 2);
    assert_eq!(run(["killing", "frobnicate"]), 2);
}

#[test]
fn invalid_mesh_is_a_numerical_failure() {
    let tmp = tempfile::tempdir().unwrap();
    let m = catalog::flat_torus();
    let mut mesh = Triangulation::structured(&m.chart, 4).unwrap();
    mesh.triangles[0].swap(1, 2);
    let file = tmp.path().join("bad.mesh");
    io::write(&mesh, &file).unwrap();
    let code = run([
        "killing", "export", "--manifold", "flat_torus", "--mesh-file", file.to_str().unwrap(), "--outputs",
        tmp.path().to_str().unwrap(),
    ]);
    assert_eq!(code, 3);
}

#[test]
fn convergence_writes_both_tables() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path();
    let code = run([
        "killing", "convergence", "--manifold", "standard_torus", "--problem", "CK", "--element", "P2", "--resolutions",
        "4,6,8,10,12", "--outputs", out.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    let csv = std::fs::read_to_string(out.join("convergence.csv")).unwrap();
    assert!(csv.starts_with("h,ntri,eigenvalue,l2_rel,h1_rel\n"));
    assert_eq!(csv.lines().count(), 6);
    let orders = std::fs::read_to_string(out.join("orders.csv")).unwrap();
    let l2: f64 = orders.lines().find(|l| l.starts_with("l2_rel")).unwrap().split(',').nth(1).unwrap().parse().unwrap();
    assert!(l2 > 2.5, "{orders}");
    assert!(out.join("convergence_rotation.csv").exists());
    assert_eq!(run(["killing", "convergence", "--resolutions", "4,6"]), 2);
}

#[test]
fn mesh_and_export_commands() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path();
    assert_eq!(run(["killing", "mesh", "--manifold", "enneper", "--target-h", "0.3", "--adapt", "--outputs", out.to_str().unwrap()]), 0);
    let mesh = io::read(out.join("mesh.txt")).unwrap();
    mesh.validate().unwrap();
    let code = run([
        "killing", "export", "--manifold", "enneper", "--element", "P2", "--mesh-file", out.join("mesh.txt").to_str().unwrap(),
        "--modes", "2", "--outputs", out.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    let vtk = std::fs::read_to_string(out.join("export.vtk")).unwrap();
    let cells: usize = vtk.lines().find(|l| l.starts_with("CELLS")).unwrap().split(' ').nth(1).unwrap().parse().unwrap();
    assert_eq!(cells, 4 * mesh.n_triangles());
    assert_eq!(vtk.matches("VECTORS").count(), 3);
}

#[test]
fn default_config_round_trips() {
    let c = ExperimentConfig::default();
    let text = serde_json::to_string(&c).unwrap();
    assert_eq!(ExperimentConfig::from_json(&text).unwrap(), c);
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_killing");
    let tmp = tempfile::tempdir().unwrap();
    let ok = std::process::Command::new(bin)
        .args(["solve", "--manifold", "flat_torus", "--element", "P1", "--n", "6", "--threads", "2", "--outputs"])
        .arg(tmp.path())
        .output()
        .unwrap();
    assert!(ok.status.success());
    let bad = std::process::Command::new(bin).args(["solve", "--problem", "XK"]).output().unwrap();
    assert_eq!(bad.status.code(), Some(2));
}
