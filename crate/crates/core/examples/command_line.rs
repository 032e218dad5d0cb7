//! The `killing` command driven in-process: solve, then read back the report.

fn main() {
    let dir = std::env::temp_dir().join("killing-cli-example");
    let code = killing::cli::run([
        "killing", "solve", "--manifold", "flat_torus", "--problem", "K", "--element", "P1", "--n", "12", "--outputs",
        dir.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    let report: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(dir.join("report.json")).unwrap()).unwrap();
    println!("zero_mode_count = {}", report["zero_mode_count"]);
    println!("magnitudes = {}", report["magnitudes"]);
}
