//! Error decay on the torus, fitted as `ε ≈ C h^k`. Writes CSV files to a temp directory.

use killing::analysis::{ConvergenceStudy, Experiment, Resolution};
use killing::fem::{ElementOrder, Problem};
use killing::geometry::catalog;

fn main() -> killing::Result<()> {
    let base = Experiment::new(catalog::standard_torus(), Problem::Conformal, ElementOrder::P2, Resolution::Grid(6));
    let mut rows = Vec::new();
    for n in [6, 8, 10, 12, 14, 16, 20, 24] {
        let run = Experiment { resolution: Resolution::Grid(n), ..base.clone() }.run()?;
        rows.push(run.row(1).expect("conformal field"));
    }
    let study = ConvergenceStudy::new(rows);
    print!("{}", study.to_csv());
    print!("{}", study.orders_csv());
    let dir = std::env::temp_dir().join("killing-convergence");
    study.write(&dir)?;
    println!("written to {}", dir.display());
    Ok(())
}
