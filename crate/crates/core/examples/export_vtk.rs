//! Writes the lowest torus modes as a legacy VTK file for an external viewer.

use killing::analysis::{Experiment, Resolution};
use killing::cli::vtk;
use killing::fem::{ElementOrder, Problem};
use killing::geometry::catalog;

fn main() -> killing::Result<()> {
    let run = Experiment::new(catalog::standard_torus(), Problem::Conformal, ElementOrder::P2, Resolution::Grid(12)).run()?;
    let modes: Vec<_> = (0..run.zero.count()).map(|i| run.mode(i)).collect();
    let names: Vec<String> = (0..modes.len()).map(|i| format!("mode_{i}")).collect();
    let fields: Vec<_> = names.iter().map(String::as_str).zip(&modes).collect();
    let path = std::env::temp_dir().join("torus-modes.vtk");
    std::fs::write(&path, vtk::fields_vtk(&run.space, &fields, "torus conformal modes"))?;
    println!("{} modes on {} nodes written to {}", modes.len(), run.space.n_nodes(), path.display());
    Ok(())
}
