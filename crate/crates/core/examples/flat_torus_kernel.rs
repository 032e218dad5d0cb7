use killing::analysis::{Experiment, Resolution};
use killing::fem::{ElementOrder, Problem};
use killing::geometry::catalog;

fn main() -> killing::Result<()> {
    let run = Experiment::new(catalog::flat_torus(), Problem::Killing, ElementOrder::P1, Resolution::Grid(16)).run()?;
    println!("eigenvalues {}", run.spectrum.eigenvalues.iter().map(|l| format!("{l:.3e}")).collect::<Vec<_>>().join(" "));
    println!("translations found: {}", run.zero.count());
    Ok(())
}
