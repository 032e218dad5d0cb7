//! Conformal Killing fields of the torus: a two-dimensional near-zero eigenspace spanned
//! by the rotation and its quarter turn.

use killing::analysis::{Experiment, Resolution};
use killing::fem::{ElementOrder, Problem};
use killing::geometry::catalog;

fn main() -> killing::Result<()> {
    let run = Experiment::new(catalog::standard_torus(), Problem::Conformal, ElementOrder::P2, Resolution::Grid(24)).run()?;
    println!("eigenvalues {}", run.spectrum.eigenvalues.iter().map(|l| format!("{l:.3e}")).collect::<Vec<_>>().join(" "));
    println!("zero modes {} (gap ratio {:.1e})", run.zero.count(), run.zero.gap.unwrap_or(f64::NAN));
    for e in &run.errors {
        println!("{:18} L² {:.2e}  H¹ {:.2e}", e.name, e.l2_rel, e.h1_rel);
    }
    Ok(())
}
