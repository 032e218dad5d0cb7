//! Rotation field on Enneper's surface: P1 recovers it to rounding error on any mesh.

use killing::analysis::{Experiment, Resolution};
use killing::fem::{ElementOrder, Problem};
use killing::geometry::catalog;

fn main() -> killing::Result<()> {
    for count in [100, 200, 400] {
        let run = Experiment::new(catalog::enneper(), Problem::Killing, ElementOrder::P1, Resolution::Triangles(count)).run()?;
        let e = &run.errors[0];
        println!(
            "{:4} triangles  λ₁ = {:9.2e}  L² = {:9.2e}  H¹ = {:9.2e}  λ₂ = {:.4}",
            run.ntri, e.eigenvalue, e.l2_rel, e.h1_rel, run.spectrum.eigenvalues[1]
        );
    }
    Ok(())
}
