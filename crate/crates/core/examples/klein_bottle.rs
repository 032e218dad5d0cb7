//! Klein bottle: the rotation survives the flipped gluing, the rotated rotation does not.

use killing::analysis::{Experiment, Resolution};
use killing::fem::{ElementOrder, Problem};
use killing::geometry::catalog;

fn main() -> killing::Result<()> {
    for problem in [Problem::Killing, Problem::Conformal] {
        for adapt in [false, true] {
            let run = Experiment::new(catalog::klein_bottle(), problem, ElementOrder::P1, Resolution::Triangles(2000))
                .adapted(adapt)
                .run()?;
            println!("{problem:?} adapt = {adapt}: {} triangles, zero modes {}", run.ntri, run.zero.count());
            println!("  spectrum {}", run.spectrum.eigenvalues.iter().map(|l| format!("{l:.3e}")).collect::<Vec<_>>().join(" "));
            for e in &run.errors {
                println!("  {:18} L² {:.2e}", e.name, e.l2_rel);
            }
        }
    }
    Ok(())
}
