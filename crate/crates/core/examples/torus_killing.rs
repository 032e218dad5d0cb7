//! The rotation of the standard torus, with and without metric-driven adaptation.

use killing::analysis::{Experiment, Resolution};
use killing::fem::{ElementOrder, Problem};
use killing::geometry::catalog;

fn main() -> killing::Result<()> {
    for adapt in [false, true] {
        let e = Experiment::new(catalog::standard_torus(), Problem::Killing, ElementOrder::P2, Resolution::Triangles(2000))
            .adapted(adapt);
        let run = e.run()?;
        let err = &run.errors[0];
        println!("adapt = {adapt}: {} triangles, edge ratio {:.2}", run.ntri, run.edge_ratio);
        println!("  spectrum {}", run.spectrum.eigenvalues.iter().map(|l| format!("{l:.3e}")).collect::<Vec<_>>().join(" "));
        println!("  zero modes {}, L² {:.2e}, H¹ {:.2e}", run.zero.count(), err.l2_rel, err.h1_rel);
    }
    Ok(())
}
