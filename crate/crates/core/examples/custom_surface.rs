//! A surface of revolution built from an elliptic profile.

use std::sync::Arc;

use killing::analysis::{Experiment, Resolution};
use killing::fem::{ElementOrder, Problem};
use killing::geometry::catalog::{surface_of_revolution, Profile};

fn main() -> killing::Result<()> {
    // (3 + cos t, 0.5 sin t)
    let profile = Profile {
        c1: Arc::new(|t: f64| 3.0 + t.cos()),
        c2: Arc::new(|t: f64| 0.5 * t.sin()),
        dc1: Arc::new(|t: f64| -t.sin()),
        dc2: Arc::new(|t: f64| 0.5 * t.cos()),
        d2c1: Arc::new(|t: f64| -t.cos()),
        d2c2: Arc::new(|t: f64| -0.5 * t.sin()),
    };
    let surface = surface_of_revolution(profile)?;
    for problem in [Problem::Killing, Problem::Conformal] {
        let run = Experiment::new(surface.clone(), problem, ElementOrder::P2, Resolution::Grid(16)).run()?;
        println!("{problem:?}: eigenvalues {}", run.spectrum.eigenvalues.iter().map(|l| format!("{l:.3e}")).collect::<Vec<_>>().join(" "));
        for e in &run.errors {
            println!("  {:18} L² {:.2e}", e.name, e.l2_rel);
        }
    }
    Ok(())
}
