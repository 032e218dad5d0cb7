//! Turning a Killing field by a quarter turn in each tangent plane gives a conformal
//! Killing field.

use killing::analysis::{Experiment, Resolution};
use killing::fem::{ElementOrder, Problem};
use killing::geometry::{catalog, rotate_k};

fn main() -> killing::Result<()> {
    let torus = catalog::standard_torus();
    let run = Experiment::new(torus.clone(), Problem::Killing, ElementOrder::P2, Resolution::Grid(24)).run()?;
    let u = run.mode(0);
    let ku = u.map_nodal(|x, v| rotate_k(&torus.metric, x, v).expect("nondegenerate metric"));
    let mass = run.system.mass.quadratic_form(&ku.values);
    println!("a_K(u, u) / |u|² = {:.2e}", u.energy(&torus.metric, Problem::Killing)? / run.system.mass.quadratic_form(&u.values));
    println!("a_C(Ku, Ku) / |Ku|² = {:.2e}", ku.energy(&torus.metric, Problem::Conformal)? / mass);
    println!("a_K(Ku, Ku) / |Ku|² = {:.2e}", ku.energy(&torus.metric, Problem::Killing)? / mass);
    Ok(())
}
