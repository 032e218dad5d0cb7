//! `∫ |∇u|² = ∫ κ |u|²` holds for Killing and conformal Killing fields and fails otherwise.

use killing::analysis::ricci_identity_residual;
use killing::fem::{DiscreteField, ElementOrder, FeSpace, Problem};
use killing::geometry::catalog;
use killing::mesh::Triangulation;
use rand::{Rng, SeedableRng};

fn main() -> killing::Result<()> {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2);
    for m in [catalog::standard_torus(), catalog::klein_bottle()] {
        let mesh = Triangulation::structured(&m.chart, 32)?;
        for f in &m.known_killing {
            println!("{:15} {:18} {:.1e}", m.name, f.name, ricci_identity_residual(f, &mesh, &m.metric, Problem::Killing)?);
        }
        for f in &m.known_conformal_killing {
            println!("{:15} {:18} {:.1e}", m.name, f.name, ricci_identity_residual(f, &mesh, &m.metric, Problem::Conformal)?);
        }
        let space = FeSpace::new(&mesh, ElementOrder::P1, m.chart.gluing, 1e-8)?;
        let noise = DiscreteField::new(&space, (0..space.n_dofs()).map(|_| rng.gen_range(-1.0..1.0)).collect())?;
        println!("{:15} {:18} {:.1e}", m.name, "random", ricci_identity_residual(&noise, &mesh, &m.metric, Problem::Killing)?);
    }
    Ok(())
}
