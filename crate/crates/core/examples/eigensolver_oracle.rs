//! Shift-invert Lanczos against the dense generalized eigensolver.

use killing::eigen::{dense_solve, max_principal_angle, solve_smallest, SolverConfig};
use killing::fem::{assemble, ElementOrder, FeSpace, Problem};
use killing::geometry::catalog;
use killing::mesh::Triangulation;

fn main() -> killing::Result<()> {
    let torus = catalog::standard_torus();
    let mesh = Triangulation::structured(&torus.chart, 10)?;
    let space = FeSpace::new(&mesh, ElementOrder::P2, torus.chart.gluing, 1e-8)?;
    let sys = assemble(&space, &torus.metric, Problem::Conformal)?;
    let t = std::time::Instant::now();
    let it = solve_smallest(&sys.stiffness, &sys.mass, &SolverConfig::with_k(6))?;
    let t_it = t.elapsed();
    let t = std::time::Instant::now();
    let dense = dense_solve(&sys.stiffness, &sys.mass)?;
    let t_dense = t.elapsed();
    println!("{} dofs; lanczos {t_it:.2?} ({} steps), dense {t_dense:.2?}", space.n_dofs(), it.iterations);
    for (i, (a, b)) in it.eigenvalues.iter().zip(&dense.eigenvalues).enumerate() {
        println!("λ{i} {a:>22.15e} {b:>22.15e}  |Δ| {:.1e}", (a - b).abs());
    }
    let angle = max_principal_angle(&it.eigenvectors[..2], &dense.eigenvectors[..2], &sys.mass);
    println!("zero-cluster principal angle {angle:.1e}");
    Ok(())
}
