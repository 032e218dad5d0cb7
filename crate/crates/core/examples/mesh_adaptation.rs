//! Remeshing the torus chart toward uniform Riemannian edge length.

use killing::geometry::catalog;
use killing::mesh::{adapt, io, target_spacing, AdaptOptions, Triangulation};

fn main() -> killing::Result<()> {
    let torus = catalog::standard_torus();
    let mesh = Triangulation::structured(&torus.chart, 24)?;
    let h = target_spacing(mesh.riemannian_area(&torus.metric)?, mesh.n_triangles());
    let adapted = adapt(&mesh, &torus.metric, &torus.chart, &AdaptOptions::new(h, 6))?;
    for (name, m) in [("structured", &mesh), ("adapted", &adapted)] {
        println!(
            "{name:10} {:5} triangles  edge ratio {:.2}  min quality {:.2}",
            m.n_triangles(),
            m.edge_length_ratio(&torus.metric),
            m.min_quality(&torus.metric)
        );
    }
    let path = std::env::temp_dir().join("torus-adapted.mesh");
    io::write(&adapted, &path)?;
    assert_eq!(io::read(&path)?, adapted);
    println!("round-tripped through {}", path.display());
    Ok(())
}
