//! Legacy ASCII VTK unstructured grids. Chart coordinates become `(x1, x2, 0)`.

use std::fmt::Write as _;

use crate::fem::{DiscreteField, ElementOrder, FeSpace};
use crate::mesh::Triangulation;
use crate::Point;

const VTK_TRIANGLE: u8 = 5;

fn header(s: &mut String, title: &str, points: &[Point], cells: &[[usize; 3]]) {
    let _ = writeln!(s, "# vtk DataFile Version 3.0\n{title}\nASCII\nDATASET UNSTRUCTURED_GRID");
    let _ = writeln!(s, "POINTS {} double", points.len());
    for p in points {
        let _ = writeln!(s, "{:.16e} {:.16e} 0", p.x, p.y);
    }
    let _ = writeln!(s, "CELLS {} {}", cells.len(), 4 * cells.len());
    for c in cells {
        let _ = writeln!(s, "3 {} {} {}", c[0], c[1], c[2]);
    }
    let _ = writeln!(s, "CELL_TYPES {}", cells.len());
    for _ in cells {
        let _ = writeln!(s, "{VTK_TRIANGLE}");
    }
}

fn sanitize(name: &str) -> String {
    name.chars().map(|c| if c.is_ascii_alphanumeric() || c == '_' { c } else { '_' }).collect()
}

pub fn mesh_vtk(mesh: &Triangulation, title: &str) -> String {
    let mut s = String::new();
    header(&mut s, title, &mesh.vertices, &mesh.triangles);
    s
}

/// Triangles of the space's node set: the mesh itself for P1, each triangle split in four
/// at its edge midpoints for P2.
pub fn display_cells(space: &FeSpace) -> Vec<[usize; 3]> {
    match space.order() {
        ElementOrder::P1 => space.mesh.triangles.clone(),
        ElementOrder::P2 => space
            .element_nodes
            .iter()
            .flat_map(|n| {
                let [a, b, c, ab, bc, ca] = *n;
                [[a, ab, ca], [ab, b, bc], [ca, bc, c], [ab, bc, ca]]
            })
            .collect(),
    }
}

/// One `VECTORS` array per field, sampled at the space's nodes.
pub fn fields_vtk(space: &FeSpace, fields: &[(&str, &DiscreteField<'_>)], title: &str) -> String {
    let mut s = String::new();
    header(&mut s, title, &space.nodes, &display_cells(space));
    if fields.is_empty() {
        return s;
    }
    let _ = writeln!(s, "POINT_DATA {}", space.nodes.len());
    for (name, f) in fields {
        let _ = writeln!(s, "VECTORS {} double", sanitize(name));
        for node in 0..space.nodes.len() {
            let u = f.node_value(node);
            let _ = writeln!(s, "{:.16e} {:.16e} 0", u.x, u.y);
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{catalog, ChartDomain};
    use crate::mesh::Gluing;

    #[test]
    fn two_triangles_one_field() {
        let d = ChartDomain::rectangle(Point::zeros(), Point::new(1.0, 1.0), Gluing::None);
        let mesh = Triangulation::structured(&d, 1).unwrap();
        let space = FeSpace::new(&mesh, ElementOrder::P1, Gluing::None, 1e-9).unwrap();
        let f = DiscreteField::interpolate_fn(&space, |x| Point::new(x.y, -x.x));
        let text = fields_vtk(&space, &[("rot field", &f)], "test");
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "# vtk DataFile Version 3.0");
        assert_eq!(lines[4], "POINTS 4 double");
        assert!(lines.contains(&"CELLS 2 8"));
        assert!(lines.contains(&"CELL_TYPES 2"));
        assert!(lines.contains(&"POINT_DATA 4"));
        assert!(lines.contains(&"VECTORS rot_field double"));
        assert_eq!(*lines.last().unwrap(), "1.0000000000000000e0 -1.0000000000000000e0 0");
    }

    #[test]
    fn p2_export_is_four_split() {
        let torus = catalog::standard_torus();
        let mesh = Triangulation::structured(&torus.chart, 3).unwrap();
        let space = FeSpace::new(&mesh, ElementOrder::P2, torus.chart.gluing, 1e-9).unwrap();
        let cells = display_cells(&space);
        assert_eq!(cells.len(), 4 * mesh.n_triangles());
        let area: f64 = cells
            .iter()
            .map(|c| {
                let (a, b, c) = (space.nodes[c[0]], space.nodes[c[1]], space.nodes[c[2]]);
                0.5 * ((b - a).x * (c - a).y - (b - a).y * (c - a).x)
            })
            .sum();
        assert!((area - mesh.area()).abs() < 1e-12);
    }
}
