use std::collections::HashMap;

use crate::fem::element::{ReferenceElement, EDGE_NODES, MAX_NODES};
use crate::fem::sparse::TripletBuilder;
use crate::fem::ElementOrder;
use crate::mesh::{edge_key, identify_points, Gluing, Triangulation, VertexIdentification};
use crate::{Error, Point, Result};

/// Map from `(node, component)` to a signed global degree of freedom.
///
/// Dofs are numbered class by class with components interleaved. Components forced to
/// vanish by an inconsistent gluing (e.g. `u¹` at the fixed points of the Klein flip) get
/// no dof.
#[derive(Debug, Clone, PartialEq)]
pub struct DofMap {
    pub node_class: Vec<usize>,
    pub component_sign: Vec<[f64; 2]>,
    class_dof: Vec<[Option<usize>; 2]>,
    n_dofs: usize,
}

impl DofMap {
    pub fn from_identification(id: &VertexIdentification) -> Self {
        let mut class_dof = vec![[None; 2]; id.n_classes];
        let mut n = 0;
        for (c, dofs) in class_dof.iter_mut().enumerate() {
            for k in 0..2 {
                if !id.vanishing[c][k] {
                    dofs[k] = Some(n);
                    n += 1;
                }
            }
        }
        Self { node_class: id.class.clone(), component_sign: id.sign.clone(), class_dof, n_dofs: n }
    }

    pub fn n_dofs(&self) -> usize {
        self.n_dofs
    }

    pub fn n_nodes(&self) -> usize {
        self.node_class.len()
    }

    pub fn n_classes(&self) -> usize {
        self.class_dof.len()
    }

    /// Global dof and sign of component `c` at `node`, `None` if the component vanishes.
    pub fn dof(&self, node: usize, c: usize) -> Option<(usize, f64)> {
        self.class_dof[self.node_class[node]][c].map(|d| (d, self.component_sign[node][c]))
    }

    /// Scatter a local matrix (local index `2·a + c` for node `nodes[a]`, component `c`).
    pub fn scatter(&self, local: &[f64], nodes: &[usize], out: &mut TripletBuilder) -> Result<()> {
        let m = 2 * nodes.len();
        if local.len() != m * m {
            return Err(Error::DimensionMismatch(format!("local matrix has {} entries for {m} dofs", local.len())));
        }
        let mut map = Vec::with_capacity(m);
        for &node in nodes {
            if node >= self.n_nodes() {
                return Err(Error::DofOutOfRange { index: node, n: self.n_nodes() });
            }
            for c in 0..2 {
                map.push(self.dof(node, c));
            }
        }
        for (p, gp) in map.iter().enumerate() {
            let Some((i, si)) = gp else { continue };
            for (q, gq) in map.iter().enumerate() {
                let Some((j, sj)) = gq else { continue };
                // each off-diagonal global pair is reached from both (p, q) and (q, p)
                if i <= j {
                    out.add(*i, *j, si * sj * local[p * m + q])?;
                }
            }
        }
        Ok(())
    }

    /// Nodal vector of length `2 · n_nodes` from dof values.
    pub fn expand(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; 2 * self.n_nodes()];
        for node in 0..self.n_nodes() {
            for c in 0..2 {
                if let Some((d, s)) = self.dof(node, c) {
                    out[2 * node + c] = s * x[d];
                }
            }
        }
        out
    }
}

/// Vector-valued Lagrange space on a triangulation with gluing.
#[derive(Debug, Clone)]
pub struct FeSpace {
    pub mesh: Triangulation,
    pub element: ReferenceElement,
    pub gluing: Gluing,
    /// Node positions: mesh vertices, then (for P2) edge midpoints.
    pub nodes: Vec<Point>,
    /// Global node indices of each triangle, in reference-element order.
    pub element_nodes: Vec<[usize; MAX_NODES]>,
    pub dofmap: DofMap,
}

impl FeSpace {
    pub fn new(mesh: &Triangulation, order: ElementOrder, gluing: Gluing, tol: f64) -> Result<Self> {
        mesh.validate()?;
        let element = ReferenceElement::new(order);
        let mut nodes = mesh.vertices.clone();
        let mut element_nodes = Vec::with_capacity(mesh.n_triangles());
        let mut midpoint: HashMap<(usize, usize), usize> = HashMap::new();
        for t in &mesh.triangles {
            let mut en = [usize::MAX; MAX_NODES];
            en[..3].copy_from_slice(t);
            if order == ElementOrder::P2 {
                for (e, [i, j]) in EDGE_NODES.iter().enumerate() {
                    let key = edge_key(t[*i], t[*j]);
                    en[3 + e] = *midpoint.entry(key).or_insert_with(|| {
                        nodes.push((mesh.vertices[key.0] + mesh.vertices[key.1]) * 0.5);
                        nodes.len() - 1
                    });
                }
            }
            element_nodes.push(en);
        }
        let id = if gluing == Gluing::None {
            VertexIdentification::trivial(nodes.len())
        } else {
            let (lo, hi) = mesh.bounding_box();
            identify_points(&nodes, lo, hi, gluing, tol)?
        };
        Ok(Self { mesh: mesh.clone(), element, gluing, nodes, element_nodes, dofmap: DofMap::from_identification(&id) })
    }

    pub fn order(&self) -> ElementOrder {
        self.element.order
    }

    pub fn n_dofs(&self) -> usize {
        self.dofmap.n_dofs()
    }

    pub fn n_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn triangle_nodes(&self, t: usize) -> &[usize] {
        &self.element_nodes[t][..self.element.n_nodes()]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::ChartDomain;

    fn space(n: usize, order: ElementOrder, gluing: Gluing) -> FeSpace {
        let mesh = Triangulation::structured(&ChartDomain::periodic_square(gluing), n).unwrap();
        FeSpace::new(&mesh, order, gluing, 1e-9).unwrap()
    }

    #[test]
    fn dof_counts() {
        assert_eq!(space(4, ElementOrder::P1, Gluing::None).n_dofs(), 2 * 25);
        assert_eq!(space(4, ElementOrder::P1, Gluing::PeriodicBoth).n_dofs(), 2 * 16);
        // P2 periodic: vertices + 3 edges per vertex
        assert_eq!(space(4, ElementOrder::P2, Gluing::PeriodicBoth).n_dofs(), 2 * 64);
    }

    #[test]
    fn klein_flip_grid_has_no_vanishing_components() {
        // (π, 0) ~ (π, 2π) is a sign flip between two chart points, not a constraint
        let s = space(4, ElementOrder::P1, Gluing::KleinFlip);
        assert_eq!(s.dofmap.n_classes(), 16);
        assert_eq!(s.n_dofs(), 2 * 16);
        let s = space(3, ElementOrder::P2, Gluing::KleinFlip);
        assert_eq!(s.n_dofs(), 2 * s.dofmap.n_classes());
    }

    #[test]
    fn identified_nodes_share_dofs_with_gluing_signs() {
        let s = space(4, ElementOrder::P2, Gluing::KleinFlip);
        let tau = std::f64::consts::TAU;
        for (a, pa) in s.nodes.iter().enumerate() {
            if pa.y != 0.0 || pa.x == std::f64::consts::PI {
                continue;
            }
            let image = Point::new(tau - pa.x, tau);
            let b = s.nodes.iter().position(|q| (q - image).norm() < 1e-9).unwrap();
            let (da, sa) = s.dofmap.dof(a, 0).unwrap();
            let (db, sb) = s.dofmap.dof(b, 0).unwrap();
            assert_eq!(da, db);
            assert_eq!(sa * sb, -1.0);
            let (da, sa) = s.dofmap.dof(a, 1).unwrap();
            let (db, sb) = s.dofmap.dof(b, 1).unwrap();
            assert_eq!(da, db);
            assert_eq!(sa * sb, 1.0);
        }
    }

    #[test]
    fn scatter_applies_signs() {
        let s = space(2, ElementOrder::P1, Gluing::KleinFlip);
        let nodes = [0usize, 1];
        let mut b = TripletBuilder::new(s.n_dofs());
        let local: Vec<f64> = (0..16).map(|k| if k % 5 == 0 { 2.0 } else { 1.0 }).collect();
        s.dofmap.scatter(&local, &nodes, &mut b).unwrap();
        let a = b.build();
        for &n in &nodes {
            for c in 0..2 {
                if let Some((d, _)) = s.dofmap.dof(n, c) {
                    assert!(a.get(d, d) > 0.0);
                }
            }
        }
        let mut b = TripletBuilder::new(s.n_dofs());
        assert!(s.dofmap.scatter(&local, &[0, 10_000], &mut b).is_err());
    }
}
