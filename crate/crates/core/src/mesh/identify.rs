use crate::mesh::{Gluing, Triangulation};
use crate::{Error, Point, Result};

/// Equivalence classes of glued points with per-component sign transforms.
///
/// The value of component `c` stored for class `class[i]` relates to the value at point
/// `i` by `u_i^c = sign[i][c] · u_class^c`. When the signs around a cycle of identifications
/// disagree, the component is forced to vanish on that class (`vanishing[class][c]`).
#[derive(Debug, Clone, PartialEq)]
pub struct VertexIdentification {
    pub class: Vec<usize>,
    pub sign: Vec<[f64; 2]>,
    pub n_classes: usize,
    pub vanishing: Vec<[bool; 2]>,
}

impl VertexIdentification {
    pub fn trivial(n: usize) -> Self {
        Self { class: (0..n).collect(), sign: vec![[1.0; 2]; n], n_classes: n, vanishing: vec![[false; 2]; n] }
    }

    /// Members of every class, in point order.
    pub fn members(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.n_classes];
        for (i, &c) in self.class.iter().enumerate() {
            out[c].push(i);
        }
        out
    }
}

struct ParityUnionFind {
    parent: Vec<usize>,
    parity: Vec<[f64; 2]>,
    conflict: Vec<[bool; 2]>,
}

impl ParityUnionFind {
    fn new(n: usize) -> Self {
        Self { parent: (0..n).collect(), parity: vec![[1.0; 2]; n], conflict: vec![[false; 2]; n] }
    }

    fn find(&mut self, i: usize) -> (usize, [f64; 2]) {
        if self.parent[i] == i {
            return (i, [1.0; 2]);
        }
        let p = self.parent[i];
        let (root, up) = self.find(p);
        let own = self.parity[i];
        let combined = [own[0] * up[0], own[1] * up[1]];
        self.parent[i] = root;
        self.parity[i] = combined;
        (root, combined)
    }

    /// Record `u_j = s · u_i` componentwise.
    fn union(&mut self, i: usize, j: usize, s: [f64; 2]) {
        let (ri, pi) = self.find(i);
        let (rj, pj) = self.find(j);
        // u_i = pi u_ri, u_j = pj u_rj, u_j = s u_i  =>  u_rj = pj s pi u_ri
        let rel = [pj[0] * s[0] * pi[0], pj[1] * s[1] * pi[1]];
        if ri == rj {
            for c in 0..2 {
                if rel[c] < 0.0 {
                    self.conflict[ri][c] = true;
                }
            }
            return;
        }
        let (keep, merge) = if ri < rj { (ri, rj) } else { (rj, ri) };
        self.parent[merge] = keep;
        self.parity[merge] = rel;
        for c in 0..2 {
            let flag = self.conflict[merge][c];
            self.conflict[keep][c] |= flag;
        }
    }
}

/// Identify points of the rectangle `[lo, hi]` according to `gluing`.
pub fn identify_points(points: &[Point], lo: Point, hi: Point, gluing: Gluing, tol: f64) -> Result<VertexIdentification> {
    let n = points.len();
    if gluing == Gluing::None {
        return Ok(VertexIdentification::trivial(n));
    }
    let on = |v: f64, target: f64| (v - target).abs() <= tol;
    let left: Vec<usize> = (0..n).filter(|&i| on(points[i].x, lo.x)).collect();
    let right: Vec<usize> = (0..n).filter(|&i| on(points[i].x, hi.x)).collect();
    let bottom: Vec<usize> = (0..n).filter(|&i| on(points[i].y, lo.y)).collect();
    let top: Vec<usize> = (0..n).filter(|&i| on(points[i].y, hi.y)).collect();

    let find = |candidates: &[usize], target: Point| -> Option<usize> {
        candidates
            .iter()
            .copied()
            .map(|j| (j, (points[j] - target).norm()))
            .filter(|&(_, d)| d <= tol)
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .map(|(j, _)| j)
    };

    let mut uf = ParityUnionFind::new(n);
    let mut link = |from: &[usize], to: &[usize], map: &dyn Fn(&Point) -> Point, s: [f64; 2]| -> Result<()> {
        for &i in from {
            let image = map(&points[i]);
            let j = find(to, image).ok_or(Error::GluingMismatch { vertex: i, at: points[i] })?;
            uf.union(i, j, s);
        }
        Ok(())
    };
    let width = hi.x - lo.x;
    let height = hi.y - lo.y;
    link(&left, &right, &|p| Point::new(p.x + width, p.y), [1.0, 1.0])?;
    link(&right, &left, &|p| Point::new(p.x - width, p.y), [1.0, 1.0])?;
    match gluing {
        Gluing::PeriodicBoth => {
            link(&bottom, &top, &|p| Point::new(p.x, p.y + height), [1.0, 1.0])?;
            link(&top, &bottom, &|p| Point::new(p.x, p.y - height), [1.0, 1.0])?;
        }
        Gluing::KleinFlip => {
            let flip = |p: &Point, dy: f64| Point::new(lo.x + hi.x - p.x, p.y + dy);
            link(&bottom, &top, &|p| flip(p, height), [-1.0, 1.0])?;
            link(&top, &bottom, &|p| flip(p, -height), [-1.0, 1.0])?;
        }
        Gluing::None => unreachable!(),
    }

    let mut class = vec![usize::MAX; n];
    let mut sign = vec![[1.0; 2]; n];
    let mut root_class = vec![usize::MAX; n];
    let mut vanishing = Vec::new();
    for i in 0..n {
        let (root, parity) = uf.find(i);
        if root_class[root] == usize::MAX {
            root_class[root] = vanishing.len();
            vanishing.push(uf.conflict[root]);
        }
        class[i] = root_class[root];
        sign[i] = parity;
    }
    let n_classes = vanishing.len();
    Ok(VertexIdentification { class, sign, n_classes, vanishing })
}

/// Identification of mesh vertices on the rectangle spanned by the mesh.
pub fn identify(mesh: &Triangulation, gluing: Gluing, tol: f64) -> Result<VertexIdentification> {
    let (lo, hi) = mesh.bounding_box();
    identify_points(&mesh.vertices, lo, hi, gluing, tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::ChartDomain;
    use std::f64::consts::TAU;

    fn grid(n: usize, gluing: Gluing) -> Triangulation {
        Triangulation::structured(&ChartDomain::periodic_square(gluing), n).unwrap()
    }

    #[test]
    fn periodic_grid_classes() {
        let m = grid(10, Gluing::PeriodicBoth);
        let id = identify(&m, Gluing::PeriodicBoth, 1e-9).unwrap();
        assert_eq!(id.n_classes, 100);
        assert!(id.sign.iter().all(|s| *s == [1.0, 1.0]));
        assert!(id.vanishing.iter().all(|v| *v == [false, false]));
    }

    #[test]
    fn klein_grid_classes_and_flip() {
        let m = grid(10, Gluing::KleinFlip);
        let id = identify(&m, Gluing::KleinFlip, 1e-9).unwrap();
        assert_eq!(id.n_classes, 100);
        let find = |p: Point| m.vertices.iter().position(|v| (v - p).norm() < 1e-9).unwrap();
        let a = find(Point::new(TAU * 0.2, 0.0));
        let b = find(Point::new(TAU * 0.8, TAU));
        assert_eq!(id.class[a], id.class[b]);
        assert_eq!(id.sign[a][0] * id.sign[b][0], -1.0);
        assert_eq!(id.sign[a][1] * id.sign[b][1], 1.0);
        // the four corners form one consistent class
        let corners: Vec<usize> =
            [(0.0, 0.0), (TAU, 0.0), (0.0, TAU), (TAU, TAU)].iter().map(|&(x, y)| find(Point::new(x, y))).collect();
        assert!(corners.iter().all(|&c| id.class[c] == id.class[corners[0]]));
        assert_eq!(id.vanishing[id.class[corners[0]]], [false, false]);
    }

    #[test]
    fn no_gluing_is_identity() {
        let m = grid(4, Gluing::None);
        let id = identify(&m, Gluing::None, 1e-9).unwrap();
        assert_eq!(id, VertexIdentification::trivial(25));
    }

    #[test]
    fn identification_is_idempotent() {
        let m = grid(6, Gluing::KleinFlip);
        let id = identify(&m, Gluing::KleinFlip, 1e-9).unwrap();
        // identifying the class representatives again changes nothing
        for members in id.members() {
            let first = members[0];
            for &i in &members {
                assert_eq!(id.class[i], id.class[first]);
            }
        }
        assert_eq!(identify(&m, Gluing::KleinFlip, 1e-9).unwrap(), id);
    }

    #[test]
    fn unmatched_vertex_is_reported() {
        let mut m = grid(4, Gluing::PeriodicBoth);
        let i = m.vertices.iter().position(|v| v.x == 0.0 && v.y > 1.0 && v.y < 2.0).unwrap();
        m.vertices[i].y += 0.1;
        let err = identify(&m, Gluing::PeriodicBoth, 1e-9).unwrap_err();
        assert!(matches!(err, Error::GluingMismatch { vertex, .. } if vertex == i));
    }
}
