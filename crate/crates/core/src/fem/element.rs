use serde::{Deserialize, Serialize};

use crate::Point;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ElementOrder {
    P1,
    P2,
}

impl std::str::FromStr for ElementOrder {
    type Err = crate::Error;

    fn from_str(s: &str) -> crate::Result<Self> {
        match s {
            "P1" | "p1" => Ok(Self::P1),
            "P2" | "p2" => Ok(Self::P2),
            other => Err(crate::Error::Config(format!("unknown element {other:?}; expected P1 or P2"))),
        }
    }
}

/// Lagrange triangle. Nodes are the three vertices followed, for P2, by the midpoints of
/// edges (0,1), (1,2), (2,0).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ReferenceElement {
    pub order: ElementOrder,
}

pub const MAX_NODES: usize = 6;

/// Endpoints (local vertex indices) of the three P2 edge nodes.
pub const EDGE_NODES: [[usize; 2]; 3] = [[0, 1], [1, 2], [2, 0]];

impl ReferenceElement {
    pub fn new(order: ElementOrder) -> Self {
        Self { order }
    }

    pub fn n_nodes(&self) -> usize {
        match self.order {
            ElementOrder::P1 => 3,
            ElementOrder::P2 => 6,
        }
    }

    pub fn nodes(&self) -> Vec<[f64; 3]> {
        let mut out = vec![[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
        if self.order == ElementOrder::P2 {
            out.extend([[0.5, 0.5, 0.0], [0.0, 0.5, 0.5], [0.5, 0.0, 0.5]]);
        }
        out
    }

    /// Shape function values at barycentric `l`.
    pub fn values(&self, l: &[f64; 3]) -> [f64; MAX_NODES] {
        match self.order {
            ElementOrder::P1 => [l[0], l[1], l[2], 0.0, 0.0, 0.0],
            ElementOrder::P2 => [
                l[0] * (2.0 * l[0] - 1.0),
                l[1] * (2.0 * l[1] - 1.0),
                l[2] * (2.0 * l[2] - 1.0),
                4.0 * l[0] * l[1],
                4.0 * l[1] * l[2],
                4.0 * l[2] * l[0],
            ],
        }
    }

    /// `∂φ_i/∂λ_m` at barycentric `l`.
    pub fn barycentric_derivatives(&self, l: &[f64; 3]) -> [[f64; 3]; MAX_NODES] {
        let mut d = [[0.0; 3]; MAX_NODES];
        match self.order {
            ElementOrder::P1 => {
                for (i, row) in d.iter_mut().enumerate().take(3) {
                    row[i] = 1.0;
                }
            }
            ElementOrder::P2 => {
                for i in 0..3 {
                    d[i][i] = 4.0 * l[i] - 1.0;
                }
                for (e, [i, j]) in EDGE_NODES.iter().enumerate() {
                    d[3 + e][*i] = 4.0 * l[*j];
                    d[3 + e][*j] = 4.0 * l[*i];
                }
            }
        }
        d
    }

    /// Physical gradients given the (constant) gradients of the barycentric coordinates.
    pub fn gradients(&self, l: &[f64; 3], grad_l: &[Point; 3]) -> [Point; MAX_NODES] {
        let d = self.barycentric_derivatives(l);
        let mut out = [Point::zeros(); MAX_NODES];
        for i in 0..self.n_nodes() {
            out[i] = grad_l[0] * d[i][0] + grad_l[1] * d[i][1] + grad_l[2] * d[i][2];
        }
        out
    }
}

/// Gradients of the barycentric coordinates of triangle `abc` and its (signed) area.
pub fn barycentric_gradients(a: &Point, b: &Point, c: &Point) -> ([Point; 3], f64) {
    let two_area = (b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y);
    let g = |p: &Point, q: &Point| Point::new(p.y - q.y, q.x - p.x) / two_area;
    ([g(b, c), g(c, a), g(a, b)], 0.5 * two_area)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn elements() -> [ReferenceElement; 2] {
        [ReferenceElement::new(ElementOrder::P1), ReferenceElement::new(ElementOrder::P2)]
    }

    #[test]
    fn partition_of_unity() {
        let (gl, _) = barycentric_gradients(&Point::new(0.1, 0.2), &Point::new(1.3, 0.1), &Point::new(0.4, 1.1));
        for e in elements() {
            for l in [[0.2, 0.3, 0.5], [0.7, 0.1, 0.2], [1.0 / 3.0; 3]] {
                let v = e.values(&l);
                assert!((v.iter().sum::<f64>() - 1.0).abs() < 1e-15);
                let g = e.gradients(&l, &gl);
                let s: Point = g.iter().sum();
                assert!(s.norm() < 1e-13);
            }
        }
    }

    #[test]
    fn kronecker_at_nodes() {
        for e in elements() {
            let nodes = e.nodes();
            for (j, l) in nodes.iter().enumerate() {
                let v = e.values(l);
                for i in 0..e.n_nodes() {
                    let expect = if i == j { 1.0 } else { 0.0 };
                    assert!((v[i] - expect).abs() < 1e-15);
                }
            }
        }
    }

    #[test]
    fn gradients_match_finite_differences() {
        let (a, b, c) = (Point::new(0.1, 0.2), Point::new(1.3, 0.1), Point::new(0.4, 1.1));
        let (gl, area) = barycentric_gradients(&a, &b, &c);
        assert!(area > 0.0);
        let bary = |p: &Point| {
            let l1 = gl[1].dot(&(p - a));
            let l2 = gl[2].dot(&(p - a));
            [1.0 - l1 - l2, l1, l2]
        };
        let e = ReferenceElement::new(ElementOrder::P2);
        let x = Point::new(0.5, 0.4);
        let g = e.gradients(&bary(&x), &gl);
        let h = 1e-6;
        for i in 0..6 {
            for k in 0..2 {
                let mut dx = Point::zeros();
                dx[k] = h;
                let fd = (e.values(&bary(&(x + dx)))[i] - e.values(&bary(&(x - dx)))[i]) / (2.0 * h);
                assert!((fd - g[i][k]).abs() < 1e-8);
            }
        }
    }
}
