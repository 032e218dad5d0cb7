//! Parameter-domain triangulations, metric adaptation and boundary identification.

mod adapt;
mod delaunay;
mod generate;
mod identify;
pub mod io;

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::geometry::domain::orient;
use crate::geometry::MetricField;
use crate::{Error, Point, Result};

pub use adapt::{adapt, AdaptOptions};
pub use generate::target_spacing;
pub use identify::{identify, identify_points, VertexIdentification};

/// How the sides of the parameter rectangle are glued.
///
/// * `PeriodicBoth`: `(x1, lo) ~ (x1, hi)` and `(lo, x2) ~ (hi, x2)`, components unchanged.
/// * `KleinFlip`: `(lo, x2) ~ (hi, x2)` unchanged; `(x1, lo) ~ (lo + hi − x1, hi)` with
///   `(u¹, u²) ↦ (−u¹, u²)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
pub enum Gluing {
    #[default]
    None,
    PeriodicBoth,
    KleinFlip,
}

/// Tags of the four sides of a rectangular chart.
pub mod side {
    pub const BOTTOM: usize = 0;
    pub const RIGHT: usize = 1;
    pub const TOP: usize = 2;
    pub const LEFT: usize = 3;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundaryEdge {
    pub a: usize,
    pub b: usize,
    pub tag: usize,
}

/// Triangles are counterclockwise in the parameter plane.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Triangulation {
    pub vertices: Vec<Point>,
    pub triangles: Vec<[usize; 3]>,
    pub boundary_edges: Vec<BoundaryEdge>,
}

#[inline]
pub(crate) fn edge_key(a: usize, b: usize) -> (usize, usize) {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

const GAUSS_LEGENDRE_4: [(f64, f64); 4] = [
    (-0.861_136_311_594_052_6, 0.347_854_845_137_453_9),
    (-0.339_981_043_584_856_3, 0.652_145_154_862_546_1),
    (0.339_981_043_584_856_3, 0.652_145_154_862_546_1),
    (0.861_136_311_594_052_6, 0.347_854_845_137_453_9),
];

/// Length of the parameter segment `pq` in the metric, by 4-point Gauss–Legendre.
pub fn riemannian_edge_length(metric: &MetricField, p: &Point, q: &Point) -> f64 {
    let d = q - p;
    GAUSS_LEGENDRE_4
        .iter()
        .map(|&(xi, w)| {
            let x = p + d * (0.5 * (1.0 + xi));
            0.5 * w * d.dot(&(metric.g(&x) * d)).max(0.0).sqrt()
        })
        .sum()
}

/// `2 r / R` of the triangle measured in the metric frozen at its barycenter.
pub fn metric_quality(metric: &MetricField, a: &Point, b: &Point, c: &Point) -> f64 {
    if orient(a, b, c) <= 0.0 {
        return 0.0;
    }
    let g = metric.g(&((a + b + c) / 3.0));
    let len = |d: Point| d.dot(&(g * d)).max(0.0).sqrt();
    let (la, lb, lc) = (len(c - b), len(a - c), len(b - a));
    let q = (lb + lc - la) * (lc + la - lb) * (la + lb - lc) / (la * lb * lc);
    if q.is_finite() {
        q.max(0.0)
    } else {
        0.0
    }
}

impl Triangulation {
    pub fn n_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn n_triangles(&self) -> usize {
        self.triangles.len()
    }

    pub fn corners(&self, t: usize) -> [Point; 3] {
        let [a, b, c] = self.triangles[t];
        [self.vertices[a], self.vertices[b], self.vertices[c]]
    }

    pub fn signed_area(&self, t: usize) -> f64 {
        let [a, b, c] = self.corners(t);
        0.5 * orient(&a, &b, &c)
    }

    pub fn area(&self) -> f64 {
        (0..self.n_triangles()).map(|t| self.signed_area(t)).sum()
    }

    /// Unique undirected edges, sorted.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut edges: Vec<(usize, usize)> = self
            .triangles
            .iter()
            .flat_map(|t| [edge_key(t[0], t[1]), edge_key(t[1], t[2]), edge_key(t[2], t[0])])
            .collect();
        edges.sort_unstable();
        edges.dedup();
        edges
    }

    /// Number of triangles sharing each edge.
    pub fn edge_counts(&self) -> HashMap<(usize, usize), usize> {
        let mut counts = HashMap::new();
        for t in &self.triangles {
            for k in 0..3 {
                *counts.entry(edge_key(t[k], t[(k + 1) % 3])).or_insert(0) += 1;
            }
        }
        counts
    }

    pub fn bounding_box(&self) -> (Point, Point) {
        let mut lo = Point::repeat(f64::INFINITY);
        let mut hi = Point::repeat(f64::NEG_INFINITY);
        for p in &self.vertices {
            lo = lo.inf(p);
            hi = hi.sup(p);
        }
        (lo, hi)
    }

    /// Positive areas, edge-manifold, and boundary list equal to the set of edges used once.
    pub fn validate(&self) -> Result<()> {
        for (t, tri) in self.triangles.iter().enumerate() {
            if tri.iter().any(|&v| v >= self.vertices.len()) {
                return Err(Error::InvalidMesh(format!("triangle {t} references a missing vertex")));
            }
            if tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2] {
                return Err(Error::InvalidMesh(format!("triangle {t} repeats a vertex")));
            }
            let area = self.signed_area(t);
            if !(area > 0.0) {
                return Err(Error::InvalidMesh(format!("triangle {t} has non-positive area {area:e}")));
            }
        }
        let counts = self.edge_counts();
        let mut boundary: HashMap<(usize, usize), usize> = HashMap::new();
        for e in &self.boundary_edges {
            *boundary.entry(edge_key(e.a, e.b)).or_insert(0) += 1;
        }
        for (edge, &n) in &counts {
            match (n, boundary.get(edge)) {
                (1, Some(1)) | (2, None) => {}
                (1, None) => {
                    return Err(Error::InvalidMesh(format!("edge {edge:?} has one triangle but no boundary tag")))
                }
                _ => return Err(Error::InvalidMesh(format!("edge {edge:?} shared by {n} triangles"))),
            }
        }
        if let Some(e) = boundary.keys().find(|e| !counts.contains_key(e)) {
            return Err(Error::InvalidMesh(format!("boundary edge {e:?} is not a mesh edge")));
        }
        Ok(())
    }

    pub fn edge_lengths(&self, metric: &MetricField) -> Vec<f64> {
        self.edges()
            .iter()
            .map(|&(a, b)| riemannian_edge_length(metric, &self.vertices[a], &self.vertices[b]))
            .collect()
    }

    /// `(min, max)` Riemannian edge length.
    pub fn edge_length_range(&self, metric: &MetricField) -> (f64, f64) {
        self.edge_lengths(metric)
            .into_iter()
            .fold((f64::INFINITY, 0.0), |(lo, hi), l| (lo.min(l), hi.max(l)))
    }

    pub fn edge_length_ratio(&self, metric: &MetricField) -> f64 {
        let (lo, hi) = self.edge_length_range(metric);
        hi / lo
    }

    /// Area in the metric, by the degree-5 rule.
    pub fn riemannian_area(&self, metric: &MetricField) -> Result<f64> {
        let rule = crate::fem::quadrature_degree5();
        let mut total = 0.0;
        for t in 0..self.n_triangles() {
            let [a, b, c] = self.corners(t);
            let area = self.signed_area(t);
            for (l, w) in rule.points.iter().zip(&rule.weights) {
                total += w * area * metric.density(&(a * l[0] + b * l[1] + c * l[2]))?;
            }
        }
        Ok(total)
    }

    pub fn max_edge_length(&self, metric: &MetricField) -> f64 {
        self.edge_length_range(metric).1
    }

    pub fn min_quality(&self, metric: &MetricField) -> f64 {
        (0..self.n_triangles())
            .map(|t| {
                let [a, b, c] = self.corners(t);
                metric_quality(metric, &a, &b, &c)
            })
            .fold(f64::INFINITY, f64::min)
    }

    /// Index of a triangle containing `p` and its barycentric coordinates.
    pub fn locate(&self, p: &Point, tol: f64) -> Option<(usize, [f64; 3])> {
        let mut best: Option<(usize, [f64; 3], f64)> = None;
        for t in 0..self.n_triangles() {
            let [a, b, c] = self.corners(t);
            let area = orient(&a, &b, &c);
            let l0 = orient(p, &b, &c) / area;
            let l1 = orient(&a, p, &c) / area;
            let l2 = 1.0 - l0 - l1;
            let worst = l0.min(l1).min(l2);
            if worst >= 0.0 {
                return Some((t, [l0, l1, l2]));
            }
            if best.as_ref().is_none_or(|b| worst > b.2) {
                best = Some((t, [l0, l1, l2], worst));
            }
        }
        best.filter(|b| b.2 >= -tol).map(|b| (b.0, b.1))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::catalog;

    #[test]
    fn edge_length_examples() {
        let flat = MetricField::euclidean();
        assert!((riemannian_edge_length(&flat, &Point::zeros(), &Point::new(3.0, 4.0)) - 5.0).abs() < 1e-14);
        let torus = catalog::standard_torus().metric;
        let l = riemannian_edge_length(&torus, &Point::zeros(), &Point::new(0.0, 1.0));
        assert!((l - 3.0).abs() < 1e-14);
        let l = riemannian_edge_length(&torus, &Point::zeros(), &Point::new(1.0, 0.0));
        assert!((l - 1.0).abs() < 1e-14);
    }

    #[test]
    fn equilateral_quality_is_one() {
        let q = metric_quality(
            &MetricField::euclidean(),
            &Point::zeros(),
            &Point::new(1.0, 0.0),
            &Point::new(0.5, 0.75f64.sqrt()),
        );
        assert!((q - 1.0).abs() < 1e-12);
    }

    #[test]
    fn validation_catches_defects() {
        let mut m = Triangulation {
            vertices: vec![Point::zeros(), Point::new(1.0, 0.0), Point::new(0.0, 1.0)],
            triangles: vec![[0, 1, 2]],
            boundary_edges: vec![
                BoundaryEdge { a: 0, b: 1, tag: 0 },
                BoundaryEdge { a: 1, b: 2, tag: 0 },
                BoundaryEdge { a: 2, b: 0, tag: 0 },
            ],
        };
        m.validate().unwrap();
        m.triangles[0] = [0, 2, 1];
        assert!(m.validate().is_err());
        m.triangles[0] = [0, 1, 2];
        m.boundary_edges.pop();
        assert!(m.validate().is_err());
    }
}
