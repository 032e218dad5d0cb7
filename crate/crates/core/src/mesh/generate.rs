use crate::geometry::domain::{distance_to_polygon, point_in_polygon, polygon_area, ChartDomain, DomainShape};
use crate::mesh::{delaunay, side, BoundaryEdge, Triangulation};
use crate::{Error, Point, Result};

/// Edge length of an equilateral triangle such that `count` of them tile `area`.
pub fn target_spacing(area: f64, count: usize) -> f64 {
    (4.0 * area / (3f64.sqrt() * count as f64)).sqrt()
}

impl Triangulation {
    /// Structured mesh of the chart.
    ///
    /// Rectangles get an `n × n` grid of squares, each split along its rising diagonal.
    /// Curved domains get arclength-resampled boundaries and a Delaunay fill at spacing
    /// `max(width, height) / n`.
    pub fn structured(domain: &ChartDomain, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::DegenerateDomain("n must be at least 1".into()));
        }
        domain.validate()?;
        match &domain.shape {
            DomainShape::Rectangle { min, max } => Ok(Self::grid(*min, *max, n)),
            DomainShape::Curved(_) => {
                let (lo, hi) = domain.bounding_box();
                Self::delaunay_fill(domain, (hi - lo).max() / n as f64)
            }
        }
    }

    fn grid(min: Point, max: Point, n: usize) -> Self {
        let step = (max - min) / n as f64;
        let id = |i: usize, j: usize| j * (n + 1) + i;
        let coord = |i: usize, lo: f64, hi: f64, h: f64| if i == n { hi } else { lo + i as f64 * h };
        let mut vertices = Vec::with_capacity((n + 1) * (n + 1));
        for j in 0..=n {
            for i in 0..=n {
                vertices.push(Point::new(coord(i, min.x, max.x, step.x), coord(j, min.y, max.y, step.y)));
            }
        }
        let mut triangles = Vec::with_capacity(2 * n * n);
        for j in 0..n {
            for i in 0..n {
                let (a, b, c, d) = (id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1));
                triangles.push([a, b, c]);
                triangles.push([a, c, d]);
            }
        }
        let mut boundary_edges = Vec::with_capacity(4 * n);
        for k in 0..n {
            boundary_edges.push(BoundaryEdge { a: id(k, 0), b: id(k + 1, 0), tag: side::BOTTOM });
            boundary_edges.push(BoundaryEdge { a: id(n, k), b: id(n, k + 1), tag: side::RIGHT });
            boundary_edges.push(BoundaryEdge { a: id(k + 1, n), b: id(k, n), tag: side::TOP });
            boundary_edges.push(BoundaryEdge { a: id(0, k + 1), b: id(0, k), tag: side::LEFT });
        }
        Self { vertices, triangles, boundary_edges }
    }

    /// Mesh of a curved domain with roughly `target` triangles.
    pub fn with_triangle_count(domain: &ChartDomain, target: usize) -> Result<Self> {
        if target < 2 {
            return Err(Error::DegenerateDomain("target triangle count must be at least 2".into()));
        }
        domain.validate()?;
        if let DomainShape::Rectangle { .. } = domain.shape {
            let n = ((target as f64 / 2.0).sqrt().round() as usize).max(1);
            return Self::structured(domain, n);
        }
        let mut h = target_spacing(domain.area(), target);
        let mut best: Option<Self> = None;
        for _ in 0..30 {
            let mesh = Self::delaunay_fill(domain, h)?;
            let count = mesh.n_triangles();
            let miss = (count as f64 / target as f64 - 1.0).abs();
            if best.as_ref().is_none_or(|b| miss < (b.n_triangles() as f64 / target as f64 - 1.0).abs()) {
                best = Some(mesh);
            }
            if miss < 0.03 {
                break;
            }
            h *= (count as f64 / target as f64).powf(0.45);
        }
        Ok(best.unwrap())
    }

    fn delaunay_fill(domain: &ChartDomain, h: f64) -> Result<Self> {
        let DomainShape::Curved(curves) = &domain.shape else {
            return Err(Error::DegenerateDomain("delaunay fill needs a curved domain".into()));
        };
        if !(h > 0.0) {
            return Err(Error::DegenerateDomain(format!("spacing {h}")));
        }
        let mut points = Vec::new();
        let mut tags = Vec::new();
        for c in curves {
            let segs = ((c.length() / h).round() as usize).max(1);
            let pts = c.resample(segs);
            for p in &pts[..segs] {
                points.push(*p);
                tags.push(c.tag);
            }
        }
        let nb = points.len();
        let boundary: Vec<Point> = points.clone();

        let (lo, hi) = domain.bounding_box();
        let row = h * 0.75f64.sqrt();
        let rows = ((hi.y - lo.y) / row).ceil() as usize + 1;
        let cols = ((hi.x - lo.x) / h).ceil() as usize + 2;
        for r in 0..rows {
            let y = lo.y + r as f64 * row;
            let shift = if r % 2 == 1 { 0.5 * h } else { 0.0 };
            for c in 0..cols {
                let p = Point::new(lo.x + shift + c as f64 * h, y);
                if point_in_polygon(&p, &boundary) && distance_to_polygon(&p, &boundary) > 0.55 * h {
                    points.push(p);
                }
            }
        }

        let mut triangles = delaunay::triangulate(&points);
        triangles.retain(|t| {
            let centroid = (points[t[0]] + points[t[1]] + points[t[2]]) / 3.0;
            point_in_polygon(&centroid, &boundary)
        });
        let boundary_edges =
            (0..nb).map(|i| BoundaryEdge { a: i, b: (i + 1) % nb, tag: tags[i] }).collect();
        let mesh = Self { vertices: points, triangles, boundary_edges };
        mesh.validate()?;
        let poly_area = polygon_area(&boundary);
        if ((mesh.area() - poly_area) / poly_area).abs() > 1e-10 {
            return Err(Error::InvalidMesh(format!(
                "triangulation covers {} of polygon area {poly_area}",
                mesh.area()
            )));
        }
        Ok(mesh)
    }
}
