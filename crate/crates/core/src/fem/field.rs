use crate::fem::assembly::{triangle_points, Problem};
use crate::fem::element::barycentric_gradients;
use crate::fem::quadrature::quadrature_degree5;
use crate::fem::FeSpace;
use crate::geometry::{AnalyticVectorField, MetricField};
use crate::{Error, Mat2, Point, Result};

/// Finite-element vector field: dof values on a space.
#[derive(Debug, Clone)]
pub struct DiscreteField<'a> {
    pub space: &'a FeSpace,
    pub values: Vec<f64>,
}

impl<'a> DiscreteField<'a> {
    pub fn new(space: &'a FeSpace, values: Vec<f64>) -> Result<Self> {
        if values.len() != space.n_dofs() {
            return Err(Error::DimensionMismatch(format!("{} values for {} dofs", values.len(), space.n_dofs())));
        }
        Ok(Self { space, values })
    }

    pub fn zeros(space: &'a FeSpace) -> Self {
        Self { space, values: vec![0.0; space.n_dofs()] }
    }

    /// Nodal interpolant; each glued class takes its value from its first node.
    pub fn interpolate_fn(space: &'a FeSpace, f: impl Fn(&Point) -> Point) -> Self {
        let mut values = vec![0.0; space.n_dofs()];
        let mut set = vec![false; space.n_dofs()];
        for (node, x) in space.nodes.iter().enumerate() {
            let mut u: Option<Point> = None;
            for c in 0..2 {
                if let Some((d, s)) = space.dofmap.dof(node, c) {
                    if !set[d] {
                        let u = *u.get_or_insert_with(|| f(x));
                        values[d] = s * u[c];
                        set[d] = true;
                    }
                }
            }
        }
        Self { space, values }
    }

    pub fn interpolate(space: &'a FeSpace, field: &AnalyticVectorField) -> Self {
        Self::interpolate_fn(space, |x| field.value(x))
    }

    /// Value at a node, with gluing signs applied.
    pub fn node_value(&self, node: usize) -> Point {
        let mut u = Point::zeros();
        for c in 0..2 {
            if let Some((d, s)) = self.space.dofmap.dof(node, c) {
                u[c] = s * self.values[d];
            }
        }
        u
    }

    /// Re-interpolate `f(x, u(x))` from the nodal values.
    pub fn map_nodal(&self, f: impl Fn(&Point, &Point) -> Point) -> Self {
        let mut values = vec![0.0; self.values.len()];
        let mut set = vec![false; self.values.len()];
        for (node, x) in self.space.nodes.iter().enumerate() {
            for c in 0..2 {
                if let Some((d, s)) = self.space.dofmap.dof(node, c) {
                    if !set[d] {
                        values[d] = s * f(x, &self.node_value(node))[c];
                        set[d] = true;
                    }
                }
            }
        }
        Self { space: self.space, values }
    }

    /// Value and partials `du[(k, j)] = ∂_j u^k` inside triangle `t` at barycentric `l`.
    pub fn on_triangle(&self, t: usize, l: &[f64; 3]) -> (Point, Mat2) {
        let [a, b, c] = self.space.mesh.corners(t);
        let (gl, _) = barycentric_gradients(&a, &b, &c);
        let e = &self.space.element;
        let phi = e.values(l);
        let grad = e.gradients(l, &gl);
        let mut u = Point::zeros();
        let mut du = Mat2::zeros();
        for (i, &node) in self.space.triangle_nodes(t).iter().enumerate() {
            let un = self.node_value(node);
            u += un * phi[i];
            du += un * grad[i].transpose();
        }
        (u, du)
    }

    /// Value and partial derivatives at a chart point.
    pub fn evaluate(&self, x: &Point) -> Result<(Point, Mat2)> {
        let (t, l) = self.space.mesh.locate(x, 1e-12).ok_or(Error::PointOutsideMesh(*x))?;
        Ok(self.on_triangle(t, &l))
    }

    /// Value and covariant derivative `u^k_{;j}` at a chart point.
    pub fn evaluate_covariant(&self, x: &Point, metric: &MetricField) -> Result<(Point, Mat2)> {
        let (u, du) = self.evaluate(x)?;
        Ok((u, crate::geometry::covariant_derivative(metric, x, &u, &du)?))
    }

    /// `a(self, other)` by element quadrature, independent of the assembled matrix.
    pub fn energy_with(&self, other: &DiscreteField<'_>, metric: &MetricField, problem: Problem) -> Result<f64> {
        let rule = quadrature_degree5();
        let mut total = 0.0;
        for t in 0..self.space.mesh.n_triangles() {
            for (p, l) in triangle_points(self.space, metric, t, &rule)?.iter().zip(&rule.points) {
                let (u, du) = self.on_triangle(t, l);
                let (v, dv) = other.on_triangle(t, l);
                let a = p.geo.covariant_derivative(&u, &du);
                let b = p.geo.covariant_derivative(&v, &dv);
                total += p.weight * p.geo.density * problem.density(&p.geo, &a, &b);
            }
        }
        Ok(total)
    }

    pub fn energy(&self, metric: &MetricField, problem: Problem) -> Result<f64> {
        self.energy_with(self, metric, problem)
    }

    pub fn scaled(&self, alpha: f64) -> Self {
        Self { space: self.space, values: self.values.iter().map(|v| alpha * v).collect() }
    }

    /// `Σ c_i f_i` over fields on the same space.
    pub fn combination(space: &'a FeSpace, coefficients: &[f64], fields: &[DiscreteField<'_>]) -> Self {
        let mut values = vec![0.0; space.n_dofs()];
        for (c, f) in coefficients.iter().zip(fields) {
            for (v, w) in values.iter_mut().zip(&f.values) {
                *v += c * w;
            }
        }
        Self { space, values }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fem::ElementOrder;
    use crate::geometry::{catalog, ChartDomain};
    use crate::mesh::{Gluing, Triangulation};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn constant_field_evaluates_exactly() {
        let mesh = Triangulation::structured(&ChartDomain::periodic_square(Gluing::PeriodicBoth), 4).unwrap();
        let space = FeSpace::new(&mesh, ElementOrder::P1, Gluing::PeriodicBoth, 1e-9).unwrap();
        let f = DiscreteField::interpolate_fn(&space, |_| Point::new(1.0, 0.0));
        let (u, du) = f.evaluate(&Point::new(1.234, 5.0)).unwrap();
        assert!((u - Point::new(1.0, 0.0)).norm() < 1e-15);
        assert!(du.norm() < 1e-14);
        assert!(matches!(f.evaluate(&Point::new(-1.0, 0.5)), Err(Error::PointOutsideMesh(_))));
    }

    #[test]
    fn p2_reproduces_quadratics() {
        let mesh = Triangulation::structured(&ChartDomain::periodic_square(Gluing::None), 3).unwrap();
        let space = FeSpace::new(&mesh, ElementOrder::P2, Gluing::None, 1e-9).unwrap();
        let q = |x: &Point| Point::new(x.x * x.x - 2.0 * x.x * x.y + 1.0, 0.5 * x.y * x.y + x.x);
        let f = DiscreteField::interpolate_fn(&space, q);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let x = Point::new(rng.gen_range(0.0..6.2), rng.gen_range(0.0..6.2));
            let (u, du) = f.evaluate(&x).unwrap();
            assert!((u - q(&x)).norm() < 1e-12);
            let exact = Mat2::new(2.0 * x.x - 2.0 * x.y, -2.0 * x.x, 1.0, x.y);
            assert!((du - exact).norm() < 1e-11);
        }
    }

    #[test]
    fn p1_reproduces_enneper_rotation() {
        let m = catalog::enneper();
        let mesh = Triangulation::with_triangle_count(&m.chart, 100).unwrap();
        let space = FeSpace::new(&mesh, ElementOrder::P1, Gluing::None, 1e-9).unwrap();
        let f = DiscreteField::interpolate(&space, &m.known_killing[0]);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..100 {
            let x = m.chart.sample_interior(&mut rng, 0.05);
            let (u, _) = f.evaluate(&x).unwrap();
            assert!((u - Point::new(-x.y, x.x)).norm() < 1e-13);
        }
    }

    #[test]
    fn klein_interpolation_respects_flip() {
        let k = catalog::klein_bottle();
        let mesh = Triangulation::structured(&k.chart, 4).unwrap();
        let space = FeSpace::new(&mesh, ElementOrder::P1, Gluing::KleinFlip, 1e-9).unwrap();
        let f = DiscreteField::interpolate_fn(&space, |_| Point::new(0.0, 1.0));
        for node in 0..space.n_nodes() {
            assert_eq!(f.node_value(node), Point::new(0.0, 1.0));
        }
    }
}
