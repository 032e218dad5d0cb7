//! Error norms against analytic fields, span-projection errors, order fits and the
//! integral identity satisfied by Killing fields.

mod convergence;
mod experiment;

pub use convergence::{fit_order, ColumnFit, ConvergenceRow, ConvergenceStudy, SATURATION_LEVEL};
pub use experiment::{Experiment, FieldError, Resolution, Run, GLUING_TOL};

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::fem::{quadrature_degree5, DiscreteField, Problem};
use crate::geometry::{curvature, AnalyticVectorField, LocalGeometry, MetricField};
use crate::mesh::Triangulation;
use crate::{Error, Mat2, Point, Result};

/// A vector field that can be sampled inside the triangles of a mesh.
///
/// `sample` returns the value and partials `du[(k, j)] = ∂_j u^k` at chart point `x`, which
/// lies in triangle `t` at barycentric coordinates `l`.
pub trait VectorField: Sync {
    fn sample(&self, t: usize, l: &[f64; 3], x: &Point) -> (Point, Mat2);
}

impl VectorField for AnalyticVectorField {
    fn sample(&self, _t: usize, _l: &[f64; 3], x: &Point) -> (Point, Mat2) {
        (self.value(x), self.jacobian(x))
    }
}

/// Sampled on its own space's mesh; pass that mesh to the norm functions.
impl VectorField for DiscreteField<'_> {
    fn sample(&self, t: usize, l: &[f64; 3], _x: &Point) -> (Point, Mat2) {
        self.on_triangle(t, l)
    }
}

/// `Σ c_i f_i`.
pub struct Combination<'a> {
    pub terms: Vec<(f64, &'a dyn VectorField)>,
}

impl VectorField for Combination<'_> {
    fn sample(&self, t: usize, l: &[f64; 3], x: &Point) -> (Point, Mat2) {
        let mut u = Point::zeros();
        let mut du = Mat2::zeros();
        for (c, f) in &self.terms {
            let (v, dv) = f.sample(t, l, x);
            u += *c * v;
            du += *c * dv;
        }
        (u, du)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Norm {
    L2,
    H1,
}

/// Sum over quadrature points of `f(weight · √det g, geometry, x, t, l)`, in triangle order.
fn integrate<T, F>(mesh: &Triangulation, metric: &MetricField, zero: T, f: F) -> Result<T>
where
    T: Clone + Send + Sync + std::ops::AddAssign,
    F: Fn(f64, &LocalGeometry, &Point, usize, &[f64; 3], &mut T) + Sync,
{
    let rule = quadrature_degree5();
    let parts: Vec<Result<T>> = (0..mesh.n_triangles())
        .into_par_iter()
        .map(|t| {
            let [a, b, c] = mesh.corners(t);
            let area = mesh.signed_area(t);
            let mut acc = zero.clone();
            for (l, w) in rule.points.iter().zip(&rule.weights) {
                let x = a * l[0] + b * l[1] + c * l[2];
                let geo = LocalGeometry::at(metric, &x)?;
                f(w * area * geo.density, &geo, &x, t, l, &mut acc);
            }
            Ok(acc)
        })
        .collect();
    let mut total = zero;
    for p in parts {
        total += p?;
    }
    Ok(total)
}

/// Gram matrix of `fields` in the chosen norm's inner product.
pub fn gram(fields: &[&dyn VectorField], mesh: &Triangulation, metric: &MetricField, norm: Norm) -> Result<DMatrix<f64>> {
    let n = fields.len();
    integrate(mesh, metric, DMatrix::zeros(n, n), |w, geo, x, t, l, acc| {
        let samples: Vec<(Point, Mat2)> = fields
            .iter()
            .map(|f| {
                let (u, du) = f.sample(t, l, x);
                (u, geo.covariant_derivative(&u, &du))
            })
            .collect();
        for i in 0..n {
            for j in i..n {
                let (u, a) = &samples[i];
                let (v, b) = &samples[j];
                let mut s = u.dot(&(geo.g * v));
                if norm == Norm::H1 {
                    s += geo.tensor_inner(a, b);
                }
                acc[(i, j)] += w * s;
                if i != j {
                    acc[(j, i)] += w * s;
                }
            }
        }
    })
}

pub fn norm(field: &dyn VectorField, mesh: &Triangulation, metric: &MetricField, which: Norm) -> Result<f64> {
    Ok(gram(&[field], mesh, metric, which)?[(0, 0)].max(0.0).sqrt())
}

/// `(∫ g(u, u) dA)^{1/2}`.
pub fn l2_norm(field: &dyn VectorField, mesh: &Triangulation, metric: &MetricField) -> Result<f64> {
    norm(field, mesh, metric, Norm::L2)
}

/// `(∫ g(u, u) + g(∇u, ∇u) dA)^{1/2}`.
pub fn h1_norm(field: &dyn VectorField, mesh: &Triangulation, metric: &MetricField) -> Result<f64> {
    norm(field, mesh, metric, Norm::H1)
}

/// Normalized Gram eigenvalues below this count as rank deficiency.
const RANK_TOL: f64 = 1e-12;

/// Best-approximation coefficients of `target` in the span of `basis`.
pub fn best_coefficients(
    basis: &[&dyn VectorField],
    target: &dyn VectorField,
    mesh: &Triangulation,
    metric: &MetricField,
    which: Norm,
) -> Result<Vec<f64>> {
    let n = basis.len();
    let mut all: Vec<&dyn VectorField> = basis.to_vec();
    all.push(target);
    let g = gram(&all, mesh, metric, which)?;
    let scale: Vec<f64> = (0..n).map(|i| g[(i, i)].sqrt()).collect();
    if scale.iter().any(|s| !(*s > 0.0)) {
        return Err(Error::DegenerateSpan(n));
    }
    let normalized = DMatrix::from_fn(n, n, |i, j| g[(i, j)] / (scale[i] * scale[j]));
    let eig = normalized.clone().symmetric_eigen();
    if eig.eigenvalues.iter().any(|&v| v < RANK_TOL * n as f64) {
        return Err(Error::DegenerateSpan(n));
    }
    let rhs = DMatrix::from_fn(n, 1, |i, _| g[(i, n)] / scale[i]);
    let y = normalized.cholesky().ok_or(Error::DegenerateSpan(n))?.solve(&rhs);
    Ok((0..n).map(|i| y[(i, 0)] / scale[i]).collect())
}

/// For each exact field `e`, `min_c ‖Σ c_i u_i − e‖ / ‖e‖`.
///
/// The residual is integrated directly rather than through the Gram identity, so errors
/// far below `√ε` are still resolved.
pub fn subspace_error(
    computed: &[&dyn VectorField],
    exact: &[&dyn VectorField],
    mesh: &Triangulation,
    metric: &MetricField,
    which: Norm,
) -> Result<Vec<f64>> {
    if computed.is_empty() || exact.is_empty() {
        return Err(Error::DegenerateSpan(0));
    }
    exact
        .iter()
        .map(|&e| {
            let c = best_coefficients(computed, e, mesh, metric, which)?;
            let mut terms: Vec<(f64, &dyn VectorField)> = computed.iter().zip(&c).map(|(f, c)| (*c, *f)).collect();
            terms.push((-1.0, e));
            let residual = norm(&Combination { terms }, mesh, metric, which)?;
            Ok(residual / norm(e, mesh, metric, which)?)
        })
        .collect()
}

/// Relative defect of `∫ g(∇u, ∇u) = ∫ κ g(u, u)`, which holds for Killing fields and, in
/// two dimensions, for conformal Killing fields (the divergence term carries `1 − 2/n = 0`).
pub fn ricci_identity_residual(field: &dyn VectorField, mesh: &Triangulation, metric: &MetricField, kind: Problem) -> Result<f64> {
    let n = metric.dim() as f64;
    let div_weight = match kind {
        Problem::Killing => 0.0,
        Problem::Conformal => 1.0 - 2.0 / n,
    };
    let err: std::sync::Mutex<Option<Error>> = std::sync::Mutex::new(None);
    let sums = integrate(mesh, metric, Point::zeros(), |w, geo, x, t, l, acc| {
        let (u, du) = field.sample(t, l, x);
        let a = geo.covariant_derivative(&u, &du);
        let kappa = match curvature(metric, x) {
            Ok(k) => k,
            Err(e) => {
                err.lock().unwrap().get_or_insert(e);
                0.0
            }
        };
        let div = a.trace();
        acc[0] += w * geo.tensor_inner(&a, &a);
        acc[1] += w * (kappa * u.dot(&(geo.g * u)) + div_weight * div * div);
    })?;
    if let Some(e) = err.into_inner().unwrap() {
        return Err(e);
    }
    let (lhs, rhs) = (sums[0], sums[1]);
    Ok((lhs - rhs).abs() / lhs.abs().max(rhs.abs()).max(f64::MIN_POSITIVE))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fem::{ElementOrder, FeSpace};
    use crate::geometry::catalog;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::{PI, TAU};

    fn mesh_of(m: &catalog::Manifold, n: usize) -> Triangulation {
        Triangulation::structured(&m.chart, n).unwrap()
    }

    #[test]
    fn flat_constant_norm() {
        let flat = catalog::flat_torus();
        let mesh = mesh_of(&flat, 4);
        let u = AnalyticVectorField::constant("e1", Point::new(1.0, 0.0));
        assert!((l2_norm(&u, &mesh, &flat.metric).unwrap() - TAU).abs() < 1e-12);
        assert!((h1_norm(&u, &mesh, &flat.metric).unwrap() - TAU).abs() < 1e-12);
        let zero = AnalyticVectorField::constant("0", Point::zeros());
        assert_eq!(l2_norm(&zero, &mesh, &flat.metric).unwrap(), 0.0);
    }

    #[test]
    fn torus_rotation_norm_matches_mass_value() {
        // ∫∫ (2 + cos x1)² (2 + cos x1) dx = 2π · ∫ (2 + cos t)³ dt = 2π · 22π
        let torus = catalog::standard_torus();
        let mesh = mesh_of(&torus, 24);
        let u = &torus.known_killing[0];
        let exact = 44.0 * PI * PI;
        let n2 = l2_norm(u, &mesh, &torus.metric).unwrap().powi(2);
        assert!((n2 - exact).abs() < 1e-6 * exact, "{n2} vs {exact}");
        let space = FeSpace::new(&mesh, ElementOrder::P2, mesh_gluing(&torus), 1e-9).unwrap();
        let f = DiscreteField::interpolate(&space, u);
        let m = crate::fem::assemble_mass(&space, &torus.metric).unwrap();
        let discrete = l2_norm(&f, &mesh, &torus.metric).unwrap().powi(2);
        assert!((discrete - m.quadratic_form(&f.values)).abs() < 1e-12 * discrete);
    }

    fn mesh_gluing(m: &catalog::Manifold) -> crate::mesh::Gluing {
        m.chart.gluing
    }

    #[test]
    fn homogeneity() {
        let torus = catalog::standard_torus();
        let mesh = mesh_of(&torus, 6);
        let space = FeSpace::new(&mesh, ElementOrder::P1, torus.chart.gluing, 1e-9).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..5 {
            let f = DiscreteField::new(&space, (0..space.n_dofs()).map(|_| rng.gen_range(-1.0..1.0)).collect()).unwrap();
            let alpha: f64 = rng.gen_range(-3.0..3.0);
            for which in [Norm::L2, Norm::H1] {
                let a = norm(&f.scaled(alpha), &mesh, &torus.metric, which).unwrap();
                let b = alpha.abs() * norm(&f, &mesh, &torus.metric, which).unwrap();
                assert!((a - b).abs() < 1e-12 * b);
            }
        }
    }

    #[test]
    fn subspace_error_of_interpolant_is_interpolation_error() {
        let torus = catalog::standard_torus();
        let mesh = mesh_of(&torus, 8);
        let space = FeSpace::new(&mesh, ElementOrder::P1, torus.chart.gluing, 1e-9).unwrap();
        let e = &torus.known_conformal_killing[0];
        let f = DiscreteField::interpolate(&space, e);
        let err = subspace_error(&[&f], &[e], &mesh, &torus.metric, Norm::L2).unwrap()[0];
        let direct = norm(&Combination { terms: vec![(1.0, &f), (-1.0, e)] }, &mesh, &torus.metric, Norm::L2).unwrap()
            / l2_norm(e, &mesh, &torus.metric).unwrap();
        assert!(err <= direct * (1.0 + 1e-12));
        assert!(err > 0.5 * direct && err < 0.1);
    }

    #[test]
    fn subspace_error_is_rotation_invariant() {
        let torus = catalog::standard_torus();
        let mesh = mesh_of(&torus, 8);
        let space = FeSpace::new(&mesh, ElementOrder::P2, torus.chart.gluing, 1e-9).unwrap();
        let u = DiscreteField::interpolate(&space, &torus.known_killing[0]);
        let v = DiscreteField::interpolate(&space, &torus.known_conformal_killing[0]);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let p = DiscreteField::combination(&space, &[s, s], &[u.clone(), v.clone()]);
        let q = DiscreteField::combination(&space, &[s, -s], &[u.clone(), v.clone()]);
        let q2 = DiscreteField::combination(&space, &[3.0, 0.2], &[p.clone(), q.clone()]);
        let exact: Vec<&dyn VectorField> = vec![&torus.known_killing[0], &torus.known_conformal_killing[0]];
        for which in [Norm::L2, Norm::H1] {
            let base = subspace_error(&[&u, &v], &exact, &mesh, &torus.metric, which).unwrap();
            let rotated = subspace_error(&[&p, &q2], &exact, &mesh, &torus.metric, which).unwrap();
            for (a, b) in base.iter().zip(&rotated) {
                assert!((a - b).abs() < 1e-10, "{a} vs {b}");
                assert!(*a < 1e-2);
            }
        }
    }

    #[test]
    fn orthogonal_field_has_unit_error() {
        let flat = catalog::flat_torus();
        let mesh = mesh_of(&flat, 4);
        let space = FeSpace::new(&mesh, ElementOrder::P1, flat.chart.gluing, 1e-9).unwrap();
        let f = DiscreteField::interpolate(&space, &flat.known_killing[1]);
        let err = subspace_error(&[&f], &[&flat.known_killing[0]], &mesh, &flat.metric, Norm::L2).unwrap();
        assert!((err[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn dependent_fields_are_degenerate() {
        let flat = catalog::flat_torus();
        let mesh = mesh_of(&flat, 4);
        let space = FeSpace::new(&mesh, ElementOrder::P1, flat.chart.gluing, 1e-9).unwrap();
        let f = DiscreteField::interpolate(&space, &flat.known_killing[0]);
        let g = f.scaled(2.0);
        let err = subspace_error(&[&f, &g], &[&flat.known_killing[0]], &mesh, &flat.metric, Norm::L2);
        assert!(matches!(err, Err(Error::DegenerateSpan(2))));
    }

    #[test]
    fn ricci_identity_holds_for_analytic_fields() {
        for m in [catalog::standard_torus(), catalog::klein_bottle()] {
            let mesh = mesh_of(&m, 32);
            let r = ricci_identity_residual(&m.known_killing[0], &mesh, &m.metric, Problem::Killing).unwrap();
            assert!(r < 1e-8, "{}: {r}", m.name);
            let r = ricci_identity_residual(&m.known_conformal_killing[0], &mesh, &m.metric, Problem::Conformal).unwrap();
            assert!(r < 1e-8, "{}: {r}", m.name);
        }
    }

    #[test]
    fn ricci_identity_fails_for_random_fields() {
        let torus = catalog::standard_torus();
        let mesh = mesh_of(&torus, 8);
        let space = FeSpace::new(&mesh, ElementOrder::P1, torus.chart.gluing, 1e-9).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let f = DiscreteField::new(&space, (0..space.n_dofs()).map(|_| rng.gen_range(-1.0..1.0)).collect()).unwrap();
        assert!(ricci_identity_residual(&f, &mesh, &torus.metric, Problem::Killing).unwrap() > 1e-2);
    }
}
