//! Pointwise differential geometry on a 2D chart: connection coefficients, covariant
//! derivatives of vector fields, the Killing/conformal Killing operators, Gaussian
//! curvature and the quarter-turn rotation `K`.

use crate::geometry::metric::{invert_spd, MetricField};
use crate::{Error, Mat2, Point, Result};

/// Connection coefficients `Γ^k_ij`, stored as `self.0[k][i][j]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Christoffel(pub [[[f64; 2]; 2]; 2]);

impl Christoffel {
    pub fn zero() -> Self {
        Self([[[0.0; 2]; 2]; 2])
    }

    #[inline]
    pub fn get(&self, k: usize, i: usize, j: usize) -> f64 {
        self.0[k][i][j]
    }

    /// Assemble from a metric value, its inverse and first partials.
    pub fn from_parts(ginv: &Mat2, dg: &[Mat2; 2]) -> Self {
        let mut gamma = [[[0.0; 2]; 2]; 2];
        for (k, gk) in gamma.iter_mut().enumerate() {
            for i in 0..2 {
                for j in 0..2 {
                    let mut s = 0.0;
                    for l in 0..2 {
                        s += ginv[(k, l)] * (dg[i][(j, l)] + dg[j][(i, l)] - dg[l][(i, j)]);
                    }
                    gk[i][j] = 0.5 * s;
                }
            }
        }
        Self(gamma)
    }
}

/// Metric data at one point, shared by every operator evaluated there.
#[derive(Debug, Clone, Copy)]
pub struct LocalGeometry {
    pub g: Mat2,
    pub ginv: Mat2,
    pub density: f64,
    pub gamma: Christoffel,
}

impl LocalGeometry {
    pub fn at(metric: &MetricField, x: &Point) -> Result<Self> {
        metric.require_2d()?;
        let g = metric.g(x);
        let (ginv, det) = invert_spd(&g).ok_or(Error::DegenerateMetric { at: *x, det: g.determinant() })?;
        let gamma = Christoffel::from_parts(&ginv, &metric.dg(x));
        Ok(Self { g, ginv, density: det.sqrt(), gamma })
    }

    /// `u^k_{;j} = u^k_{,j} + Γ^k_{ij} u^i`, with `du[(k, j)] = ∂_j u^k`.
    pub fn covariant_derivative(&self, u: &Point, du: &Mat2) -> Mat2 {
        let mut out = *du;
        for k in 0..2 {
            for j in 0..2 {
                out[(k, j)] += self.gamma.get(k, 0, j) * u[0] + self.gamma.get(k, 1, j) * u[1];
            }
        }
        out
    }

    /// Fiber inner product of (1,1) tensors, `g(A, B) = A^k_l g^{jl} B^i_j g_{ik}`.
    pub fn tensor_inner(&self, a: &Mat2, b: &Mat2) -> f64 {
        (a * self.ginv * b.transpose() * self.g).trace()
    }

    /// Contravariant `S^{ik} = g^{kj} u^i_{;j} + g^{ij} u^k_{;j}` from `∇u`.
    pub fn s_from_gradient(&self, grad: &Mat2) -> Mat2 {
        let t = grad * self.ginv;
        t + t.transpose()
    }

    /// `C = S − div(u) g^{-1}` (the `2/n` factor with `n = 2`).
    pub fn c_from_gradient(&self, grad: &Mat2) -> Mat2 {
        self.s_from_gradient(grad) - self.ginv * grad.trace()
    }

    /// `a_K` integrand `g(∇u, ∇v) + tr(∇u ∇v)`, evaluated as `½ g(S_u, S_v)` so that it
    /// vanishes to rounding when either field is Killing.
    #[inline]
    pub fn killing_density(&self, a: &Mat2, b: &Mat2) -> f64 {
        half_contracted(&(self.s_from_gradient(a) * self.g), &(self.s_from_gradient(b) * self.g))
    }

    /// `a_C` integrand, `a_K` integrand minus `div(u) div(v)`, as `½ g(C_u, C_v)`.
    #[inline]
    pub fn conformal_density(&self, a: &Mat2, b: &Mat2) -> f64 {
        half_contracted(&(self.c_from_gradient(a) * self.g), &(self.c_from_gradient(b) * self.g))
    }
}

/// `½ tr(X Y)`.
#[inline]
pub(crate) fn half_contracted(x: &Mat2, y: &Mat2) -> f64 {
    0.5 * (x[(0, 0)] * y[(0, 0)] + x[(0, 1)] * y[(1, 0)] + x[(1, 0)] * y[(0, 1)] + x[(1, 1)] * y[(1, 1)])
}

pub fn christoffel(metric: &MetricField, x: &Point) -> Result<Christoffel> {
    Ok(LocalGeometry::at(metric, x)?.gamma)
}

/// Covariant derivative `∇u` as the (1,1) tensor `u^k_{;j}` (row `k`, column `j`).
pub fn covariant_derivative(metric: &MetricField, x: &Point, u: &Point, du: &Mat2) -> Result<Mat2> {
    Ok(LocalGeometry::at(metric, x)?.covariant_derivative(u, du))
}

pub fn s_operator(metric: &MetricField, x: &Point, u: &Point, du: &Mat2) -> Result<Mat2> {
    let geo = LocalGeometry::at(metric, x)?;
    Ok(geo.s_from_gradient(&geo.covariant_derivative(u, du)))
}

pub fn c_operator(metric: &MetricField, x: &Point, u: &Point, du: &Mat2) -> Result<Mat2> {
    let geo = LocalGeometry::at(metric, x)?;
    Ok(geo.c_from_gradient(&geo.covariant_derivative(u, du)))
}

/// `div(u) = u^k_{;k}`.
pub fn divergence(metric: &MetricField, x: &Point, u: &Point, du: &Mat2) -> Result<f64> {
    Ok(covariant_derivative(metric, x, u, du)?.trace())
}

/// Gaussian curvature from the Brioschi formula. Needs second partials of `g`.
pub fn gaussian_curvature(metric: &MetricField, x: &Point) -> Result<f64> {
    metric.require_2d()?;
    let g = metric.g(x);
    let det = g.determinant();
    if !(det > 0.0 && det.is_finite()) {
        return Err(Error::DegenerateMetric { at: *x, det });
    }
    let dg = metric.dg(x);
    let d2 = metric.d2g(x);
    let (e, f, gg) = (g[(0, 0)], g[(0, 1)], g[(1, 1)]);
    let (e_u, e_v) = (dg[0][(0, 0)], dg[1][(0, 0)]);
    let (f_u, f_v) = (dg[0][(0, 1)], dg[1][(0, 1)]);
    let (g_u, g_v) = (dg[0][(1, 1)], dg[1][(1, 1)]);
    let e_vv = d2[1][1][(0, 0)];
    let f_uv = d2[0][1][(0, 1)];
    let g_uu = d2[0][0][(1, 1)];

    let m1 = nalgebra::Matrix3::new(
        -0.5 * e_vv + f_uv - 0.5 * g_uu, 0.5 * e_u, f_u - 0.5 * e_v,
        f_v - 0.5 * g_u, e, f,
        0.5 * g_v, f, gg,
    );
    let m2 = nalgebra::Matrix3::new(
        0.0, 0.5 * e_v, 0.5 * g_u,
        0.5 * e_v, e, f,
        0.5 * g_u, f, gg,
    );
    Ok((m1.determinant() - m2.determinant()) / (det * det))
}

/// Closed-form curvature when the metric carries one, Brioschi otherwise.
pub fn curvature(metric: &MetricField, x: &Point) -> Result<f64> {
    match metric.closed_form_curvature(x) {
        Some(k) => Ok(k),
        None => gaussian_curvature(metric, x),
    }
}

/// Quarter-turn `v^k = g^{ki} ε_{ij} u^j` with `ε = √det g (dx1⊗dx2 − dx2⊗dx1)`.
pub fn rotate_k(metric: &MetricField, x: &Point, u: &Point) -> Result<Point> {
    metric.require_2d()?;
    let (ginv, det) = metric.inverse(x)?;
    Ok(rotate_with(&ginv, det.sqrt(), u))
}

#[inline]
pub(crate) fn rotate_with(ginv: &Mat2, density: f64, u: &Point) -> Point {
    ginv * Point::new(density * u.y, -density * u.x)
}

/// Index-lowered tensor `g S g` used by the symmetry checks.
pub fn lower_both(g: &Mat2, s: &Mat2) -> Mat2 {
    g * s * g
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::catalog;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn torus() -> MetricField {
        catalog::standard_torus().metric
    }

    #[test]
    fn flat_christoffel_vanishes() {
        let g = christoffel(&MetricField::euclidean(), &Point::new(0.3, 4.0)).unwrap();
        assert_eq!(g, Christoffel::zero());
    }

    #[test]
    fn torus_christoffel_at_quarter_turn() {
        let g = christoffel(&torus(), &Point::new(FRAC_PI_2, 0.4)).unwrap();
        for k in 0..2 {
            for i in 0..2 {
                for j in 0..2 {
                    let expected = match (k, i, j) {
                        (0, 1, 1) => 2.0,
                        (1, 0, 1) | (1, 1, 0) => -0.5,
                        _ => 0.0,
                    };
                    assert!((g.get(k, i, j) - expected).abs() < 1e-15, "{k}{i}{j}");
                }
            }
        }
    }

    #[test]
    fn enneper_christoffel_at_unit_point() {
        let g = christoffel(&catalog::enneper().metric, &Point::new(1.0, 0.0)).unwrap();
        assert!((g.get(0, 0, 0) - 1.0).abs() < 1e-14);
        assert!((g.get(0, 1, 1) + 1.0).abs() < 1e-14);
    }

    #[test]
    fn christoffel_matches_finite_differences() {
        // Γ from central differences of g only, independent of the closed-form dg.
        for m in [catalog::enneper(), catalog::standard_torus(), catalog::klein_bottle()] {
            let metric = &m.metric;
            let x = Point::new(0.31, 0.42);
            let h = 1e-6;
            let mut dg = [Mat2::zeros(); 2];
            for (k, d) in dg.iter_mut().enumerate() {
                let mut e = Point::zeros();
                e[k] = h;
                *d = (metric.g(&(x + e)) - metric.g(&(x - e))) / (2.0 * h);
            }
            let (ginv, _) = metric.inverse(&x).unwrap();
            let fd = Christoffel::from_parts(&ginv, &dg);
            let exact = christoffel(metric, &x).unwrap();
            for k in 0..2 {
                for i in 0..2 {
                    for j in 0..2 {
                        assert!((fd.get(k, i, j) - exact.get(k, i, j)).abs() < 1e-8, "{}", m.name);
                    }
                }
            }
        }
    }

    #[test]
    fn covariant_derivative_examples() {
        let flat = MetricField::euclidean();
        let x = Point::new(0.2, 0.9);
        let u = Point::new(x.y, -x.x);
        let du = Mat2::new(0.0, 1.0, -1.0, 0.0);
        assert_eq!(covariant_derivative(&flat, &x, &u, &du).unwrap(), du);

        let x = Point::new(FRAC_PI_2, 1.0);
        let grad = covariant_derivative(&torus(), &x, &Point::new(0.0, 1.0), &Mat2::zeros()).unwrap();
        assert!((grad - Mat2::new(0.0, 2.0, -0.5, 0.0)).abs().max() < 1e-15);

        let zero = covariant_derivative(&torus(), &x, &Point::zeros(), &Mat2::zeros()).unwrap();
        assert_eq!(zero, Mat2::zeros());
    }

    #[test]
    fn torus_rotational_field_is_killing_and_rotated_is_conformal() {
        let metric = torus();
        for &t in &[0.0, 0.7, 2.0, PI, 5.1] {
            let x = Point::new(t, 1.1);
            let s = s_operator(&metric, &x, &Point::new(0.0, 1.0), &Mat2::zeros()).unwrap();
            assert!(s.abs().max() < 1e-14);

            let v = Point::new(2.0 + t.cos(), 0.0);
            let dv = Mat2::new(-t.sin(), 0.0, 0.0, 0.0);
            let c = c_operator(&metric, &x, &v, &dv).unwrap();
            assert!(c.abs().max() < 1e-14);
            let s = s_operator(&metric, &x, &v, &dv).unwrap();
            if t.sin().abs() > 1e-3 {
                assert!(s.abs().max() > 1e-3);
            }
        }
    }

    #[test]
    fn c_operator_is_trace_free() {
        let metric = catalog::klein_bottle().metric;
        let x = Point::new(1.2, 0.3);
        let u = Point::new(0.4, -1.3);
        let du = Mat2::new(0.3, -0.2, 1.7, 0.5);
        let geo = LocalGeometry::at(&metric, &x).unwrap();
        let c = c_operator(&metric, &x, &u, &du).unwrap();
        assert!((geo.g * c).trace().abs() < 1e-12);
        // lowered S is twice the symmetrized lowered covariant derivative
        let grad = geo.covariant_derivative(&u, &du);
        let s = geo.s_from_gradient(&grad);
        let lowered = geo.g * grad;
        let expected = lowered + lowered.transpose();
        assert!((lower_both(&geo.g, &s) - expected).abs().max() < 1e-12);
    }

    #[test]
    fn curvature_examples() {
        let k = gaussian_curvature(&catalog::enneper().metric, &Point::zeros()).unwrap();
        assert!((k + 4.0).abs() < 1e-12);
        assert_eq!(gaussian_curvature(&catalog::flat_torus().metric, &Point::new(1.0, 2.0)).unwrap(), 0.0);
        let k = gaussian_curvature(&torus(), &Point::new(0.0, 0.3)).unwrap();
        assert!((k - 1.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn rotation_examples() {
        let v = rotate_k(&MetricField::euclidean(), &Point::new(0.5, 0.5), &Point::new(1.0, 0.0)).unwrap();
        assert!((v - Point::new(0.0, -1.0)).norm() < 1e-15);
        let v = rotate_k(&torus(), &Point::new(0.8, 0.1), &Point::new(0.0, 1.0)).unwrap();
        assert!((v - Point::new(2.0 + 0.8f64.cos(), 0.0)).norm() < 1e-14);
        // with the ε orientation above the Klein chart gives +√a/2 at x1 = π
        let v = rotate_k(&catalog::klein_bottle().metric, &Point::new(PI, 0.0), &Point::new(0.0, 1.0)).unwrap();
        assert!((v.x.abs() - 1.0).abs() < 1e-14 && v.y.abs() < 1e-15);
    }

    #[test]
    fn rotation_is_an_isometry() {
        let metric = catalog::enneper().metric;
        let x = Point::new(0.3, -0.4);
        let u = Point::new(1.3, 0.7);
        let v = rotate_k(&metric, &x, &u).unwrap();
        assert!((metric.inner(&x, &u, &u) - metric.inner(&x, &v, &v)).abs() < 1e-13);
        assert!(metric.inner(&x, &u, &v).abs() < 1e-13);
    }

    #[test]
    fn unsupported_dimension_fails() {
        let m = MetricField::euclidean().with_dim(3);
        let x = Point::zeros();
        assert!(matches!(christoffel(&m, &x), Err(Error::UnsupportedDimension(3))));
        assert!(matches!(rotate_k(&m, &x, &x), Err(Error::UnsupportedDimension(3))));
    }
}
