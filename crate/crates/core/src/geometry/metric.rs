use std::fmt;
use std::sync::Arc;

use crate::{Error, Mat2, Point, Result};

type MetricFn = Arc<dyn Fn(&Point) -> Mat2 + Send + Sync>;
type FirstDerivFn = Arc<dyn Fn(&Point) -> [Mat2; 2] + Send + Sync>;
type SecondDerivFn = Arc<dyn Fn(&Point) -> [[Mat2; 2]; 2] + Send + Sync>;
type ScalarFn = Arc<dyn Fn(&Point) -> f64 + Send + Sync>;

/// Step used when second derivatives of the metric are generated by central differences.
pub const D2G_STEP: f64 = 1e-5;

/// A Riemannian metric on a coordinate chart given by closed-form components.
///
/// `dg(x)[k]` holds `∂_k g_ij`, `d2g(x)[k][l]` holds `∂_k ∂_l g_ij`.
#[derive(Clone)]
pub struct MetricField {
    dim: usize,
    g: MetricFn,
    dg: FirstDerivFn,
    d2g: Option<SecondDerivFn>,
    curvature: Option<ScalarFn>,
}

impl fmt::Debug for MetricField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MetricField")
            .field("dim", &self.dim)
            .field("closed_form_d2g", &self.d2g.is_some())
            .field("closed_form_curvature", &self.curvature.is_some())
            .finish()
    }
}

impl MetricField {
    pub fn new<G, DG>(g: G, dg: DG) -> Self
    where
        G: Fn(&Point) -> Mat2 + Send + Sync + 'static,
        DG: Fn(&Point) -> [Mat2; 2] + Send + Sync + 'static,
    {
        Self { dim: 2, g: Arc::new(g), dg: Arc::new(dg), d2g: None, curvature: None }
    }

    pub fn with_d2g<F>(mut self, d2g: F) -> Self
    where
        F: Fn(&Point) -> [[Mat2; 2]; 2] + Send + Sync + 'static,
    {
        self.d2g = Some(Arc::new(d2g));
        self
    }

    /// Attach a closed-form Gaussian curvature, used as an independent cross-check of
    /// the Brioschi formula.
    pub fn with_curvature<F>(mut self, kappa: F) -> Self
    where
        F: Fn(&Point) -> f64 + Send + Sync + 'static,
    {
        self.curvature = Some(Arc::new(kappa));
        self
    }

    /// Override the declared dimension. Only `2` is supported by the differential
    /// operators; anything else makes them fail with [`Error::UnsupportedDimension`].
    pub fn with_dim(mut self, dim: usize) -> Self {
        self.dim = dim;
        self
    }

    /// Flat Euclidean metric.
    pub fn euclidean() -> Self {
        Self::new(|_| Mat2::identity(), |_| [Mat2::zeros(); 2])
            .with_d2g(|_| [[Mat2::zeros(); 2]; 2])
            .with_curvature(|_| 0.0)
    }

    /// Diagonal metric `g = diag(e(x1), f(x1))` depending on the first coordinate only.
    ///
    /// Each closure returns the value and its first two derivatives.
    pub fn diagonal_in_x1<E, F>(e: E, f: F) -> Self
    where
        E: Fn(f64) -> [f64; 3] + Send + Sync + Clone + 'static,
        F: Fn(f64) -> [f64; 3] + Send + Sync + Clone + 'static,
    {
        let (e1, f1) = (e.clone(), f.clone());
        let (e2, f2) = (e.clone(), f.clone());
        Self::new(
            move |x| {
                let (a, b) = (e(x.x), f(x.x));
                Mat2::new(a[0], 0.0, 0.0, b[0])
            },
            move |x| {
                let (a, b) = (e1(x.x), f1(x.x));
                [Mat2::new(a[1], 0.0, 0.0, b[1]), Mat2::zeros()]
            },
        )
        .with_d2g(move |x| {
            let (a, b) = (e2(x.x), f2(x.x));
            [[Mat2::new(a[2], 0.0, 0.0, b[2]), Mat2::zeros()], [Mat2::zeros(), Mat2::zeros()]]
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn require_2d(&self) -> Result<()> {
        if self.dim == 2 {
            Ok(())
        } else {
            Err(Error::UnsupportedDimension(self.dim))
        }
    }

    pub fn g(&self, x: &Point) -> Mat2 {
        (self.g)(x)
    }

    pub fn dg(&self, x: &Point) -> [Mat2; 2] {
        (self.dg)(x)
    }

    pub fn has_closed_form_d2g(&self) -> bool {
        self.d2g.is_some()
    }

    /// Second partials, closed form when available, otherwise central differences of
    /// `dg` with step [`D2G_STEP`].
    pub fn d2g(&self, x: &Point) -> [[Mat2; 2]; 2] {
        if let Some(d2g) = &self.d2g {
            return d2g(x);
        }
        let mut out = [[Mat2::zeros(); 2]; 2];
        for l in 0..2 {
            let mut step = Point::zeros();
            step[l] = D2G_STEP;
            let plus = self.dg(&(x + step));
            let minus = self.dg(&(x - step));
            for k in 0..2 {
                out[k][l] = (plus[k] - minus[k]) / (2.0 * D2G_STEP);
            }
        }
        // symmetrize in (k, l)
        let m = (out[0][1] + out[1][0]) * 0.5;
        out[0][1] = m;
        out[1][0] = m;
        out
    }

    pub fn closed_form_curvature(&self, x: &Point) -> Option<f64> {
        self.curvature.as_ref().map(|k| k(x))
    }

    /// Determinant and inverse of `g` at `x`; fails when `g` is not positive definite.
    pub fn inverse(&self, x: &Point) -> Result<(Mat2, f64)> {
        let g = self.g(x);
        invert_spd(&g).ok_or(Error::DegenerateMetric { at: *x, det: g.determinant() })
    }

    /// Riemannian density `√det g`.
    pub fn density(&self, x: &Point) -> Result<f64> {
        let det = self.g(x).determinant();
        if det > 0.0 && det.is_finite() {
            Ok(det.sqrt())
        } else {
            Err(Error::DegenerateMetric { at: *x, det })
        }
    }

    /// `g(u, v)` at `x`.
    pub fn inner(&self, x: &Point, u: &Point, v: &Point) -> f64 {
        u.dot(&(self.g(x) * v))
    }
}

pub(crate) fn invert_spd(g: &Mat2) -> Option<(Mat2, f64)> {
    let det = g[(0, 0)] * g[(1, 1)] - g[(0, 1)] * g[(1, 0)];
    if !(det > 0.0 && det.is_finite() && g[(0, 0)] > 0.0) {
        return None;
    }
    let inv = Mat2::new(g[(1, 1)], -g[(0, 1)], -g[(1, 0)], g[(0, 0)]) / det;
    Some((inv, det))
}
