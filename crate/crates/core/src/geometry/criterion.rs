//! Local dimension of the Killing algebra from curvature invariants.
//!
//! With `κ` the Gaussian curvature, `β = ½ d g(dκ, dκ)` and `α = d Δκ`:
//! constant `κ` gives three Killing fields, symmetric `dκ ⊗ β` and `dκ ⊗ α` give one,
//! anything else none.

use serde::Serialize;

use crate::geometry::differential::{curvature, LocalGeometry};
use crate::geometry::domain::ChartDomain;
use crate::geometry::metric::MetricField;
use crate::{Error, Mat2, Point, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum KillingDimension {
    ThreeDim,
    OneDim,
    Zero,
}

impl KillingDimension {
    pub fn count(self) -> usize {
        match self {
            KillingDimension::ThreeDim => 3,
            KillingDimension::OneDim => 1,
            KillingDimension::Zero => 0,
        }
    }
}

/// Diagnostics behind a classification.
#[derive(Debug, Clone, Serialize)]
pub struct CriterionReport {
    pub dimension: KillingDimension,
    pub curvature_range: (f64, f64),
    /// Largest antisymmetric part of `dκ ⊗ β` relative to `max |dκ| |β|` over the samples.
    pub beta_asymmetry: f64,
    /// Same for `dκ ⊗ α`.
    pub alpha_asymmetry: f64,
}

// Inner step for the curvature Hessian, outer step for the derivative of Δκ.
const HESSIAN_STEP: f64 = 2e-3;
const LAPLACIAN_STEP: f64 = 1e-2;

fn d1(f: &dyn Fn(&Point) -> Result<f64>, x: &Point, k: usize, h: f64) -> Result<f64> {
    let mut e = Point::zeros();
    e[k] = h;
    Ok((-f(&(x + 2.0 * e))? + 8.0 * f(&(x + e))? - 8.0 * f(&(x - e))? + f(&(x - 2.0 * e))?) / (12.0 * h))
}

fn gradient(f: &dyn Fn(&Point) -> Result<f64>, x: &Point, h: f64) -> Result<Point> {
    Ok(Point::new(d1(f, x, 0, h)?, d1(f, x, 1, h)?))
}

fn hessian(f: &dyn Fn(&Point) -> Result<f64>, x: &Point, h: f64) -> Result<Mat2> {
    let mut out = Mat2::zeros();
    let f0 = f(x)?;
    for k in 0..2 {
        let mut e = Point::zeros();
        e[k] = h;
        out[(k, k)] = (-f(&(x + 2.0 * e))? + 16.0 * f(&(x + e))? - 30.0 * f0 + 16.0 * f(&(x - e))?
            - f(&(x - 2.0 * e))?)
            / (12.0 * h * h);
    }
    let dx1 = |p: &Point| d1(f, p, 0, h);
    out[(0, 1)] = d1(&dx1, x, 1, h)?;
    out[(1, 0)] = out[(0, 1)];
    Ok(out)
}

/// Covariant Hessian `κ_{;jk} = κ_{,jk} − Γ^m_{jk} κ_{,m}`.
fn covariant_hessian(geo: &LocalGeometry, grad: &Point, hess: &Mat2) -> Mat2 {
    let mut out = *hess;
    for j in 0..2 {
        for k in 0..2 {
            out[(j, k)] -= geo.gamma.get(0, j, k) * grad[0] + geo.gamma.get(1, j, k) * grad[1];
        }
    }
    out
}

fn laplacian(metric: &MetricField, kappa: &dyn Fn(&Point) -> Result<f64>, x: &Point) -> Result<f64> {
    let geo = LocalGeometry::at(metric, x)?;
    let grad = gradient(kappa, x, HESSIAN_STEP)?;
    let hess = covariant_hessian(&geo, &grad, &hessian(kappa, x, HESSIAN_STEP)?);
    Ok((geo.ginv * hess).trace())
}

pub fn killing_dimension_criterion(
    metric: &MetricField,
    chart: &ChartDomain,
    samples: &[Point],
    tol: f64,
) -> Result<CriterionReport> {
    metric.require_2d()?;
    if samples.is_empty() {
        return Err(Error::InsufficientData("no sample points".into()));
    }
    if let Some(bad) = samples.iter().find(|p| !chart.contains(p)) {
        return Err(Error::OutsideDomain(*bad));
    }
    let kappa = |x: &Point| curvature(metric, x);

    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for x in samples {
        let k = kappa(x)?;
        lo = lo.min(k);
        hi = hi.max(k);
    }
    if hi - lo <= tol * hi.abs().max(lo.abs()).max(1.0) {
        return Ok(CriterionReport {
            dimension: KillingDimension::ThreeDim,
            curvature_range: (lo, hi),
            beta_asymmetry: 0.0,
            alpha_asymmetry: 0.0,
        });
    }

    let lap = |x: &Point| laplacian(metric, &kappa, x);
    let mut beta_scale = 0.0f64;
    let mut alpha_scale = 0.0f64;
    let mut beta_anti = 0.0f64;
    let mut alpha_anti = 0.0f64;
    for x in samples {
        let geo = LocalGeometry::at(metric, x)?;
        let dk = gradient(&kappa, x, HESSIAN_STEP)?;
        let hess = covariant_hessian(&geo, &dk, &hessian(&kappa, x, HESSIAN_STEP)?);
        let beta = hess.transpose() * (geo.ginv * dk);
        let alpha = gradient(&lap, x, LAPLACIAN_STEP)?;

        beta_scale = beta_scale.max(dk.norm() * beta.norm());
        alpha_scale = alpha_scale.max(dk.norm() * alpha.norm());
        beta_anti = beta_anti.max((dk.x * beta.y - dk.y * beta.x).abs());
        alpha_anti = alpha_anti.max((dk.x * alpha.y - dk.y * alpha.x).abs());
    }
    let rel = |anti: f64, scale: f64| if scale > 0.0 { anti / scale } else { 0.0 };
    let beta_asymmetry = rel(beta_anti, beta_scale);
    let alpha_asymmetry = rel(alpha_anti, alpha_scale);
    let dimension = if beta_asymmetry <= tol && alpha_asymmetry <= tol {
        KillingDimension::OneDim
    } else {
        KillingDimension::Zero
    };
    Ok(CriterionReport { dimension, curvature_range: (lo, hi), beta_asymmetry, alpha_asymmetry })
}
