use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::fem::element::{barycentric_gradients, MAX_NODES};
use crate::fem::quadrature::{quadrature_degree5, QuadratureRule};
use crate::fem::sparse::{SymSparseMatrix, TripletBuilder};
use crate::fem::FeSpace;
use crate::geometry::differential::half_contracted;
use crate::geometry::{LocalGeometry, MetricField};
use crate::{Mat2, Point, Result};

/// Which bilinear form is assembled as stiffness.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Problem {
    #[serde(rename = "K")]
    Killing,
    #[serde(rename = "CK")]
    Conformal,
}

impl std::str::FromStr for Problem {
    type Err = crate::Error;

    fn from_str(s: &str) -> crate::Result<Self> {
        match s {
            "K" | "k" | "killing" => Ok(Self::Killing),
            "CK" | "ck" | "conformal" => Ok(Self::Conformal),
            other => Err(crate::Error::Config(format!("unknown problem {other:?}; expected K or CK"))),
        }
    }
}

impl Problem {
    pub fn density(self, geo: &LocalGeometry, a: &Mat2, b: &Mat2) -> f64 {
        match self {
            Problem::Killing => geo.killing_density(a, b),
            Problem::Conformal => geo.conformal_density(a, b),
        }
    }
}

#[derive(Debug, Clone)]
pub struct System {
    pub stiffness: SymSparseMatrix,
    pub mass: SymSparseMatrix,
}

/// Basis data of one triangle at one quadrature point.
pub(crate) struct PointData {
    pub weight: f64,
    pub geo: LocalGeometry,
    pub phi: [f64; MAX_NODES],
    pub grad: [Point; MAX_NODES],
}

pub(crate) fn triangle_points(space: &FeSpace, metric: &MetricField, t: usize, rule: &QuadratureRule) -> Result<Vec<PointData>> {
    let [a, b, c] = space.mesh.corners(t);
    let (gl, area) = barycentric_gradients(&a, &b, &c);
    rule.points
        .iter()
        .zip(&rule.weights)
        .map(|(l, w)| {
            let x = a * l[0] + b * l[1] + c * l[2];
            Ok(PointData {
                weight: w * area,
                geo: LocalGeometry::at(metric, &x)?,
                phi: space.element.values(l),
                grad: space.element.gradients(l, &gl),
            })
        })
        .collect()
}

/// Covariant derivative of the vector basis function `φ_a e_c`.
#[inline]
fn basis_gradient(p: &PointData, a: usize, c: usize) -> Mat2 {
    let mut m = Mat2::zeros();
    for k in 0..2 {
        for j in 0..2 {
            let partial = if k == c { p.grad[a][j] } else { 0.0 };
            m[(k, j)] = partial + p.geo.gamma.get(k, c, j) * p.phi[a];
        }
    }
    m
}

fn local_stiffness(space: &FeSpace, metric: &MetricField, t: usize, problem: Problem, rule: &QuadratureRule) -> Result<Vec<f64>> {
    let nn = space.element.n_nodes();
    let m = 2 * nn;
    let mut out = vec![0.0; m * m];
    for p in triangle_points(space, metric, t, rule)? {
        let scale = p.weight * p.geo.density;
        // lowered operator images W = S·g (or C·g); the integrand is ½ tr(W_i W_j)
        let w: Vec<Mat2> = (0..m)
            .map(|i| {
                let grad = basis_gradient(&p, i / 2, i % 2);
                let t = match problem {
                    Problem::Killing => p.geo.s_from_gradient(&grad),
                    Problem::Conformal => p.geo.c_from_gradient(&grad),
                };
                t * p.geo.g
            })
            .collect();
        for i in 0..m {
            for j in i..m {
                let v = scale * half_contracted(&w[i], &w[j]);
                out[i * m + j] += v;
                if j != i {
                    out[j * m + i] += v;
                }
            }
        }
    }
    Ok(out)
}

fn local_mass(space: &FeSpace, metric: &MetricField, t: usize, rule: &QuadratureRule) -> Result<Vec<f64>> {
    let nn = space.element.n_nodes();
    let m = 2 * nn;
    let mut out = vec![0.0; m * m];
    for p in triangle_points(space, metric, t, rule)? {
        let scale = p.weight * p.geo.density;
        for a in 0..nn {
            for b in 0..nn {
                let s = scale * p.phi[a] * p.phi[b];
                for c in 0..2 {
                    for d in 0..2 {
                        out[(2 * a + c) * m + 2 * b + d] += s * p.geo.g[(c, d)];
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Local matrices are computed in parallel and scattered in triangle order, so the result
/// does not depend on the thread count.
fn assemble_with(space: &FeSpace, local: impl Fn(usize) -> Result<Vec<f64>> + Sync + Send) -> Result<SymSparseMatrix> {
    let locals: Vec<Vec<f64>> = (0..space.mesh.n_triangles()).into_par_iter().map(&local).collect::<Result<_>>()?;
    let mut builder = TripletBuilder::new(space.n_dofs());
    for (t, l) in locals.iter().enumerate() {
        space.dofmap.scatter(l, space.triangle_nodes(t), &mut builder)?;
    }
    Ok(builder.build())
}

/// `M_IJ = ∫ g(Φ_I, Φ_J) √det g dx`.
pub fn assemble_mass(space: &FeSpace, metric: &MetricField) -> Result<SymSparseMatrix> {
    let rule = quadrature_degree5();
    assemble_with(space, |t| local_mass(space, metric, t, &rule))
}

pub fn assemble_killing(space: &FeSpace, metric: &MetricField) -> Result<SymSparseMatrix> {
    assemble_stiffness(space, metric, Problem::Killing)
}

pub fn assemble_conformal(space: &FeSpace, metric: &MetricField) -> Result<SymSparseMatrix> {
    assemble_stiffness(space, metric, Problem::Conformal)
}

pub fn assemble_stiffness(space: &FeSpace, metric: &MetricField, problem: Problem) -> Result<SymSparseMatrix> {
    metric.require_2d()?;
    let rule = quadrature_degree5();
    assemble_with(space, |t| local_stiffness(space, metric, t, problem, &rule))
}

pub fn assemble(space: &FeSpace, metric: &MetricField, problem: Problem) -> Result<System> {
    Ok(System { stiffness: assemble_stiffness(space, metric, problem)?, mass: assemble_mass(space, metric)? })
}
