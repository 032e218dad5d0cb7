//! Killing and conformal Killing vector fields on compact surfaces by finite elements.
//!
//! A surface is given by a metric on a parameter chart (with optional periodic or
//! Klein-bottle gluing of the chart boundary). The bilinear forms
//! `a_K(u, v) = ½ ∫ g(S_u, S_v)` and `a_C(u, v) = ½ ∫ g(C_u, C_v)` are discretized with
//! P1/P2 vector elements, and the near-zero eigenspace of the pencil `(A, M)` recovers
//! the Killing (resp. conformal Killing) fields.
//!
//! ```no_run
//! use killing::prelude::*;
//!
//! let torus = killing::geometry::catalog::standard_torus();
//! let mesh = Triangulation::structured(&torus.chart, 16).unwrap();
//! let space = FeSpace::new(&mesh, ElementOrder::P2, torus.chart.gluing, 1e-9).unwrap();
//! let system = assemble(&space, &torus.metric, Problem::Killing).unwrap();
//! let spectrum = solve_smallest(&system.stiffness, &system.mass, &SolverConfig::default()).unwrap();
//! let modes = zero_eigenspace(&spectrum, 1e3);
//! assert_eq!(modes.count(), 1);
//! ```

pub mod analysis;
pub mod cli;
pub mod eigen;
pub mod error;
pub mod fem;
pub mod geometry;
pub mod mesh;

pub use error::{Error, ErrorCategory, Result};

/// Point (or vector) in chart coordinates.
pub type Point = nalgebra::Vector2<f64>;
/// 2×2 matrix of components.
pub type Mat2 = nalgebra::Matrix2<f64>;

pub mod prelude {
    pub use crate::analysis::{fit_order, l2_norm, h1_norm, subspace_error, Norm};
    pub use crate::eigen::{dense_solve, solve_smallest, zero_eigenspace, SolverConfig, Spectrum};
    pub use crate::fem::{assemble, DiscreteField, ElementOrder, FeSpace, Problem};
    pub use crate::geometry::{catalog, AnalyticVectorField, ChartDomain, Manifold, MetricField};
    pub use crate::mesh::{adapt, identify, AdaptOptions, Gluing, Triangulation};
    pub use crate::{Error, Mat2, Point, Result};
}
