//! Closed-form Riemannian geometry on a coordinate chart.

pub mod catalog;
pub mod criterion;
pub mod differential;
pub mod domain;
pub mod metric;

pub use catalog::{AnalyticVectorField, Manifold};
pub use criterion::{killing_dimension_criterion, CriterionReport, KillingDimension};
pub use differential::{
    c_operator, christoffel, covariant_derivative, curvature, divergence, gaussian_curvature, rotate_k,
    s_operator, Christoffel, LocalGeometry,
};
pub use domain::{BoundaryCurve, ChartDomain, DomainShape};
pub use metric::MetricField;
