//! Lagrange vector elements, quadrature, glued degrees of freedom and assembly of the
//! mass and Killing/conformal stiffness matrices.

mod assembly;
pub mod element;
mod field;
pub mod quadrature;
mod space;
pub mod sparse;

pub use assembly::{assemble, assemble_conformal, assemble_killing, assemble_mass, assemble_stiffness, Problem, System};
pub use element::{ElementOrder, ReferenceElement};
pub use field::DiscreteField;
pub use quadrature::{quadrature_degree5, QuadratureRule};
pub use space::{DofMap, FeSpace};
pub use sparse::{SymSparseMatrix, TripletBuilder};
