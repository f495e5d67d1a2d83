#![allow(clippy::neg_cmp_op_on_partial_ord)]

//! Numerical toolkit for isothermic surfaces in Im H: quaternionic Möbius
//! geometry, Christoffel and Goursat transformations, Darboux
//! transformations, Weierstrass data of minimal surfaces, permutability
//! checks and curved flats.

pub mod cli;
pub mod curved_flat;
pub mod error;
pub mod expr;
pub mod grid;
pub mod permutability;
pub mod quat;
pub mod report;
pub mod surface;
pub mod transforms;
pub mod weierstrass;

pub use error::{Error, Node, Result};
pub use expr::Expr;
pub use grid::{ConformalGrid, OneForm, SampledField};
pub use quat::{ExtPoint, ImPoint, MobiusMap, Quaternion};
pub use report::{ResidualClass, ResidualReport};
pub use surface::{CatalogSurface, Patch};
