//! Exact computation of deformation complexes of orthogonal and symplectic
//! sheaves on projective space.

pub mod cech;
pub mod cli;
pub mod corpus;
pub mod defcomplex;
pub mod document;
pub mod error;
pub mod exactla;
pub mod freecomplex;
pub mod polylinear;
pub mod polyring;
pub mod realizer;
pub mod testgen;

pub use error::{Error, Result};
