//! Numerical toolkit for weighted Poincaré–Wirtinger inequalities.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod eigen1d;
pub mod error;
pub mod fem;
pub mod field;
pub mod geometry;
pub mod mesh;
pub mod ode;
pub mod ptrig;
pub mod quad;
pub mod rayleigh;
pub mod slicing;
pub mod solver;
pub mod weights;

pub use error::{Error, Result};
