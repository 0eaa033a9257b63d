//! Separable shape tensors for planar landmark shapes.

// `!(a < b)` is used on purpose so that NaN fails range checks.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod blade;
pub mod convergence;
pub mod cst;
pub mod error;
pub mod grassmann;
pub mod io;
pub mod linalg;
pub mod manifold;
pub mod model;
pub mod preprocess;
pub mod product;
pub mod shape;
pub mod spd;
pub mod spline;
pub mod standardize;
pub mod stats;

pub use error::{Error, Result};
