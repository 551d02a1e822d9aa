// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod entropy;
pub mod error;
pub mod linalg;
pub mod microstates;
pub mod ncpoly;
pub mod potential;
pub mod presets;
pub mod randmat;
pub mod rng;

pub use error::{Error, Result};
