#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision)]

pub mod cli;
pub mod densities;
pub mod error;
pub mod laplace;
pub mod quad;
pub mod specfun;
pub mod subord;
pub mod transform;

pub use error::{LevyError, Result};
