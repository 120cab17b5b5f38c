// `!(x > 0.0)` is used on purpose so that NaN fails the check
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::too_many_arguments)]

pub mod error;
pub mod functionals;
pub mod geometry;
pub mod grid;
pub mod lab;
pub mod linalg;
pub mod ma_solver;
pub mod manufactured;
pub mod operators;
pub mod proof;
pub mod snapshot;

pub use error::{LabError, Result};
