#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod analysis;
pub mod checks;
pub mod error;
pub mod filling;
pub mod fit;
pub mod generators;
pub mod io;
pub mod nets;
pub mod solver;
pub mod space;
pub mod traces;

pub use error::{Error, Result};
