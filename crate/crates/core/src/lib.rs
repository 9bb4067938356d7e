//! k-sample inference with multimarginal optimal transport on finite supports.

pub mod cli;
pub mod error;
pub mod inference;
pub mod io;
pub mod limit;
pub mod lp;
pub mod mot;
pub mod rng;
pub mod support;
pub mod synthetic;

pub use error::{Error, Result};
