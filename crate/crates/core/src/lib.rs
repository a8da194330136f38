pub mod bounds;
pub mod catalog;
pub mod cli;
pub mod eos;
pub mod error;
pub mod json;
mod ode;
pub mod relations;
pub mod scan;
pub mod structure;
pub mod units;

pub use error::{Error, Result};
