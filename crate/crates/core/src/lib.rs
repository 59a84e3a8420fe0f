pub mod chernoff;
pub mod cli;
pub mod detectors;
pub mod evaluation;
pub mod error;
pub mod linalg;
pub mod rng;
pub mod states;

pub use error::{Error, Result};
