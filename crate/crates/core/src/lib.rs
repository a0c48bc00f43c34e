pub mod capacity;
pub mod cli;
pub mod error;
pub mod flatflow;
pub mod grid;
pub mod radial;
pub mod smoothflow;

pub use error::{Error, Result};
