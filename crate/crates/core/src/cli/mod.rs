//! Batch front end: configuration, run modes, CSV output and the property
//! suite.

pub mod config;
pub mod csv;
pub mod props;
pub mod run;

pub use config::{parse_config, parse_config_with, Mode, RunConfig};
pub use run::{run_mode, setup, Outcome};
