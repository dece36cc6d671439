//! File formats, configuration, trajectory logging, and the command-line
//! runner around `swarmgrid-core`.

pub mod bench;
pub mod cli;
pub mod config;
pub mod frame;
pub mod memory;
pub mod pgm;
pub mod runner;
pub mod trajectory;

pub use config::{parse_config, ConfigError, SimConfig};
pub use runner::{run, RunError, RunOptions, RunReport};
