//! Configuration, reporting, persistence, and the experiment/acceptance
//! drivers behind the command-line tool.

pub mod checks;
pub mod config;
pub mod experiment;
pub mod io;
pub mod report;

pub use config::RunConfig;
pub use experiment::{run_experiment, Command};
pub use report::{estimate_weighted_moment, MomentReport};
