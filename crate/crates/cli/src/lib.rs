//! Command-line runner for `addstruct`: configuration, orchestration and
//! report emission.

pub mod config;
pub mod error;
pub mod report;
pub mod run;

pub use config::RunConfig;
pub use error::{CliError, CliResult};
pub use report::RunReport;
