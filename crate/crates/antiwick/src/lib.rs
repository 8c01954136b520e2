//! File formats, analytic-object specs, check suites and the command-line
//! front end for `antiwick-core`.

pub mod checks;
pub mod cli;
pub mod error;
pub mod format;
pub mod manifest;
pub mod spec;

pub use error::{CliError, CliResult};
