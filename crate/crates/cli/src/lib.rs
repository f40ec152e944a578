//! Library side of the `schwinger` command-line tool: configuration,
//! pipelines, serialization and the invariant check suite.

pub mod checks;
pub mod commands;
pub mod config;
pub mod output;
pub mod run;
