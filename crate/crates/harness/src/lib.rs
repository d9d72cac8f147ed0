//! Configuration, initial data, sweeps and output for the `aurora` CLI.

pub mod config;
pub mod error;
pub mod initial;
pub mod output;
pub mod runner;
pub mod sweep;

pub use config::RunConfig;
pub use error::HarnessError;
