//! File formats and command implementations behind the `erasure-ft` binary.

#![allow(clippy::result_large_err)]

pub mod app;
pub mod config;
pub mod error;
pub mod formats;
pub mod manifest;
pub mod parallel;

pub use app::{run, Cli, Output};
pub use error::CliError;
