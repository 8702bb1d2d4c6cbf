//! Standard-library companion to `optomech-core`: parameter files, CSV
//! input and output, parallel sweeps and the `optomech` command-line tool.

pub mod cli;
pub mod commands;
pub mod config;
pub mod csv;
pub mod error;
pub mod selftest;
pub mod sweep;
pub mod units;

pub use error::{Error, Result};
