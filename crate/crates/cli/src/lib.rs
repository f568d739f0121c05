//! JSON formats and the `simpol` command-line interface.

pub mod commands;
pub mod format;

pub use commands::{run, Cli};
