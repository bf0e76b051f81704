//! Command-line front end: configuration files, presets, run manifests and
//! the `montecarlo`, `tracking` and `policy-demo` subcommands.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod manifest;
pub mod presets;

pub use commands::{run, Cli};
pub use config::{parse_override, Config, ConfigError};
