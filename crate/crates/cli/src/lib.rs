//! Library side of the `coupler` CLI: scenario configuration, presets, CSV
//! rendering and the subcommand drivers.

pub mod commands;
pub mod config;
pub mod csv;
