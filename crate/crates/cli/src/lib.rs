//! Library half of the `circumnav` scenario runner: config format,
//! artifact writers, SVG plots, and the command implementations. The
//! binary in `main.rs` is a thin argument-parsing shell over
//! [`commands`].

pub mod artifacts;
pub mod commands;
pub mod config;
pub mod plot;
