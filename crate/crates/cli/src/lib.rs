//! Library surface of the command-line runner: configuration parsing and
//! experiment dispatch. The binary in `main.rs` is a thin wrapper.

pub mod config;
pub mod run;
