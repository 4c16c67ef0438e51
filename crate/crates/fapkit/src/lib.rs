//! Files, tracing, experiments and the command line around `fap-core`.

pub mod cli;
pub mod format;
pub mod harness;
pub mod trace;
