//! Command-line front end for the sequence-space library.
//!
//! The binary reads a JSON run configuration ([`config::RunConfig`]),
//! dispatches one subcommand ([`cli::Command`]), and emits machine-readable
//! results: each run produces a [`canonical::ResultEnvelope`] carrying the
//! command name, a digest of the canonicalized configuration, the
//! command-specific outputs, and every warning raised along the way.
//! Envelopes serialize through a canonical JSON writer (sorted keys, no
//! insignificant whitespace, 17-significant-digit floats) so identical
//! inputs produce byte-identical output.
//!
//! Exit codes: 0 success, 2 usage, 3 validation (bad config, bad input
//! file), 4 computation (propagated evaluation errors).

pub mod canonical;
pub mod cli;
pub mod commands;
pub mod config;
pub mod error;
pub mod table;

pub use error::{CliError, CliResult};
