//! Command-line plumbing for the ideoscale toolkit: file formats, the
//! subcommand implementations, the scoring service, and the HTTP paraphrase
//! provider.

pub mod commands;
pub mod error;
pub mod formats;
pub mod provider;
pub mod server;

pub use error::CliError;
