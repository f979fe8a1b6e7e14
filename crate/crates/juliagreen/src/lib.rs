//! Command-line front end and file formats for `juliagreen-core`.
//!
//! The binary exposes the numerics as subcommands writing JSON, CSV and SVG.
//! The verification suites in [`verify`] encode the acceptance criteria and
//! are shared by the `verify` subcommand and the acceptance test.

pub mod cli;
pub mod config;
pub mod error;
pub mod formats;
pub mod svg;
pub mod verify;
