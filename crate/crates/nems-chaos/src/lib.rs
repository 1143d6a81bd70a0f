//! Deterministic experiment runner for the kicked-cantilever / spin system.
//!
//! The library turns a TOML run description plus CLI overrides into a set of
//! CSV artifacts and a JSON manifest, built on the simulation core in
//! `nems-core`. Everything a run produces is reproducible from its resolved
//! configuration: identical configs yield byte-identical CSVs.
//!
//! Modules:
//! - [`config`] — run configuration keys, defaults, validation, seeding law;
//! - [`experiments`] — the nine named experiments and their schemas;
//! - [`output`] — CSV assembly, atomic writes, SHA-256 manifest;
//! - [`gformat`] — `%.17g` float formatting used in every CSV;
//! - [`error`] — error classes mapped to process exit codes.

#![deny(unsafe_code)]

pub mod config;
pub mod error;
pub mod experiments;
pub mod gformat;
pub mod output;

pub use config::{parse_config, CliOverrides, Experiment, InitialMode, RunConfig};
pub use error::{CliError, Result};
pub use experiments::run_experiment;
pub use output::{FileRecord, RunManifest};
