//! Configuration-driven experiments over the `unispec` engines: TOML
//! configs in, report bundles (CSV table, verdict records, log) out.

pub mod build;
pub mod bundle;
pub mod config;
pub mod error;
pub mod report;
pub mod run;
pub mod setup;
pub mod table;
pub mod verify;

pub use bundle::Bundle;
pub use config::ExperimentConfig;
pub use error::CliError;
pub use run::{run, run_with_threads};
pub use verify::{verify_bundle, VerifyReport};
