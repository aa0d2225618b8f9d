//! Computational tools for finitely generated group actions on metric
//! carriers: word metrics, separated/spanning-set entropy estimates,
//! specification (tracing-point) searches and chaos checks.

pub mod chaos;
pub mod entropy;
pub mod error;
pub mod exact;
pub mod group;
pub mod space;
pub mod spec;

pub use error::{Error, Result};
