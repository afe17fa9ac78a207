//! Experiments and artifact emission on top of `semipar`.

pub mod commands;
pub mod config;
pub mod error;
pub mod experiments;
pub mod hausdorff;
pub mod output;

pub use error::{LabError, LabResult};
