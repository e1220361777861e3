//! File formats, reports and the command-line front end of `surfdenoise`.
//!
//! The numerical work lives in [`surfdenoise_core`]; this crate reads and
//! writes OBJ, PLY and XYZ files, serializes [`MetricsReport`]s and kernel
//! tables, and implements the `surfdenoise` binary in [`cli`].
//!
//! [`MetricsReport`]: surfdenoise_core::bench::MetricsReport

pub mod cli;
pub mod error;
pub mod io;
pub mod report;
pub mod specfile;

pub use error::{Error, Result};
