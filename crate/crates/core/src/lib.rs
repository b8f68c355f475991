//! Method-level code metrics, file-level aggregation, predictor filtering and
//! defect-prediction studies.
//!
//! The crate is `no_std` (it needs `alloc`). File system access, CSV and the
//! command line live in the `methagg` crate.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod cfg;
pub mod error;
pub mod aggregate;
pub mod filtering;
pub mod halstead;
pub mod lexer;
pub mod matrix;
pub mod metrics;
pub mod segment;
pub mod stats;
pub mod study;
pub mod syntax;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub use error::{ExtractError, ExtractErrorKind, FileError};
pub use metrics::{extract_source, Metric, MethodMetrics};
