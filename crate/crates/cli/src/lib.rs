//! File system, CSV and command-line layer over `methagg_core`.

pub mod app;
pub mod config;
pub mod corpus;
pub mod csvio;
pub mod defects;
pub mod error;
pub mod report;

pub use app::{run, Io};
pub use error::{Error, Result};
