//! Command-line front end and file formats for `tribrick-core`.

pub mod cli;
pub mod error;
pub mod format;
pub mod svg;
pub mod table;

pub use cli::run;
pub use error::{exit, CliError};
