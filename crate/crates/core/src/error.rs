use thiserror::Error;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(&'static str),
    /// The requested configuration does not exist.
    #[error("no solution: {0}")]
    NoSolution(&'static str),
    #[error("invalid search settings: {0}")]
    Settings(&'static str),
    #[error("parse error: {0}")]
    Parse(&'static str),
}
