#![no_std]
extern crate alloc;
#[cfg(feature = "std")]
extern crate std;

pub mod error;
pub mod closedform;
pub mod geometry;
pub mod optimizer;
pub mod oracle;

pub use error::{Error, Result};
