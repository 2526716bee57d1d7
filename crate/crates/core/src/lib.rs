pub mod cli;
pub mod config;
pub mod diagnostics;
pub mod elliptic;
pub mod error;
pub mod fbiter;
pub mod fields;
pub mod geom;
pub mod prandtl;
pub mod scenarios;
pub mod verify;

pub use error::{Error, Result};
