//! Knowledge segment extraction and comparative reasoning over knowledge graphs.

pub mod collective;
pub mod error;
pub mod eval;
pub mod kernel;
pub mod mining;
pub mod pairwise;
pub mod query;
pub mod segment;
pub mod store;

pub use error::{Error, ErrorClass, Result};
