//! Problem instances, generators and the line-oriented text format.

mod dimacs;
mod format;
mod generate;
mod types;

pub use dimacs::{parse_dimacs, to_dimacs};
pub use format::{parse, parse_document, parse_line, serialize, serialize_bundle, Document};
pub use generate::{generate, GenParams};
pub use types::*;
