//! Invariants of tuples of matrices under simultaneous conjugation.

pub mod cli;
pub mod error;
pub mod field;
pub mod invariant;
pub mod linalg;
pub mod matrix;
pub mod nullcone;
pub mod poly;
pub mod report;
pub mod rewrite;
pub mod span;
pub mod word;

pub use error::{Error, Result};
