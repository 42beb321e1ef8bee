pub mod algebra;
pub mod axioms;
pub mod cli;
pub mod error;
pub use error::{GwError, Result};
pub mod gkm;
pub mod graphs;
pub mod localize;
pub mod taut;
