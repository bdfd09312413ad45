//! Extension-of-centralizer towers over torsion-free hyperbolic groups,
//! systems of equations over them, and explicit embeddings of coordinate
//! groups into towers.

pub mod canonical;
pub mod cli;
pub mod embeddings;
pub mod equations;
pub mod error;
pub mod finite;
pub mod formats;
pub mod group;
pub mod parse;
pub mod presentation;
pub mod quadratic;
pub mod tower;
pub mod word;

pub use error::{Error, Result};
pub use word::{Letter, Symbol, Word};
