//! Executable machinery for the regularity theory of 3-uniform hypergraphs.
//!
//! The crate builds the standard example families (half graphs, power set
//! graphs, V(k), F(l), HP(N), the Green-Sanders graphs GS_p(n), ...), measures
//! quasirandomness exactly where feasible, searches for forbidden induced
//! configurations, builds and classifies decompositions, runs the stable-graph
//! partitioners, and verifies the axioms of special 3-graphs.

pub mod cli;
pub mod construct;
pub mod core;
pub mod decomp;
pub mod detect;
pub mod error;
pub mod num;
pub mod quasi;
pub mod special;
pub mod stable;

pub use error::{Error, Result};
