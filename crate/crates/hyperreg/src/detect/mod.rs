//! Searches for induced configurations: patterns, VC-type dimensions, tree rank.

pub mod pattern;
pub mod report;
pub mod tree;
pub mod vc;

pub use pattern::{find_family, find_pattern, find_pattern_in, verify_embedding, Host, Pattern, PatternWitness, SearchStatus};
pub use report::{dimension_report, DimEntry, DimensionCaps, DimensionReport};
pub use tree::{count_d_trees, tree_rank, CountMode, TreeCount, TreeWitness};
pub use vc::{graph_vc, vc_dimension, wvc_dimension, SetSystem, VcResult};
