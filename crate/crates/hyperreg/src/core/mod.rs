//! Graph data model, derived graphs, partitions and triangle enumeration.

pub mod bip;
pub mod derived;
pub mod io;
pub mod partition;
pub mod three;
pub mod tri;

pub use bip::{BipartiteGraph, SimpleGraph};
pub use derived::{bip, graph_of, induce, pair_at, pair_index, trip};
pub use partition::VertexPartition;
pub use three::{materialize, PartitionedView, ThreeGraph, TripartiteOracle, Triple};
pub use tri::{triangle_triples, TripartiteGraph};
