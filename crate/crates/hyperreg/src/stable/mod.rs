//! Stable-graph machinery: good sets, staged and recursive good partitions,
//! the fiberwise variant over link graphs, the symmetry classifier and
//! removal-style partitions with signature cleanup.

pub mod fiber;
pub mod good;
pub mod removal;
pub mod strong;

pub use fiber::{fiberwise_good_partition, link_bipartite, FiberCaps, FiberPart, FiberPartition};
pub use good::{
    epsilon_good_level, good_level_against, goodsets1_partition, goodsets1_partition_with, symmetry_classify,
    CarvedSet, GoodPartition, Rounding, Schedule, Side, Stage, SymmetryClass, SymmetryReport,
};
pub use removal::{
    stable_removal_cleanup, tree_removal_partition, RemovalCaps, RemovalPartition, SignatureClass, SignatureCleanup,
};
pub use strong::{goodstrong_partition, Mode, PartOutcome, StrongPartition};
