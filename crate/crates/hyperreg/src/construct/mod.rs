//! Canonical families, random quasirandom graphs and the slicing constructions.

pub mod families;
pub mod fop;
pub mod gs;
pub mod interval;
pub mod slicing;

pub use families::{build_canonical, Built, Family, FamilySpec, GsOracle, HbarOracle, HpOracle};
pub use fop::{fop2_negation_transform, Fop2Witness};
pub use gs::Fpn;
pub use interval::{slice_interval, IntBall, IntervalSlicing};
pub use slicing::{even_repartition, random_disc2_bipartite, slice_bipartite, EvenReport, SliceResult};
