//! Metrics, the special-graph axioms, splitting witnesses and irregularity witnesses.

pub mod axioms;
pub mod hbark;
pub mod metric;
pub mod mixed;
pub mod witness;

pub use axioms::{
    reevaluate, verify_all, verify_axiom, AxiomReport, CheckMode, RadiusDomain, SpecialInstance, SpecialParams, Violation,
};
pub use hbark::{hbark_irregular_witness, hbark_witness_at, IrregularityWitness, WitnessCase};
pub use metric::{gs_metric, hp_metric, Ball, MetricKind, MetricPart};
pub use mixed::{class_triple_densities, mixed_density_scan, MixedTriple};
pub use witness::{
    neighborhood_intersection_ball, pair_split_witness, split_witness, EdgeSide, IntersectionBall, PairSplitWitness,
    SpecialFamily, SplitWitness,
};
