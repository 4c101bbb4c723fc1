//! Quasirandomness measures: exact discrepancies with witnesses, the
//! counting-style moments dev and oct, and induced pattern counts.

pub mod disc2;
pub mod report;
pub mod triad;
pub mod vdisc3;

pub use disc2::{cycle2_count, dev2_sum, disc2_bruteforce, disc2_deviation, edge_density, Disc2Options};
pub use report::{DeviationReport, Witness};
pub use triad::{
    dev23_sum, disc23_witness_search, induced_pattern_count, measure_triad, oct23_count, Dev23, Disc23Options,
    Moment, Triad, TriadMeasure,
};
pub use vdisc3::{vdisc3_bruteforce, vdisc3_deviation, vdisc3_graph, Vdisc3Options};
