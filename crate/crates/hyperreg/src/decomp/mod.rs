//! Decompositions: building, triad classification, error shapes, reduced
//! encodings and refinements.

pub mod classify;
pub mod decomposition;
pub mod encoding;
pub mod refine;

pub use classify::{
    classify_triads, error_shape, fix_disc2_irregular, homogeneity_report, part_reports, split_sigma_pairs,
    triad_census, ClassifyOptions, ErrorBudgets, ErrorShape, FixReport, HomogeneityReport, PartReport, ShapeKind,
    TriadClass, TriadCount, TriadReport,
};
pub use decomposition::{build_decomposition, sliced_decomposition, Decomposition, Strategy, TriadKey};
pub use encoding::{
    extract_fop2_witness, find_encoding, half_graph, otherway_instance, reduced_encoding, verify_encoding, Corner,
    EdgePart, EncodingWitness, ReducedEncoding, Relation,
};
pub use refine::{common_refinement, verify_approx_refinement, RefinementCheck, RefinementReport};
