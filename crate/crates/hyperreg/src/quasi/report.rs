use serde::Serialize;

use crate::num::Q;

/// The subsets or subgraph attaining a reported deviation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    Pair { left: Vec<usize>, right: Vec<usize> },
    Triple { parts: [Vec<usize>; 3] },
    Subgraph { e01: Vec<(usize, usize)>, e02: Vec<(usize, usize)>, e12: Vec<(usize, usize)> },
}

/// A normalized deviation together with the witness that attains it.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DeviationReport {
    #[serde(with = "crate::num::qser")]
    pub deviation: Q,
    #[serde(with = "crate::num::qser")]
    pub density_used: Q,
    pub witness: Witness,
    pub exact: bool,
}
