use crate::core::bip::BipartiteGraph;
use crate::error::{Error, Result};

/// A 3-partite graph: three labelled vertex parts and the three bipartite
/// edge sets between them (parts 0-1, 0-2, 1-2), indexed locally per part.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TripartiteGraph {
    /// Global vertex labels of each part.
    pub parts: [Vec<usize>; 3],
    pub e01: BipartiteGraph,
    pub e02: BipartiteGraph,
    pub e12: BipartiteGraph,
}

impl TripartiteGraph {
    pub fn new(
        parts: [Vec<usize>; 3],
        e01: BipartiteGraph,
        e02: BipartiteGraph,
        e12: BipartiteGraph,
    ) -> Result<Self> {
        let s = [parts[0].len(), parts[1].len(), parts[2].len()];
        let dims = [(&e01, s[0], s[1]), (&e02, s[0], s[2]), (&e12, s[1], s[2])];
        for (g, l, r) in dims {
            if g.left() != l || g.right() != r {
                return Err(Error::Arity { expected: l * r, got: g.left() * g.right() });
            }
        }
        Ok(TripartiteGraph { parts, e01, e02, e12 })
    }

    /// Complete 3-partite graph over the given parts.
    pub fn complete(parts: [Vec<usize>; 3]) -> Self {
        let s = [parts[0].len(), parts[1].len(), parts[2].len()];
        TripartiteGraph {
            e01: BipartiteGraph::complete(s[0], s[1]),
            e02: BipartiteGraph::complete(s[0], s[2]),
            e12: BipartiteGraph::complete(s[1], s[2]),
            parts,
        }
    }

    pub fn sizes(&self) -> [usize; 3] {
        [self.parts[0].len(), self.parts[1].len(), self.parts[2].len()]
    }

    pub fn is_triangle(&self, a: usize, b: usize, c: usize) -> bool {
        self.e01.has(a, b) && self.e02.has(a, c) && self.e12.has(b, c)
    }

    pub fn cross_edge_count(&self) -> usize {
        self.e01.edge_count() + self.e02.edge_count() + self.e12.edge_count()
    }

    /// Pair densities (0-1, 0-2, 1-2) as reduced fractions.
    pub fn pair_densities(&self) -> [crate::num::Q; 3] {
        let s = self.sizes();
        let d = |g: &BipartiteGraph, l: usize, r: usize| {
            if l * r == 0 {
                crate::num::qi(0)
            } else {
                crate::num::q(g.edge_count() as i128, (l * r) as i128)
            }
        };
        [d(&self.e01, s[0], s[1]), d(&self.e02, s[0], s[2]), d(&self.e12, s[1], s[2])]
    }
}

/// All local triples (a,b,c) whose three cross pairs are edges.
pub fn triangle_triples(g: &TripartiteGraph) -> Vec<[usize; 3]> {
    let mut out = Vec::new();
    for a in 0..g.parts[0].len() {
        let ra = g.e01.row(a);
        let rc = g.e02.row(a);
        for b in ra.ones() {
            for c in g.e12.row(b).intersection(rc) {
                out.push([a, b, c]);
            }
        }
    }
    out
}
