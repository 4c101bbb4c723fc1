//! VC-dimension of finite set systems.

use fixedbitset::FixedBitSet;
use serde::Serialize;

use crate::core::{graph_of, BipartiteGraph, ThreeGraph};

/// A family of subsets of {0, .., ground-1}.
#[derive(Clone, Debug)]
pub struct SetSystem {
    pub ground: usize,
    pub sets: Vec<FixedBitSet>,
}

impl SetSystem {
    pub fn new<I, S>(ground: usize, sets: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: IntoIterator<Item = usize>,
    {
        let sets = sets
            .into_iter()
            .map(|s| {
                let mut b = FixedBitSet::with_capacity(ground);
                for x in s {
                    b.insert(x);
                }
                b
            })
            .collect();
        SetSystem { ground, sets }
    }

    /// Right neighbourhoods of the left vertices, on the right side.
    pub fn rows(g: &BipartiteGraph) -> Self {
        SetSystem { ground: g.right(), sets: (0..g.left()).map(|u| g.row(u).clone()).collect() }
    }

    /// Left neighbourhoods of the right vertices, on the left side.
    pub fn cols(g: &BipartiteGraph) -> Self {
        SetSystem { ground: g.left(), sets: (0..g.right()).map(|w| g.col(w).clone()).collect() }
    }

    pub fn shatters(&self, s: &[usize]) -> bool {
        let k = s.len();
        if k >= 63 || self.sets.len() < 1usize << k {
            return false;
        }
        let mut seen = FixedBitSet::with_capacity(1 << k);
        for set in &self.sets {
            let trace = s.iter().enumerate().fold(0usize, |t, (i, &x)| t | (usize::from(set.contains(x)) << i));
            seen.insert(trace);
        }
        seen.count_ones(..) == 1 << k
    }

    pub fn relabel(&self, perm: &[usize]) -> Self {
        SetSystem {
            ground: self.ground,
            sets: self
                .sets
                .iter()
                .map(|s| {
                    let mut b = FixedBitSet::with_capacity(self.ground);
                    for x in s.ones() {
                        b.insert(perm[x]);
                    }
                    b
                })
                .collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VcResult {
    pub value: usize,
    /// False when the cap or budget stopped the search; `value` is then a lower bound.
    pub certified: bool,
    pub witness: Vec<usize>,
    pub nodes_explored: u64,
}

impl SetSystem {
    /// One representative per class of ground elements with the same
    /// membership across all sets, dropping elements in every set or in none.
    /// Returns the reduced system and the representative of each new element.
    pub fn distinct_elements(&self) -> (SetSystem, Vec<usize>) {
        let m = self.sets.len();
        let mut seen = std::collections::HashSet::new();
        let mut reps = Vec::new();
        for x in 0..self.ground {
            let mut sig = FixedBitSet::with_capacity(m);
            for (i, s) in self.sets.iter().enumerate() {
                sig.set(i, s.contains(x));
            }
            let c = sig.count_ones(..);
            if c > 0 && c < m && seen.insert(sig) {
                reps.push(x);
            }
        }
        let sets = self
            .sets
            .iter()
            .map(|s| {
                let mut b = FixedBitSet::with_capacity(reps.len());
                for (i, &x) in reps.iter().enumerate() {
                    b.set(i, s.contains(x));
                }
                b
            })
            .collect();
        (SetSystem { ground: reps.len(), sets }, reps)
    }
}

/// Largest shattered subset, up to `cap`, checking at most `budget` candidates.
///
/// Elements with equal membership never share a shattered set, so the search
/// runs over one representative per membership class.
pub fn vc_dimension(sys: &SetSystem, cap: usize, budget: u64) -> VcResult {
    let (reduced, reps) = sys.distinct_elements();
    let mut r = level_search(&reduced, cap, budget);
    r.witness = r.witness.iter().map(|&i| reps[i]).collect();
    r
}

/// Shattered sets are closed under subsets, so level k+1 only extends the
/// shattered sets of level k by larger elements.
fn level_search(sys: &SetSystem, cap: usize, budget: u64) -> VcResult {
    let mut level: Vec<Vec<usize>> = vec![Vec::new()];
    let mut best: Vec<usize> = Vec::new();
    let mut nodes = 0u64;
    if sys.sets.is_empty() {
        return VcResult { value: 0, certified: true, witness: best, nodes_explored: 0 };
    }
    for k in 1..=cap + 1 {
        if k > cap {
            return VcResult { value: cap, certified: false, witness: best, nodes_explored: nodes };
        }
        let mut next = Vec::new();
        for base in &level {
            let start = base.last().map_or(0, |&x| x + 1);
            for x in start..sys.ground {
                nodes += 1;
                if nodes > budget {
                    return VcResult { value: k - 1, certified: false, witness: best, nodes_explored: nodes };
                }
                let mut cand = base.clone();
                cand.push(x);
                if sys.shatters(&cand) {
                    next.push(cand);
                }
            }
        }
        if next.is_empty() {
            return VcResult { value: k - 1, certified: true, witness: best, nodes_explored: nodes };
        }
        best = next[0].clone();
        level = next;
    }
    unreachable!("loop returns by k = cap + 1")
}

/// VC-dimension of Graph(h) in both trace directions.
pub fn graph_vc(h: &ThreeGraph, cap: usize, budget: u64) -> (VcResult, VcResult) {
    let g = graph_of(h);
    (vc_dimension(&SetSystem::cols(&g), cap, budget), vc_dimension(&SetSystem::rows(&g), cap, budget))
}

/// Max over vertices a of the VC-dimension of the link graph of a, read as the
/// neighbourhood system of its vertices. Returns the value and the vertex.
pub fn wvc_dimension(h: &ThreeGraph, cap: usize, budget: u64) -> (VcResult, Option<usize>) {
    let n = h.n();
    let mut best = VcResult { value: 0, certified: true, witness: Vec::new(), nodes_explored: 0 };
    let mut arg = None;
    for a in 0..n {
        let link = h.link(a);
        if link.is_empty() {
            continue;
        }
        let mut nbrs: Vec<Vec<usize>> = vec![Vec::new(); n];
        for (x, y) in link {
            nbrs[x].push(y);
            nbrs[y].push(x);
        }
        let sys = SetSystem::new(n, nbrs);
        let r = vc_dimension(&sys, cap, budget);
        best.nodes_explored += r.nodes_explored;
        best.certified &= r.certified;
        if r.value > best.value || arg.is_none() {
            arg = Some(a);
            best.value = r.value;
            best.witness = r.witness;
        }
    }
    (best, arg)
}
