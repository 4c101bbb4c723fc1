//! Tree rank and d-tree counts in bipartite graphs.
//!
//! Nodes are left vertices, leaves right vertices. In a d-tree, node b_s
//! (s a binary string shorter than d) is adjacent to leaf a_t (t of length d,
//! s a proper prefix of t) iff s followed by 1 is a prefix of t.

use std::collections::{BTreeMap, HashMap};

use fixedbitset::FixedBitSet;
use rand::Rng;
use serde::Serialize;

use crate::core::BipartiteGraph;
use crate::error::{Error, Result};

/// A d-tree: nodes keyed by strings of length < d, leaves by strings of length d.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TreeWitness {
    pub depth: usize,
    pub nodes: BTreeMap<String, usize>,
    pub leaves: BTreeMap<String, usize>,
}

impl TreeWitness {
    pub fn verify(&self, g: &BipartiteGraph) -> Result<()> {
        let d = self.depth;
        if self.nodes.len() != (1 << d) - 1 || self.leaves.len() != 1 << d {
            return Err(Error::InvalidWitness("tree has the wrong number of nodes or leaves".into()));
        }
        for (s, &b) in &self.nodes {
            for (t, &a) in &self.leaves {
                if t.starts_with(s.as_str()) {
                    let want = t.as_bytes()[s.len()] == b'1';
                    if g.has(b, a) != want {
                        return Err(Error::InvalidWitness(format!("node {s:?} and leaf {t:?} disagree")));
                    }
                }
            }
        }
        Ok(())
    }
}

const MEMO_LIMIT: usize = 1 << 20;

struct Ranker<'a> {
    g: &'a BipartiteGraph,
    cap: usize,
    memo: HashMap<FixedBitSet, usize>,
}

impl Ranker<'_> {
    fn split(&self, b: usize, a: &FixedBitSet) -> (FixedBitSet, FixedBitSet) {
        let mut inside = a.clone();
        inside.intersect_with(self.g.row(b));
        let mut outside = a.clone();
        outside.difference_with(self.g.row(b));
        (inside, outside)
    }

    fn rank(&mut self, a: &FixedBitSet, limit: usize) -> usize {
        if limit == 0 || a.count_ones(..) < 2 {
            return 0;
        }
        if let Some(&r) = self.memo.get(a) {
            return r.min(limit);
        }
        let mut best = 0;
        for b in 0..self.g.left() {
            let (inside, outside) = self.split(b, a);
            if inside.is_clear() || outside.is_clear() {
                continue;
            }
            let r = 1 + self.rank(&inside, limit - 1).min(self.rank(&outside, limit - 1));
            best = best.max(r);
            if best >= limit {
                break;
            }
        }
        // only exact values (not cut by the limit) are cached
        if best < limit && self.memo.len() < MEMO_LIMIT {
            self.memo.insert(a.clone(), best);
        }
        best
    }

    fn build(&mut self, a: &FixedBitSet, d: usize, prefix: String, out: &mut TreeWitness) {
        if d == 0 {
            out.leaves.insert(prefix, a.ones().next().expect("nonempty leaf set"));
            return;
        }
        for b in 0..self.g.left() {
            let (inside, outside) = self.split(b, a);
            if inside.is_clear() || outside.is_clear() {
                continue;
            }
            if self.rank(&inside, d - 1) >= d - 1 && self.rank(&outside, d - 1) >= d - 1 {
                out.nodes.insert(prefix.clone(), b);
                self.build(&outside, d - 1, format!("{prefix}0"), out);
                self.build(&inside, d - 1, format!("{prefix}1"), out);
                return;
            }
        }
        unreachable!("rank certified a splitting node");
    }
}

/// min(rank, depth_cap) of the leaf set `leaves` with an extremal tree.
pub fn tree_rank(g: &BipartiteGraph, leaves: &[usize], depth_cap: usize) -> (usize, TreeWitness) {
    let mut a = FixedBitSet::with_capacity(g.right());
    for &x in leaves {
        a.insert(x);
    }
    let mut r = Ranker { g, cap: depth_cap, memo: HashMap::new() };
    let rank = if a.is_clear() { 0 } else { r.rank(&a, r.cap) };
    let mut w = TreeWitness { depth: rank, nodes: BTreeMap::new(), leaves: BTreeMap::new() };
    if !a.is_clear() {
        r.build(&a, rank, String::new(), &mut w);
    }
    (rank, w)
}

#[derive(Clone, Copy, Debug)]
pub enum CountMode {
    Exact,
    MonteCarlo { samples: usize, seed: u64 },
    /// Exact for d <= 2, Monte Carlo above.
    Auto { samples: usize, seed: u64 },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TreeCount {
    pub estimate: f64,
    pub exact: Option<u128>,
    pub std_error: Option<f64>,
}

fn exact_count(g: &BipartiteGraph, nodes: &[usize], leaves: &FixedBitSet, d: usize) -> u128 {
    if d == 0 {
        return leaves.count_ones(..) as u128;
    }
    nodes
        .iter()
        .map(|&b| {
            let mut inside = leaves.clone();
            inside.intersect_with(g.row(b));
            let mut outside = leaves.clone();
            outside.difference_with(g.row(b));
            if inside.is_clear() || outside.is_clear() {
                return 0;
            }
            exact_count(g, nodes, &inside, d - 1) * exact_count(g, nodes, &outside, d - 1)
        })
        .sum()
}

fn sample_count<R: Rng>(g: &BipartiteGraph, nodes: &[usize], leaves: &FixedBitSet, d: usize, rng: &mut R) -> f64 {
    if d == 0 {
        return leaves.count_ones(..) as f64;
    }
    if nodes.is_empty() {
        return 0.0;
    }
    let b = nodes[rng.gen_range(0..nodes.len())];
    let mut inside = leaves.clone();
    inside.intersect_with(g.row(b));
    let mut outside = leaves.clone();
    outside.difference_with(g.row(b));
    if inside.is_clear() || outside.is_clear() {
        return 0.0;
    }
    nodes.len() as f64 * sample_count(g, nodes, &inside, d - 1, rng) * sample_count(g, nodes, &outside, d - 1, rng)
}

/// Number of labelled d-trees with nodes in `node_side` and leaves in
/// `leaf_side` (nodes may repeat; leaves are distinct by construction).
pub fn count_d_trees(g: &BipartiteGraph, node_side: &[usize], leaf_side: &[usize], d: usize, mode: CountMode) -> TreeCount {
    let mut leaves = FixedBitSet::with_capacity(g.right());
    for &x in leaf_side {
        leaves.insert(x);
    }
    let mc = |samples: usize, seed: u64| {
        let mut rng = crate::num::stream(seed, "d-trees");
        let xs: Vec<f64> = (0..samples.max(2)).map(|_| sample_count(g, node_side, &leaves, d, &mut rng)).collect();
        let n = xs.len() as f64;
        let mean = xs.iter().sum::<f64>() / n;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
        TreeCount { estimate: mean, exact: None, std_error: Some((var / n).sqrt()) }
    };
    match mode {
        CountMode::Exact => {
            let c = exact_count(g, node_side, &leaves, d);
            TreeCount { estimate: c as f64, exact: Some(c), std_error: None }
        }
        CountMode::Auto { samples, seed } if d >= 3 => mc(samples, seed),
        CountMode::Auto { .. } => count_d_trees(g, node_side, leaf_side, d, CountMode::Exact),
        CountMode::MonteCarlo { samples, seed } => mc(samples, seed),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::Rng;

    fn half(k: usize) -> BipartiteGraph {
        BipartiteGraph::from_fn(k, k, |i, j| i <= j)
    }

    fn all(k: usize) -> Vec<usize> {
        (0..k).collect()
    }

    #[test]
    fn singleton_and_half_graphs() {
        assert_eq!(tree_rank(&half(3), &[1], 5).0, 0);
        let (r, w) = tree_rank(&half(2), &all(2), 5);
        assert_eq!(r, 1);
        assert_eq!(w.nodes[""], 1);
        w.verify(&half(2)).unwrap();
        let (r, w) = tree_rank(&half(4), &all(4), 5);
        assert_eq!(r, 2);
        w.verify(&half(4)).unwrap();
    }

    #[test]
    fn powers_of_two() {
        for d in 1..=3 {
            let k = 1 << d;
            let (r, w) = tree_rank(&half(k), &all(k), 10);
            assert!(r >= d);
            w.verify(&half(k)).unwrap();
        }
    }

    #[test]
    fn cap_applies() {
        assert_eq!(tree_rank(&half(8), &all(8), 1).0, 1);
    }

    fn brute(g: &BipartiteGraph, nodes: &[usize], leaves: &[usize], d: usize) -> u128 {
        let nn = (1usize << d) - 1;
        let nl = 1usize << d;
        // node strings in BFS order: index i has children 2i+1 (0) and 2i+2 (1)
        let strings: Vec<String> = (0..nn + nl)
            .map(|mut i| {
                let mut s = Vec::new();
                while i > 0 {
                    s.push(if i % 2 == 0 { '1' } else { '0' });
                    i = (i - 1) / 2;
                }
                s.iter().rev().collect()
            })
            .collect();
        let mut count = 0u128;
        let total = nodes.len().pow(nn as u32) * leaves.len().pow(nl as u32);
        for mut code in 0..total {
            let mut pick = Vec::new();
            for _ in 0..nn {
                pick.push(nodes[code % nodes.len()]);
                code /= nodes.len();
            }
            for _ in 0..nl {
                pick.push(leaves[code % leaves.len()]);
                code /= leaves.len();
            }
            let mut ok = true;
            for s in 0..nn {
                for t in nn..nn + nl {
                    let (ss, ts) = (&strings[s], &strings[t]);
                    if ts.starts_with(ss.as_str()) && g.has(pick[s], pick[t]) != (ts.as_bytes()[ss.len()] == b'1') {
                        ok = false;
                    }
                }
            }
            count += ok as u128;
        }
        count
    }

    #[test]
    fn small_counts_match_bruteforce() {
        let g = BipartiteGraph::new(2, 2, [(0, 0)]).unwrap();
        assert_eq!(count_d_trees(&g, &[0, 1], &[0, 1], 1, CountMode::Exact).exact, Some(brute(&g, &[0, 1], &[0, 1], 1)));
        assert_eq!(count_d_trees(&BipartiteGraph::complete(3, 3), &all(3), &all(3), 1, CountMode::Exact).exact, Some(0));
        let h = half(4);
        assert_eq!(count_d_trees(&h, &all(4), &all(4), 2, CountMode::Exact).exact, Some(brute(&h, &all(4), &all(4), 2)));
    }

    #[test]
    fn monte_carlo_is_close() {
        let mut rng = crate::num::stream(3, "tree-mc");
        let g = BipartiteGraph::from_fn(8, 16, |_, _| rng.gen_bool(0.5));
        for d in 2..=3 {
            let exact = count_d_trees(&g, &all(8), &all(16), d, CountMode::Exact).estimate;
            let est = count_d_trees(&g, &all(8), &all(16), d, CountMode::MonteCarlo { samples: 40000, seed: 1 });
            assert!(exact > 0.0);
            assert!((est.estimate - exact).abs() <= 5.0 * est.std_error.unwrap());
        }
        let auto = count_d_trees(&g, &all(8), &all(16), 3, CountMode::Auto { samples: 10, seed: 1 });
        assert!(auto.exact.is_none());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(40))]
        #[test]
        fn rank_is_monotone(seed in any::<u64>()) {
            let mut rng = crate::num::stream(seed, "tree");
            let g = BipartiteGraph::from_fn(6, 8, |_, _| rng.gen_bool(0.5));
            let a: Vec<usize> = (0..8).filter(|_| rng.gen_bool(0.7)).collect();
            let sub: Vec<usize> = a.iter().copied().filter(|_| rng.gen_bool(0.6)).collect();
            let (ra, wa) = tree_rank(&g, &a, 6);
            prop_assert!(tree_rank(&g, &sub, 6).0 <= ra);
            wa.verify(&g).unwrap();
        }
    }
}
