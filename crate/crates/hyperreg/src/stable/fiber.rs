//! Fiberwise good partitions of a relation on V x V, measured in the link
//! graphs of a 3-graph.

use std::collections::BTreeSet;

use num_traits::Zero;
use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::Serialize;

use super::good::{good_level_against, Rounding, Schedule};
use super::strong::{goodstrong_partition, Mode};
use crate::core::{BipartiteGraph, ThreeGraph};
use crate::detect::tree_rank;
use crate::error::{Error, Result};
use crate::num::{self, Q};

#[derive(Clone, Copy, Debug)]
pub struct FiberCaps {
    pub vertex_cap: usize,
    /// Vertices checked after the run; all of them when n is at most this.
    pub samples: usize,
    pub seed: u64,
    pub rounding: Rounding,
}

impl Default for FiberCaps {
    fn default() -> Self {
        FiberCaps { vertex_cap: 256, samples: 64, seed: 0, rounding: Rounding::Ceil }
    }
}

/// Link of `a` as a bipartite graph: left copies of V, right V, c ~ b iff abc is an edge.
pub fn link_bipartite(h: &ThreeGraph, a: usize) -> BipartiteGraph {
    let n = h.n();
    let mut edges = Vec::new();
    for (x, y) in h.link(a) {
        edges.push((x, y));
        edges.push((y, x));
    }
    BipartiteGraph::new(n, n, edges).expect("link pairs lie in range")
}

#[derive(Clone, Debug, Serialize)]
pub struct FiberPart {
    pub index: usize,
    pub size: usize,
    /// Pieces alpha_{u,1}, alpha_{u,2}, ... as pair lists.
    pub pieces: Vec<Vec<(usize, usize)>>,
    pub residue: Vec<(usize, usize)>,
    pub in_omega: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct FiberPartition {
    pub n: usize,
    pub d: usize,
    #[serde(with = "num::qser")]
    pub eps: Q,
    pub parts: Vec<FiberPart>,
    pub omega: Vec<usize>,
    /// Ω mass over |V|^2.
    #[serde(with = "num::qser")]
    pub omega_fraction: Q,
    pub sampled: Vec<usize>,
    /// Worst goodness of a piece fiber at a sampled vertex.
    #[serde(with = "num::qser")]
    pub achieved_level: Q,
    pub ranks_ok: bool,
    pub residues_ok: bool,
}

impl FiberPartition {
    pub fn verified(&self) -> bool {
        self.ranks_ok && self.residues_ok && self.omega_fraction <= self.eps
    }
}

/// For every vertex a, run the strong partitioner on the fibers
/// alpha_u(a) = {b : (a,b) in alpha_u} inside the link of a, then glue the
/// per-vertex pieces into pieces of each alpha_u.
pub fn fiberwise_good_partition(
    h: &ThreeGraph,
    alpha: &[Vec<(usize, usize)>],
    d: usize,
    eps: Q,
    f: &Schedule,
    caps: FiberCaps,
) -> Result<FiberPartition> {
    let n = h.n();
    if n > caps.vertex_cap {
        return Err(Error::VertexCap { needed: n, cap: caps.vertex_cap });
    }
    let mut seen = BTreeSet::new();
    for part in alpha {
        for &(a, b) in part {
            if a >= n || b >= n {
                return Err(Error::OutOfRange { index: a.max(b), n });
            }
            if !seen.insert((a, b)) {
                return Err(Error::DuplicatePair(a, b));
            }
        }
    }
    // fibers[a][u] = alpha_u(a)
    let mut fibers = vec![vec![Vec::new(); alpha.len()]; n];
    for (u, part) in alpha.iter().enumerate() {
        for &(a, b) in part {
            fibers[a][u].push(b);
        }
    }
    let per_vertex: Vec<Vec<(Vec<Vec<usize>>, Vec<usize>, bool)>> = (0..n)
        .into_par_iter()
        .map(|a| {
            let live: Vec<usize> = (0..alpha.len()).filter(|&u| !fibers[a][u].is_empty()).collect();
            let mut out = vec![(Vec::new(), Vec::new(), false); alpha.len()];
            if live.is_empty() {
                return Ok(out);
            }
            let g = link_bipartite(h, a);
            let sets: Vec<Vec<usize>> = live.iter().map(|&u| fibers[a][u].clone()).collect();
            let sp = goodstrong_partition(&g, &sets, d, eps, f, Mode::Plain, caps.rounding)?;
            for (&u, po) in live.iter().zip(sp.parts) {
                out[u] = if po.in_omega {
                    (Vec::new(), fibers[a][u].clone(), true)
                } else {
                    (po.good_sets, po.residue, false)
                };
            }
            Ok(out)
        })
        .collect::<Result<_>>()?;

    let mut parts = Vec::with_capacity(alpha.len());
    let mut omega = Vec::new();
    let mut omega_mass = 0usize;
    let mut residues_ok = true;
    for (u, part) in alpha.iter().enumerate() {
        let s = (0..n).map(|a| per_vertex[a][u].0.len()).max().unwrap_or(0);
        let mut pieces = vec![Vec::new(); s];
        let mut residue = Vec::new();
        for (a, row) in per_vertex.iter().enumerate() {
            let (good, res, _) = &row[u];
            for (i, set) in good.iter().enumerate() {
                pieces[i].extend(set.iter().map(|&b| (a, b)));
            }
            residue.extend(res.iter().map(|&b| (a, b)));
        }
        let in_omega = Q::from_integer(residue.len() as i128) > eps * Q::from_integer(part.len() as i128);
        if in_omega {
            omega.push(u);
            omega_mass += part.len();
        }
        residues_ok &= in_omega || Q::from_integer(residue.len() as i128) <= eps * Q::from_integer(part.len() as i128);
        parts.push(FiberPart { index: u, size: part.len(), pieces, residue, in_omega });
    }

    let mut sampled: Vec<usize> = (0..n).collect();
    if n > caps.samples {
        let mut rng = num::stream(caps.seed, "fiber-check");
        sampled.shuffle(&mut rng);
        sampled.truncate(caps.samples);
        sampled.sort_unstable();
    }
    let checks: Vec<(Q, bool)> = sampled
        .par_iter()
        .map(|&a| {
            let g = link_bipartite(h, a);
            let nodes: Vec<usize> = (0..n).collect();
            let ranks_ok = (0..alpha.len()).all(|u| tree_rank(&g, &fibers[a][u], d + 1).0 <= d);
            let mut worst = Q::zero();
            for p in parts.iter().filter(|p| !p.in_omega) {
                for piece in &p.pieces {
                    let fib: Vec<usize> = piece.iter().filter(|&&(x, _)| x == a).map(|&(_, b)| b).collect();
                    worst = worst.max(good_level_against(&g, &fib, &nodes));
                }
            }
            (worst, ranks_ok)
        })
        .collect();
    let achieved_level = checks.iter().map(|c| c.0).max().unwrap_or_else(Q::zero);
    let ranks_ok = checks.iter().all(|c| c.1);
    let total = (n * n).max(1) as i128;
    Ok(FiberPartition {
        n,
        d,
        eps,
        parts,
        omega,
        omega_fraction: Q::new(omega_mass as i128, total),
        sampled,
        achieved_level,
        ranks_ok,
        residues_ok,
    })
}
