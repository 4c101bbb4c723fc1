//! Removal-style partitions for graphs with few d-trees, and the signature
//! cleanup that rebuilds a block graph.

use std::collections::BTreeMap;

use num_traits::Zero;
use serde::Serialize;

use super::good::{bitset, good_level_against, min_side};
use crate::core::BipartiteGraph;
use crate::detect::{count_d_trees, CountMode, TreeCount};
use crate::error::{Error, Result};
use crate::num::{self, Q};

#[derive(Clone, Copy, Debug)]
pub struct RemovalCaps {
    /// Monte Carlo samples for tree counts of depth 3 and above.
    pub samples: usize,
    pub seed: u64,
}

impl Default for RemovalCaps {
    fn default() -> Self {
        RemovalCaps { samples: 2000, seed: 0 }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RemovalPartition {
    pub d: usize,
    #[serde(with = "num::qser")]
    pub mu: Q,
    #[serde(with = "num::qser")]
    pub eps: Q,
    pub u: Vec<usize>,
    pub w: Vec<usize>,
    /// Exceptional node vertices U'.
    pub u_prime: Vec<usize>,
    pub w0: Vec<usize>,
    pub parts: Vec<Vec<usize>>,
    /// Goodness of each part against U \ U'.
    #[serde(with = "num::qvec")]
    pub levels: Vec<Q>,
    #[serde(with = "num::qser")]
    pub u_prime_fraction: Q,
    #[serde(with = "num::qser")]
    pub w0_fraction: Q,
    #[serde(with = "num::qser")]
    pub achieved_mu: Q,
    pub u_target_met: bool,
    pub w_target_met: bool,
    pub parts_good: bool,
}

impl RemovalPartition {
    pub fn targets_met(&self) -> bool {
        self.u_target_met && self.w_target_met && self.parts_good
    }
}

fn frac(a: usize, b: usize) -> Q {
    if b == 0 {
        Q::zero()
    } else {
        Q::new(a as i128, b as i128)
    }
}

/// Trees per labelled slot: count / (|U|^{2^d - 1} |X|^{2^d}).
fn tree_density(g: &BipartiteGraph, u: &[usize], x: &[usize], d: usize, caps: RemovalCaps) -> f64 {
    let c = count_d_trees(g, u, x, d, CountMode::Auto { samples: caps.samples, seed: caps.seed });
    let slots = (u.len() as f64).powi((1 << d) - 1) * (x.len() as f64).powi(1 << d);
    if slots == 0.0 {
        0.0
    } else {
        c.estimate / slots
    }
}

struct Out {
    u_prime: Vec<usize>,
    w0: Vec<usize>,
    parts: Vec<Vec<usize>>,
}

fn splitting(g: &BipartiteGraph, u: &[usize], z: &[usize], strict: bool, mu: Q) -> Vec<usize> {
    let zb = bitset(g.right(), z);
    let bound = mu * Q::from_integer(z.len() as i128);
    u.iter()
        .copied()
        .filter(|&v| {
            let m = Q::from_integer(min_side(g.row(v), &zb, z.len()) as i128);
            if strict {
                m > bound
            } else {
                m >= bound
            }
        })
        .collect()
}

fn removal(g: &BipartiteGraph, u: &[usize], w: Vec<usize>, d: usize, mu: Q, eps: Q, caps: RemovalCaps) -> Out {
    if w.is_empty() {
        return Out { u_prime: vec![], w0: vec![], parts: vec![] };
    }
    if d == 1 {
        return Out { u_prime: splitting(g, u, &w, true, mu), w0: vec![], parts: vec![w] };
    }
    let small = eps * eps * Q::from_integer(w.len() as i128);
    let few = mu * Q::from_integer(u.len() as i128);
    let mut z = w.clone();
    let mut pieces: Vec<Vec<usize>> = Vec::new();
    let mut out = Out { u_prime: vec![], w0: vec![], parts: vec![] };
    loop {
        if Q::from_integer(z.len() as i128) <= small {
            out.w0.extend(&z);
            break;
        }
        let active = splitting(g, u, &z, false, mu);
        if Q::from_integer(active.len() as i128) <= few {
            // z is mu-good against everything outside the active splitters
            out.u_prime.extend(&active);
            out.parts.push(std::mem::take(&mut z));
            break;
        }
        let mut best: Option<(f64, Vec<usize>)> = None;
        for &v in &active {
            let (ins, outs): (Vec<usize>, Vec<usize>) = z.iter().partition(|&&x| g.has(v, x));
            for side in [ins, outs] {
                let dens = tree_density(g, u, &side, d - 1, caps);
                if best.as_ref().map_or(true, |(b, _)| dens < *b) {
                    best = Some((dens, side));
                }
            }
        }
        let (_, chosen) = best.expect("active splitters exist");
        z.retain(|x| !chosen.contains(x));
        pieces.push(chosen);
    }
    for piece in pieces {
        let sub = removal(g, u, piece, d - 1, mu, eps, caps);
        out.u_prime.extend(sub.u_prime);
        out.w0.extend(sub.w0);
        out.parts.extend(sub.parts);
    }
    out.u_prime.sort_unstable();
    out.u_prime.dedup();
    out.w0.sort_unstable();
    out
}

/// Staged removal partition of `w`: repeatedly split off the side of a
/// mu-splitting vertex with fewer (d-1)-trees, recurse on every piece, and
/// collect the vertices that still split a final part. The same mu and eps
/// are used at every depth; targets |U'| <= mu|U|, |W0| <= eps|W| and
/// mu-goodness of every part are checked afterwards.
pub fn tree_removal_partition(
    g: &BipartiteGraph,
    u: &[usize],
    w: &[usize],
    d: usize,
    mu: Q,
    eps: Q,
    caps: RemovalCaps,
) -> Result<RemovalPartition> {
    if d == 0 {
        return Err(Error::InvalidParameter("d must be at least 1".into()));
    }
    if mu <= Q::zero() || eps <= Q::zero() {
        return Err(Error::InvalidParameter("mu and eps must be positive".into()));
    }
    if let Some(&x) = u.iter().find(|&&x| x >= g.left()) {
        return Err(Error::OutOfRange { index: x, n: g.left() });
    }
    if let Some(&x) = w.iter().find(|&&x| x >= g.right()) {
        return Err(Error::OutOfRange { index: x, n: g.right() });
    }
    let mut u = u.to_vec();
    u.sort_unstable();
    u.dedup();
    let mut w = w.to_vec();
    w.sort_unstable();
    w.dedup();
    let out = removal(g, &u, w.clone(), d, mu, eps, caps);
    let kept: Vec<usize> = u.iter().copied().filter(|x| out.u_prime.binary_search(x).is_err()).collect();
    let levels: Vec<Q> = out.parts.iter().map(|p| good_level_against(g, p, &kept)).collect();
    let achieved_mu = levels.iter().copied().max().unwrap_or_else(Q::zero);
    Ok(RemovalPartition {
        d,
        mu,
        eps,
        u_prime_fraction: frac(out.u_prime.len(), u.len()),
        w0_fraction: frac(out.w0.len(), w.len()),
        u_target_met: frac(out.u_prime.len(), u.len()) <= mu,
        w_target_met: frac(out.w0.len(), w.len()) <= eps,
        parts_good: achieved_mu <= mu,
        achieved_mu,
        levels,
        u_prime: out.u_prime,
        w0: out.w0,
        parts: out.parts,
        u,
        w,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct SignatureClass {
    /// xi(u, W_j) for every part j.
    pub signature: Vec<bool>,
    pub members: Vec<usize>,
    pub dropped: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct SignatureCleanup {
    pub u0: Vec<usize>,
    pub w0: Vec<usize>,
    pub classes: Vec<SignatureClass>,
    /// Edges of the rebuilt block graph G'.
    pub rebuilt_edges: Vec<(usize, usize)>,
    /// |N_G(u) Δ N_G'(u)| inside W* for every kept u.
    pub defects: Vec<(usize, usize)>,
    #[serde(with = "num::qser")]
    pub delta: Q,
    /// Largest defect over |W*|.
    #[serde(with = "num::qser")]
    pub max_defect: Q,
    pub defect_ok: bool,
    pub d: usize,
    pub residual: TreeCount,
    #[serde(skip)]
    pub g_prime: Option<BipartiteGraph>,
}

/// Group kept node vertices by which parts they almost fully see, drop the
/// classes below `class_fraction |U| / 2^t`, and rebuild the graph as
/// complete or empty blocks between classes and parts.
pub fn stable_removal_cleanup(
    g: &BipartiteGraph,
    rp: &RemovalPartition,
    delta: Q,
    class_fraction: Q,
    caps: RemovalCaps,
) -> Result<SignatureCleanup> {
    let kept: Vec<usize> = rp.u.iter().copied().filter(|x| rp.u_prime.binary_search(x).is_err()).collect();
    let mut bad_parts = Vec::new();
    let mut sig: BTreeMap<usize, Vec<bool>> = kept.iter().map(|&u| (u, Vec::new())).collect();
    for (j, part) in rp.parts.iter().enumerate() {
        let pb = bitset(g.right(), part);
        let bound = delta * Q::from_integer(part.len() as i128);
        let mut ok = true;
        for &u in &kept {
            let ins = g.row(u).intersection(&pb).count();
            let outs = part.len() - ins;
            let xi = if Q::from_integer(outs as i128) <= bound {
                true
            } else if Q::from_integer(ins as i128) <= bound {
                false
            } else {
                ok = false;
                continue;
            };
            sig.get_mut(&u).expect("kept vertex").push(xi);
        }
        if !ok {
            bad_parts.push(j);
        }
    }
    if !bad_parts.is_empty() {
        return Err(Error::Precondition(format!("parts {bad_parts:?} are not {delta}-good against the kept vertices")));
    }
    let mut groups: BTreeMap<Vec<bool>, Vec<usize>> = BTreeMap::new();
    for (u, s) in sig {
        groups.entry(s).or_default().push(u);
    }
    let t = groups.len();
    let drop = |size: usize| -> bool {
        // size < class_fraction |U| / 2^t
        t < 100 && Q::from_integer(size as i128) * Q::from_integer(1i128 << t) < class_fraction * Q::from_integer(rp.u.len() as i128)
    };
    let classes: Vec<SignatureClass> = groups
        .into_iter()
        .map(|(signature, members)| SignatureClass { dropped: drop(members.len()), signature, members })
        .collect();
    let mut u0 = rp.u_prime.clone();
    u0.extend(classes.iter().filter(|c| c.dropped).flat_map(|c| c.members.iter().copied()));
    u0.sort_unstable();

    let mut edges = Vec::new();
    for c in classes.iter().filter(|c| !c.dropped) {
        for (j, part) in rp.parts.iter().enumerate() {
            if c.signature[j] {
                for &u in &c.members {
                    edges.extend(part.iter().map(|&w| (u, w)));
                }
            }
        }
    }
    edges.sort_unstable();
    let gp = BipartiteGraph::new(g.left(), g.right(), edges.iter().copied())?;
    let w_star: Vec<usize> = rp.parts.iter().flatten().copied().collect();
    let wb = bitset(g.right(), &w_star);
    let live: Vec<usize> = classes.iter().filter(|c| !c.dropped).flat_map(|c| c.members.iter().copied()).collect();
    let defects: Vec<(usize, usize)> = live
        .iter()
        .map(|&u| {
            let mut diff = g.row(u).clone();
            diff.symmetric_difference_with(gp.row(u));
            diff.intersect_with(&wb);
            (u, diff.count_ones(..))
        })
        .collect();
    let worst = defects.iter().map(|d| d.1).max().unwrap_or(0);
    let max_defect = frac(worst, w_star.len());
    let residual =
        count_d_trees(&gp, &live, &w_star, rp.d, CountMode::Auto { samples: caps.samples, seed: caps.seed });
    Ok(SignatureCleanup {
        u0,
        w0: rp.w0.clone(),
        classes,
        rebuilt_edges: edges,
        defects,
        delta,
        defect_ok: max_defect <= delta,
        max_defect,
        d: rp.d,
        residual,
        g_prime: Some(gp),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::q;
    use proptest::prelude::*;

    fn caps() -> RemovalCaps {
        RemovalCaps::default()
    }

    #[test]
    fn complete_graph_is_one_part() {
        let g = BipartiteGraph::complete(5, 6);
        let u: Vec<usize> = (0..5).collect();
        let w: Vec<usize> = (0..6).collect();
        let rp = tree_removal_partition(&g, &u, &w, 1, q(1, 10), q(1, 4), caps()).unwrap();
        assert!(rp.u_prime.is_empty());
        assert_eq!(rp.parts, vec![w]);
        assert!(rp.targets_met());
    }

    #[test]
    fn half_graph_eight_depth_two() {
        let g = BipartiteGraph::from_fn(8, 8, |i, j| i <= j);
        let all: Vec<usize> = (0..8).collect();
        let rp = tree_removal_partition(&g, &all, &all, 2, q(1, 3), q(1, 3), caps()).unwrap();
        let kept: Vec<usize> = all.iter().copied().filter(|x| !rp.u_prime.contains(x)).collect();
        for (p, l) in rp.parts.iter().zip(&rp.levels) {
            assert_eq!(good_level_against(&g, p, &kept), *l);
            assert!(*l <= rp.achieved_mu);
        }
        let mut cover: Vec<usize> = rp.parts.iter().flatten().chain(&rp.w0).copied().collect();
        cover.sort_unstable();
        assert_eq!(cover, all);
        let cl = stable_removal_cleanup(&g, &rp, rp.achieved_mu, q(0, 1), caps()).unwrap();
        assert!(cl.defect_ok);
        assert_eq!(cl.residual.exact, Some(0));
    }

    #[test]
    fn random_half_density_terminates() {
        use rand::Rng;
        let mut rng = crate::num::stream(9, "removal");
        let g = BipartiteGraph::from_fn(16, 10, |_, _| rng.gen_bool(0.5));
        let u: Vec<usize> = (0..16).collect();
        let w: Vec<usize> = (0..10).collect();
        let rp = tree_removal_partition(&g, &u, &w, 2, q(1, 10), q(1, 3), caps()).unwrap();
        let mut cover: Vec<usize> = rp.parts.iter().flatten().chain(&rp.w0).copied().collect();
        cover.sort_unstable();
        assert_eq!(cover, w);
    }

    #[test]
    fn block_graph_is_unchanged() {
        let g = BipartiteGraph::from_fn(6, 6, |u, w| (u < 3) == (w < 3));
        let rp = RemovalPartition {
            d: 2,
            mu: q(1, 10),
            eps: q(1, 10),
            u: (0..6).collect(),
            w: (0..6).collect(),
            u_prime: vec![],
            w0: vec![],
            parts: vec![vec![0, 1, 2], vec![3, 4, 5]],
            levels: vec![Q::zero(), Q::zero()],
            u_prime_fraction: Q::zero(),
            w0_fraction: Q::zero(),
            achieved_mu: Q::zero(),
            u_target_met: true,
            w_target_met: true,
            parts_good: true,
        };
        let cl = stable_removal_cleanup(&g, &rp, q(1, 10), q(1, 10), caps()).unwrap();
        assert_eq!(cl.g_prime.as_ref(), Some(&g));
        assert_eq!(cl.max_defect, Q::zero());
        let mut all_out = rp.clone();
        all_out.u_prime = (0..6).collect();
        let cl = stable_removal_cleanup(&g, &all_out, q(1, 10), q(1, 10), caps()).unwrap();
        assert!(cl.rebuilt_edges.is_empty());
        assert!(cl.defect_ok);
        assert_eq!(cl.residual.exact, Some(0));
    }

    #[test]
    fn non_good_part_is_rejected() {
        let g = BipartiteGraph::from_fn(4, 4, |u, w| u <= w);
        let mut rp = tree_removal_partition(&g, &[0, 1, 2, 3], &[0, 1, 2, 3], 1, q(1, 2), q(1, 2), caps()).unwrap();
        rp.u_prime.clear();
        let err = stable_removal_cleanup(&g, &rp, q(1, 10), q(1, 10), caps()).unwrap_err();
        assert!(err.to_string().contains("[0]"), "{err}");
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn partition_covers_and_levels_are_exact(bits in proptest::collection::vec(any::<bool>(), 48), d in 1usize..3) {
            let g = BipartiteGraph::from_fn(6, 8, |u, w| bits[u * 8 + w]);
            let u: Vec<usize> = (0..6).collect();
            let w: Vec<usize> = (0..8).collect();
            let rp = tree_removal_partition(&g, &u, &w, d, q(1, 5), q(1, 2), caps()).unwrap();
            let mut cover: Vec<usize> = rp.parts.iter().flatten().chain(&rp.w0).copied().collect();
            cover.sort_unstable();
            prop_assert_eq!(&cover, &w);
            if let Ok(cl) = stable_removal_cleanup(&g, &rp, rp.achieved_mu.max(q(1, 5)), q(1, 5), caps()) {
                prop_assert!(cl.defect_ok);
            }
        }
    }
}
