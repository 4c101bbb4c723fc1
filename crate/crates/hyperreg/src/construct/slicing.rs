//! Random bipartite graphs and random slicings of bipartite edge sets.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::Serialize;

use crate::core::BipartiteGraph;
use crate::error::{Error, Result};
use crate::num::{q, stream, to_f64, Q};
use crate::quasi::disc2::{disc2_deviation, Disc2Options};

/// A partition of a bipartite edge set into parts, with measurements.
#[derive(Clone, Debug, Serialize)]
pub struct SliceResult {
    pub left: usize,
    pub right: usize,
    /// Edge lists, each sorted.
    pub parts: Vec<Vec<(usize, usize)>>,
    /// |part| / (left * right).
    #[serde(with = "crate::num::qvec")]
    pub densities: Vec<Q>,
    /// disc2 deviation of each part at its own density, when measured.
    #[serde(skip)]
    pub deviations: Vec<Option<Q>>,
}

impl SliceResult {
    pub fn from_parts(left: usize, right: usize, mut parts: Vec<Vec<(usize, usize)>>) -> Self {
        let total = (left * right).max(1) as i128;
        for p in &mut parts {
            p.sort_unstable();
        }
        let densities = parts.iter().map(|p| q(p.len() as i128, total)).collect();
        let deviations = vec![None; parts.len()];
        SliceResult { left, right, parts, densities, deviations }
    }

    pub fn part_graph(&self, i: usize) -> BipartiteGraph {
        BipartiteGraph::new(self.left, self.right, self.parts[i].iter().copied())
            .expect("parts hold valid pairs")
    }

    /// Measure every part exactly when its smaller side is at most `cap`.
    pub fn measure(&mut self, cap: usize) {
        self.deviations = (0..self.parts.len())
            .map(|i| {
                let opts = Disc2Options { cap, ..Default::default() };
                disc2_deviation(&self.part_graph(i), &opts).ok().map(|r| r.deviation)
            })
            .collect();
    }

    pub fn deviation_f64(&self) -> Vec<Option<f64>> {
        self.deviations.iter().map(|d| d.as_ref().map(to_f64)).collect()
    }
}

/// Each pair is an edge independently with probability `density`.
pub fn random_disc2_bipartite(m: usize, n: usize, density: Q, seed: u64) -> Result<BipartiteGraph> {
    if density < q(0, 1) || density > q(1, 1) {
        return Err(Error::InvalidParameter(format!("density {density} outside [0,1]")));
    }
    let mut rng = stream(seed, "random-bipartite");
    let (num, den) = (*density.numer() as u128, *density.denom() as u128);
    Ok(BipartiteGraph::from_fn(m, n, |_, _| (rng.gen::<u64>() as u128 * den) < num << 64))
}

/// Assign every edge of `g` independently and uniformly to one of `l` parts.
/// With `cap` set, each part's disc2 deviation is measured.
pub fn slice_bipartite(g: &BipartiteGraph, l: usize, seed: u64, cap: Option<usize>) -> Result<SliceResult> {
    if l == 0 {
        return Err(Error::InvalidParameter("number of parts must be positive".into()));
    }
    let mut rng = stream(seed, "slice-bipartite");
    let mut parts = vec![Vec::new(); l];
    for e in g.edges() {
        parts[rng.gen_range(0..l)].push(e);
    }
    let mut out = SliceResult::from_parts(g.left(), g.right(), parts);
    if let Some(c) = cap {
        out.measure(c);
    }
    Ok(out)
}

/// Where an output part of [`even_repartition`] came from.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "from", rename_all = "snake_case")]
pub enum Provenance {
    /// A piece cut from input part `part`, plus `spill` residue edges.
    Input { part: usize, spill: usize },
    /// A share of the residue.
    Residue,
}

#[derive(Clone, Debug, Serialize)]
pub struct EvenReport {
    pub slices: SliceResult,
    pub provenance: Vec<Provenance>,
    /// Input parts too small to host a single piece.
    pub small: Vec<usize>,
    /// Size of the residue (leftovers plus small parts) before redistribution.
    pub residue: usize,
    #[serde(with = "crate::num::qser")]
    pub residue_mass: Q,
    /// Number of output parts cut from inputs.
    pub k_prime: usize,
}

fn split_even<T: Clone>(items: &[T], k: usize) -> Vec<Vec<T>> {
    let mut out = vec![Vec::new(); k];
    for (i, x) in items.iter().enumerate() {
        out[i % k].push(x.clone());
    }
    out
}

/// Re-partition `input` (a partition of the complete bipartite host) into
/// `target` parts of near-equal size.
///
/// Each input part hosting at least one piece of size floor(mn/target) is cut
/// into as many random pieces as fit; what is left, together with the parts
/// too small to host a piece, forms the residue. The residue is spread over
/// the pieces when every slot is taken, kept whole when one slot is free, and
/// randomly cut into the free slots otherwise.
pub fn even_repartition(input: &SliceResult, target: usize, seed: u64) -> Result<EvenReport> {
    let total: usize = input.parts.iter().map(Vec::len).sum();
    if target == 0 || target > total {
        return Err(Error::Infeasible(format!("cannot cut {total} edges into {target} nonempty parts")));
    }
    let piece = total / target;
    let mut rng = stream(seed, "even-repartition");
    let mut pieces: Vec<Vec<(usize, usize)>> = Vec::new();
    let mut provenance = Vec::new();
    let mut residue: Vec<(usize, usize)> = Vec::new();
    let mut small = Vec::new();
    for (i, part) in input.parts.iter().enumerate() {
        let fit = (part.len() / piece).min(target - pieces.len());
        if fit == 0 {
            small.push(i);
            residue.extend_from_slice(part);
            continue;
        }
        let mut edges = part.clone();
        edges.sort_unstable();
        edges.shuffle(&mut rng);
        for c in 0..fit {
            pieces.push(edges[c * piece..(c + 1) * piece].to_vec());
            provenance.push(Provenance::Input { part: i, spill: 0 });
        }
        residue.extend_from_slice(&edges[fit * piece..]);
    }
    let k_prime = pieces.len();
    let residue_size = residue.len();
    residue.sort_unstable();
    residue.shuffle(&mut rng);
    if k_prime == target {
        for (i, share) in split_even(&residue, target).into_iter().enumerate() {
            if let Provenance::Input { spill, .. } = &mut provenance[i] {
                *spill = share.len();
            }
            pieces[i].extend(share);
        }
    } else if k_prime + 1 == target {
        pieces.push(residue);
        provenance.push(Provenance::Residue);
    } else {
        for share in split_even(&residue, target - k_prime) {
            pieces.push(share);
            provenance.push(Provenance::Residue);
        }
    }
    let mn = (input.left * input.right).max(1) as i128;
    Ok(EvenReport {
        slices: SliceResult::from_parts(input.left, input.right, pieces),
        provenance,
        small,
        residue: residue_size,
        residue_mass: q(residue_size as i128, mn),
        k_prime,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::qi;
    use std::collections::BTreeSet;

    fn union(s: &SliceResult) -> BTreeSet<(usize, usize)> {
        s.parts.iter().flatten().copied().collect()
    }

    #[test]
    fn density_extremes() {
        assert_eq!(random_disc2_bipartite(4, 5, qi(1), 3).unwrap(), BipartiteGraph::complete(4, 5));
        assert_eq!(random_disc2_bipartite(4, 5, qi(0), 3).unwrap().edge_count(), 0);
        assert!(random_disc2_bipartite(4, 5, q(3, 2), 3).is_err());
    }

    #[test]
    fn random_graph_is_reproducible() {
        let a = random_disc2_bipartite(8, 8, q(1, 2), 11).unwrap();
        assert_eq!(a, random_disc2_bipartite(8, 8, q(1, 2), 11).unwrap());
    }

    #[test]
    fn one_part_is_everything() {
        let g = random_disc2_bipartite(6, 7, q(1, 2), 1).unwrap();
        let s = slice_bipartite(&g, 1, 5, None).unwrap();
        assert_eq!(s.parts.len(), 1);
        assert_eq!(s.parts[0], g.edges().collect::<Vec<_>>());
    }

    #[test]
    fn empty_gives_empty_parts() {
        let s = slice_bipartite(&BipartiteGraph::empty(3, 3), 4, 5, None).unwrap();
        assert_eq!(s.parts, vec![Vec::new(); 4]);
    }

    #[test]
    fn complete_sixteen_halves() {
        let s = slice_bipartite(&BipartiteGraph::complete(16, 16), 2, 7, Some(16)).unwrap();
        for (d, dev) in s.densities.iter().zip(&s.deviations) {
            assert!((to_f64(d) - 0.5).abs() <= 0.1);
            assert!(to_f64(dev.as_ref().unwrap()) <= 0.12);
        }
        assert_eq!(union(&s), BipartiteGraph::complete(16, 16).edges().collect());
    }

    #[test]
    fn equal_parts_are_kept() {
        let g = BipartiteGraph::complete(4, 4);
        let input = SliceResult::from_parts(4, 4, vec![g.edges().filter(|e| e.0 < 2).collect(), g.edges().filter(|e| e.0 >= 2).collect()]);
        let r = even_repartition(&input, 2, 1).unwrap();
        assert_eq!(r.slices.parts, input.parts);
        assert_eq!(r.residue, 0);
    }

    #[test]
    fn unbalanced_pair() {
        let g = BipartiteGraph::complete(10, 10);
        let edges: Vec<_> = g.edges().collect();
        let input = SliceResult::from_parts(10, 10, vec![edges[..90].to_vec(), edges[90..].to_vec()]);
        let r = even_repartition(&input, 2, 1).unwrap();
        assert_eq!(r.small, vec![1]);
        assert!(r.residue_mass <= qi(2) * q(4, 10));
        assert_eq!(union(&r.slices), edges.into_iter().collect());
    }

    #[test]
    fn complete_into_quarters() {
        let input = SliceResult::from_parts(8, 8, vec![BipartiteGraph::complete(8, 8).edges().collect()]);
        let r = even_repartition(&input, 4, 3).unwrap();
        assert!(r.slices.densities.iter().all(|d| *d == q(1, 4)));
    }

    #[test]
    fn too_many_parts() {
        let input = SliceResult::from_parts(1, 2, vec![vec![(0, 0), (0, 1)]]);
        assert!(matches!(even_repartition(&input, 3, 0), Err(Error::Infeasible(_))));
    }
}
