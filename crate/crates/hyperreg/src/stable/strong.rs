//! Recursive strong partitioner over a family of rank-bounded parts, with
//! an equal-size variant.

use num_traits::Zero;
use rayon::prelude::*;
use serde::Serialize;

use super::good::{bitset, good_level_against, goodsets1_partition_with, GoodPartition, Rounding, Schedule};
use crate::core::BipartiteGraph;
use crate::detect::tree_rank;
use crate::error::{Error, Result};
use crate::num::{self, Q};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Mode {
    Plain,
    /// Equal-size good sets of the given size, or a size derived from eps.
    Equitable(Option<usize>),
}

#[derive(Clone, Debug, Serialize)]
pub struct PartOutcome {
    pub index: usize,
    pub size: usize,
    pub rank: usize,
    pub good_sets: Vec<Vec<usize>>,
    #[serde(with = "num::qvec")]
    pub levels: Vec<Q>,
    pub residue: Vec<usize>,
    #[serde(with = "num::qser")]
    pub residue_fraction: Q,
    pub in_omega: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct StrongPartition {
    pub d: usize,
    #[serde(with = "num::qser")]
    pub eps: Q,
    pub parts: Vec<PartOutcome>,
    pub omega: Vec<usize>,
    #[serde(with = "num::qser")]
    pub omega_fraction: Q,
    /// Largest number of good sets in one part.
    pub m_prime: usize,
    /// Worst goodness level over all good sets.
    #[serde(with = "num::qser")]
    pub achieved_level: Q,
    /// f(m'), the level the schedule asks for.
    #[serde(with = "num::qser")]
    pub target_level: Q,
    pub omega_ok: bool,
    pub residues_ok: bool,
    pub cover_ok: bool,
    /// Common size of all good sets in equitable mode.
    pub equal_size: Option<usize>,
}

impl StrongPartition {
    /// Ω mass, residue masses and the cover condition all hold.
    pub fn verified(&self) -> bool {
        self.omega_ok && self.residues_ok && self.cover_ok
    }

    pub fn meets_target(&self) -> bool {
        self.achieved_level <= self.target_level
    }
}

#[derive(Clone, Debug, Default)]
struct Piece {
    good: Vec<Vec<usize>>,
    residue: Vec<usize>,
    omega: bool,
}

fn frac(a: usize, b: usize) -> Q {
    if b == 0 {
        Q::zero()
    } else {
        Q::new(a as i128, b as i128)
    }
}

fn above(part: usize, eps: Q, whole: usize) -> bool {
    Q::from_integer(part as i128) > eps * Q::from_integer(whole as i128)
}

fn recurse(g: &BipartiteGraph, parts: &[Vec<usize>], d: usize, eps: Q, f: &Schedule, rounding: Rounding) -> Result<Vec<Piece>> {
    if d == 0 {
        return Ok(parts
            .iter()
            .map(|p| Piece { good: if p.is_empty() { vec![] } else { vec![p.clone()] }, ..Piece::default() })
            .collect());
    }
    let ranks: Vec<usize> = parts.par_iter().map(|p| tree_rank(g, p, d).0).collect();
    if ranks.iter().all(|&r| r < d) {
        return recurse(g, parts, d - 1, eps, f, rounding);
    }
    let top: Vec<usize> = (0..parts.len()).filter(|&i| ranks[i] == d).collect();
    let runs: Vec<GoodPartition> =
        top.par_iter().map(|&i| goodsets1_partition_with(g, &parts[i], d, f, rounding)).collect::<Result<_>>()?;
    let whole: usize = parts.iter().map(Vec::len).sum();
    let t = runs.iter().map(GoodPartition::t).max().unwrap_or(0);
    let stage_mass = |run: &GoodPartition, i: usize| -> usize {
        run.stages.get(i - 1).map_or(0, |s| s.sets.iter().map(|c| c.members.len()).sum())
    };
    // first stage whose carved mass over all rank-d parts is small; t + 1 carves nothing
    let i1 = (1..=t + 1)
        .find(|&i| !above(runs.iter().map(|r| stage_mass(r, i)).sum(), eps * eps, whole))
        .expect("stage t + 1 is empty");

    let mut out = vec![Piece::default(); parts.len()];
    // sub-parts for the next level: (owner, is_piece, set)
    let mut sub: Vec<(usize, bool, Vec<usize>)> = Vec::new();
    for (i, p) in parts.iter().enumerate() {
        if ranks[i] < d {
            sub.push((i, false, p.clone()));
        }
    }
    for (run, &u) in runs.iter().zip(&top) {
        let wu = parts[u].len();
        if above(stage_mass(run, i1), eps, wu) {
            out[u].omega = true;
            continue;
        }
        let mut consumed = bitset(g.right(), &[]);
        for st in run.stages.iter().take(i1) {
            let mass: usize = st.sets.iter().map(|c| c.members.len()).sum();
            let small_stage = st.index == i1
                || !above(mass, eps * f.at(i1.saturating_sub(1).max(1)), wu);
            for c in &st.sets {
                for &m in &c.members {
                    consumed.insert(m);
                }
                if small_stage || !above(c.members.len(), eps * st.f, mass) {
                    out[u].residue.extend(&c.members);
                } else {
                    sub.push((u, true, c.members.clone()));
                }
            }
        }
        let rest: Vec<usize> = parts[u].iter().copied().filter(|&v| !consumed.contains(v)).collect();
        if !rest.is_empty() {
            out[u].good.push(rest);
        }
    }
    let sets: Vec<Vec<usize>> = sub.iter().map(|s| s.2.clone()).collect();
    let below = recurse(g, &sets, d - 1, eps, f, rounding)?;
    for ((owner, is_piece, set), piece) in sub.into_iter().zip(below) {
        if !is_piece {
            out[owner] = piece;
        } else if piece.omega {
            out[owner].residue.extend(set);
        } else {
            out[owner].good.extend(piece.good);
            out[owner].residue.extend(piece.residue);
        }
    }
    for &u in &top {
        if !out[u].omega && above(out[u].residue.len(), eps, parts[u].len()) {
            out[u].omega = true;
        }
    }
    Ok(out)
}

fn chop(piece: &mut Piece, size: usize) {
    let mut good = Vec::new();
    for set in piece.good.drain(..) {
        let mut chunks = set.chunks_exact(size);
        good.extend(chunks.by_ref().map(<[usize]>::to_vec));
        piece.residue.extend(chunks.remainder());
    }
    piece.good = good;
}

/// Partition every rank-bounded part into good sets plus a small residue,
/// setting aside a family Ω of whole parts of small total mass. The
/// parameter schedule is supplied by the caller; every guarantee is checked
/// on the output and the achieved values are reported.
pub fn goodstrong_partition(
    g: &BipartiteGraph,
    parts: &[Vec<usize>],
    d: usize,
    eps: Q,
    f: &Schedule,
    mode: Mode,
    rounding: Rounding,
) -> Result<StrongPartition> {
    f.validate()?;
    if eps <= Q::zero() {
        return Err(Error::InvalidParameter("eps must be positive".into()));
    }
    let mut seen = bitset(g.right(), &[]);
    for p in parts {
        for &v in p {
            if v >= g.right() {
                return Err(Error::OutOfRange { index: v, n: g.right() });
            }
            if seen.put(v) {
                return Err(Error::OverlappingParts(v));
            }
        }
    }
    let parts: Vec<Vec<usize>> = parts
        .iter()
        .map(|p| {
            let mut p = p.clone();
            p.sort_unstable();
            p
        })
        .collect();
    let ranks: Vec<usize> = parts.par_iter().map(|p| tree_rank(g, p, d + 1).0).collect();
    if let Some(i) = ranks.iter().position(|&r| r > d) {
        return Err(Error::Precondition(format!("part {i} has tree rank above {d}")));
    }
    let mut pieces = recurse(g, &parts, d, eps, f, rounding)?;

    let equal_size = match mode {
        Mode::Plain => None,
        Mode::Equitable(n) => {
            let min_good = pieces.iter().filter(|p| !p.omega).flat_map(|p| p.good.iter().map(Vec::len)).min();
            let size = n.unwrap_or_else(|| {
                min_good.map_or(1, |m| (num::floor(&(eps * Q::from_integer(m as i128))) as usize).max(1))
            });
            if size == 0 {
                return Err(Error::InvalidParameter("equitable size must be positive".into()));
            }
            for (p, part) in pieces.iter_mut().zip(&parts) {
                if !p.omega {
                    chop(p, size);
                    if above(p.residue.len(), eps, part.len()) {
                        p.omega = true;
                    }
                }
            }
            Some(size)
        }
    };

    let nodes: Vec<usize> = (0..g.left()).collect();
    let whole: usize = parts.iter().map(Vec::len).sum();
    let mut outcomes = Vec::with_capacity(parts.len());
    let mut omega = Vec::new();
    let mut omega_mass = 0;
    let mut residues_ok = true;
    let mut cover_ok = true;
    let mut achieved = Q::zero();
    let mut m_prime = 0;
    for (i, (mut p, part)) in pieces.drain(..).zip(&parts).enumerate() {
        p.residue.sort_unstable();
        if p.omega {
            omega.push(i);
            omega_mass += part.len();
            p.good.clear();
            p.residue.clear();
        } else {
            let mut all: Vec<usize> = p.good.iter().flatten().chain(&p.residue).copied().collect();
            all.sort_unstable();
            cover_ok &= all == *part;
            residues_ok &= !above(p.residue.len(), eps, part.len());
            if let Some(n) = equal_size {
                cover_ok &= p.good.iter().all(|s| s.len() == n);
            }
        }
        let levels: Vec<Q> = p.good.par_iter().map(|s| good_level_against(g, s, &nodes)).collect();
        if let Some(m) = levels.iter().max() {
            achieved = achieved.max(*m);
        }
        m_prime = m_prime.max(p.good.len());
        outcomes.push(PartOutcome {
            index: i,
            size: part.len(),
            rank: ranks[i],
            residue_fraction: frac(p.residue.len(), part.len()),
            good_sets: p.good,
            levels,
            residue: p.residue,
            in_omega: p.omega,
        });
    }
    Ok(StrongPartition {
        d,
        eps,
        parts: outcomes,
        omega,
        omega_fraction: frac(omega_mass, whole),
        m_prime,
        achieved_level: achieved,
        target_level: f.at(m_prime.max(1)),
        omega_ok: !above(omega_mass, eps, whole),
        residues_ok,
        cover_ok,
        equal_size,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::q;
    use proptest::prelude::*;

    /// Two disjoint copies of H(4) side by side.
    fn two_halves() -> BipartiteGraph {
        BipartiteGraph::from_fn(8, 8, |u, w| u / 4 == w / 4 && u % 4 <= w % 4)
    }

    #[test]
    fn good_parts_come_back_whole() {
        let g = BipartiteGraph::complete(4, 6);
        let sp =
            goodstrong_partition(&g, &[vec![0, 1, 2], vec![3, 4, 5]], 1, q(1, 10), &Schedule::Geometric(q(1, 2)), Mode::Plain, Rounding::Floor)
                .unwrap();
        assert!(sp.omega.is_empty());
        assert!(sp.verified());
        assert_eq!(sp.parts[0].good_sets, vec![vec![0, 1, 2]]);
        assert_eq!(sp.achieved_level, Q::zero());
    }

    #[test]
    fn two_half_graphs() {
        let g = two_halves();
        let sp = goodstrong_partition(
            &g,
            &[vec![0, 1, 2, 3], vec![4, 5, 6, 7]],
            2,
            q(1, 2),
            &Schedule::Geometric(q(1, 2)),
            Mode::Plain,
            Rounding::Floor,
        )
        .unwrap();
        assert!(sp.verified(), "{sp:?}");
        for p in &sp.parts {
            assert_eq!(p.rank, 2);
        }
    }

    #[test]
    fn equitable_sizes_are_equal() {
        let g = two_halves();
        let sp = goodstrong_partition(
            &g,
            &[vec![0, 1, 2, 3], vec![4, 5, 6, 7]],
            2,
            q(1, 2),
            &Schedule::Geometric(q(1, 2)),
            Mode::Equitable(Some(1)),
            Rounding::Floor,
        )
        .unwrap();
        assert_eq!(sp.equal_size, Some(1));
        assert!(sp.parts.iter().flat_map(|p| &p.good_sets).all(|s| s.len() == 1));
        assert!(sp.verified());
    }

    #[test]
    fn rank_precondition() {
        let g = BipartiteGraph::from_fn(8, 8, |u, w| u <= w);
        let all: Vec<usize> = (0..8).collect();
        let err = goodstrong_partition(&g, &[all], 2, q(1, 4), &Schedule::Geometric(q(1, 2)), Mode::Plain, Rounding::Floor).unwrap_err();
        assert!(matches!(err, Error::Precondition(_)));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn outputs_cover_and_levels_are_exact(bits in proptest::collection::vec(any::<bool>(), 48), cut in 1usize..7) {
            let g = BipartiteGraph::from_fn(6, 8, |u, w| bits[u * 8 + w]);
            let parts = vec![(0..cut).collect::<Vec<_>>(), (cut..8).collect()];
            let d = parts.iter().map(|p| tree_rank(&g, p, 8).0).max().unwrap();
            match goodstrong_partition(&g, &parts, d, q(1, 3), &Schedule::Geometric(q(1, 2)), Mode::Plain, Rounding::Floor) {
                Ok(sp) => {
                    prop_assert!(sp.cover_ok);
                    let nodes: Vec<usize> = (0..6).collect();
                    for p in &sp.parts {
                        for (s, l) in p.good_sets.iter().zip(&p.levels) {
                            prop_assert_eq!(good_level_against(&g, s, &nodes), *l);
                        }
                    }
                }
                Err(e) => prop_assert!(matches!(e, Error::Infeasible(_))),
            }
        }
    }
}
