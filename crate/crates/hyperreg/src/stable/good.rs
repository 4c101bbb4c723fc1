//! Good sets, the staged greedy partitioner and the symmetry classifier.

use fixedbitset::FixedBitSet;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::core::BipartiteGraph;
use crate::detect::tree_rank;
use crate::error::{Error, Result};
use crate::num::{self, Q};

/// Side of the bipartite graph a vertex set lives on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Side {
    Left,
    Right,
}

/// Non-increasing stage parameters f(1), f(2), ...
#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum Schedule {
    /// f(i) = r^i.
    Geometric(#[serde(with = "num::qser")] Q),
    /// Explicit values; the last one repeats.
    Explicit(#[serde(with = "num::qvec")] Vec<Q>),
}

impl Schedule {
    /// Stage value at 1-based index `i`.
    pub fn at(&self, i: usize) -> Q {
        match self {
            Schedule::Geometric(r) => (0..i).fold(Q::one(), |acc, _| acc * r),
            Schedule::Explicit(v) => v.get(i.saturating_sub(1)).or(v.last()).copied().unwrap_or_else(Q::one),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Schedule::Geometric(r) if *r > Q::zero() && *r < Q::one() => Ok(()),
            Schedule::Geometric(r) => Err(Error::InvalidParameter(format!("geometric ratio {r} outside (0,1)"))),
            Schedule::Explicit(v) => {
                if v.is_empty() {
                    return Err(Error::InvalidParameter("empty schedule".into()));
                }
                if v.iter().any(|x| *x <= Q::zero() || *x > Q::one()) {
                    return Err(Error::InvalidParameter("schedule values must lie in (0,1]".into()));
                }
                if v.windows(2).any(|w| w[1] > w[0]) {
                    return Err(Error::InvalidParameter("schedule must be non-increasing".into()));
                }
                Ok(())
            }
        }
    }

    /// Parse `geometric:R` or `explicit:a,b,c` (an optional `f=` prefix is accepted).
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim().trim_start_matches("f=");
        let bad = || Error::InvalidParameter(format!("cannot parse schedule {s:?}"));
        let (kind, rest) = s.split_once(':').ok_or_else(bad)?;
        let sched = match kind {
            "geometric" => Schedule::Geometric(num::parse_q(rest).ok_or_else(bad)?),
            "explicit" => Schedule::Explicit(
                rest.split(',').map(|x| num::parse_q(x).ok_or_else(bad)).collect::<Result<Vec<_>>>()?,
            ),
            _ => return Err(bad()),
        };
        sched.validate()?;
        Ok(sched)
    }
}

pub(crate) fn bitset(len: usize, xs: &[usize]) -> FixedBitSet {
    let mut b = FixedBitSet::with_capacity(len);
    for &x in xs {
        b.insert(x);
    }
    b
}

/// min(|N(v) ∩ X|, |X \ N(v)|) for one opposite-side vertex.
pub(crate) fn min_side(row: &FixedBitSet, x: &FixedBitSet, size: usize) -> usize {
    let inside = row.intersection(x).count();
    inside.min(size - inside)
}

/// Max over `over` of the min-side count of `x`, with the attaining vertex.
pub(crate) fn worst_split(g: &BipartiteGraph, x: &FixedBitSet, over: &[usize]) -> (usize, Option<usize>) {
    let size = x.count_ones(..);
    over.iter().fold((0, None), |(best, arg), &v| {
        let m = min_side(g.row(v), x, size);
        if m > best {
            (m, Some(v))
        } else {
            (best, arg)
        }
    })
}

/// Exact goodness level of `x` on `side`: the max over opposite-side
/// vertices of the smaller of the two split fractions.
pub fn epsilon_good_level(g: &BipartiteGraph, x: &[usize], side: Side) -> Result<(Q, Option<usize>)> {
    if x.is_empty() {
        return Err(Error::Precondition("goodness of an empty set".into()));
    }
    let owned;
    let h = match side {
        Side::Right => g,
        Side::Left => {
            owned = g.transpose();
            &owned
        }
    };
    if let Some(&bad) = x.iter().find(|&&v| v >= h.right()) {
        return Err(Error::OutOfRange { index: bad, n: h.right() });
    }
    let xb = bitset(h.right(), x);
    let size = xb.count_ones(..);
    let over: Vec<usize> = (0..h.left()).collect();
    let (m, arg) = worst_split(h, &xb, &over);
    Ok((Q::new(m as i128, size as i128), arg))
}

/// Goodness level of a right-side set against a subset of left vertices.
pub fn good_level_against(g: &BipartiteGraph, x: &[usize], over: &[usize]) -> Q {
    if x.is_empty() {
        return Q::zero();
    }
    let xb = bitset(g.right(), x);
    let (m, _) = worst_split(g, &xb, over);
    Q::new(m as i128, xb.count_ones(..) as i128)
}

#[derive(Clone, Debug, Serialize)]
pub struct CarvedSet {
    pub stage: usize,
    pub members: Vec<usize>,
    /// Size of the live set the piece was carved from.
    pub carved_from: usize,
    /// Vertex whose split produced the piece.
    pub splitter: usize,
    pub neighbour_side: bool,
    pub rank: usize,
    #[serde(with = "num::qser")]
    pub level: Q,
}

#[derive(Clone, Debug, Serialize)]
pub struct Stage {
    pub index: usize,
    #[serde(with = "num::qser")]
    pub f: Q,
    pub sets: Vec<CarvedSet>,
    /// Goodness level of what is left after the stage.
    #[serde(with = "num::qser")]
    pub residue_level: Q,
}

#[derive(Clone, Debug, Serialize)]
pub struct GoodPartition {
    pub input: Vec<usize>,
    pub d_cap: usize,
    pub rounding: Rounding,
    pub stages: Vec<Stage>,
    pub residue: Vec<usize>,
    #[serde(with = "num::qser")]
    pub residue_level: Q,
    pub sizes_exact: bool,
    pub ranks_below_cap: bool,
    pub stage_residues_good: bool,
    pub disjoint_cover: bool,
}

impl GoodPartition {
    pub fn verified(&self) -> bool {
        self.sizes_exact && self.ranks_below_cap && self.stage_residues_good && self.disjoint_cover
    }

    /// Number of stages that carved something.
    pub fn t(&self) -> usize {
        self.stages.len()
    }

    pub fn carved(&self) -> impl Iterator<Item = &CarvedSet> {
        self.stages.iter().flat_map(|s| s.sets.iter())
    }
}

/// How a fractional carve size f|Z| becomes an integer.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub enum Rounding {
    /// floor(f|Z|); a zero carve is an error.
    #[default]
    Floor,
    /// ceil(f|Z|); never zero and never larger than the splitting side.
    Ceil,
}

impl Rounding {
    fn apply(self, x: &Q) -> usize {
        match self {
            Rounding::Floor => num::floor(x) as usize,
            Rounding::Ceil => num::ceil(x) as usize,
        }
    }
}

fn capped_rank(g: &BipartiteGraph, xs: &[usize], cap: usize) -> usize {
    tree_rank(g, xs, cap).0
}

/// Staged greedy partition of a right-side set `w` whose tree rank is at
/// most `d_cap`: carve pieces of size floor(f(i)|Z|) off the side of smaller
/// rank until the live set is f(i)-good, then move to the next stage.
pub fn goodsets1_partition(g: &BipartiteGraph, w: &[usize], d_cap: usize, f: &Schedule) -> Result<GoodPartition> {
    goodsets1_partition_with(g, w, d_cap, f, Rounding::Floor)
}

/// [`goodsets1_partition`] with an explicit carve rounding.
pub fn goodsets1_partition_with(
    g: &BipartiteGraph,
    w: &[usize],
    d_cap: usize,
    f: &Schedule,
    rounding: Rounding,
) -> Result<GoodPartition> {
    f.validate()?;
    if d_cap == 0 {
        return Err(Error::InvalidParameter("d_cap must be at least 1".into()));
    }
    if let Some(&bad) = w.iter().find(|&&v| v >= g.right()) {
        return Err(Error::OutOfRange { index: bad, n: g.right() });
    }
    let mut input = w.to_vec();
    input.sort_unstable();
    input.dedup();
    let rank = capped_rank(g, &input, d_cap + 1);
    if rank > d_cap {
        return Err(Error::Precondition(format!("tree rank of the input exceeds {d_cap}")));
    }
    let nodes: Vec<usize> = (0..g.left()).collect();
    let mut z = bitset(g.right(), &input);
    let mut stages = Vec::new();
    let mut alpha = 0;
    loop {
        let zsize = z.count_ones(..);
        if zsize == 0 || worst_split(g, &z, &nodes).0 == 0 {
            break;
        }
        alpha += 1;
        if alpha > input.len() + 1 {
            return Err(Error::Infeasible("stage count exceeded the input size".into()));
        }
        let fa = f.at(alpha);
        let mut sets = Vec::new();
        loop {
            let zsize = z.count_ones(..);
            if zsize == 0 {
                break;
            }
            let need = fa * Q::from_integer(zsize as i128);
            let found = nodes.iter().copied().find(|&u| Q::from_integer(min_side(g.row(u), &z, zsize) as i128) >= need);
            let Some(u) = found else { break };
            let take = rounding.apply(&need);
            if take == 0 {
                return Err(Error::Infeasible(format!(
                    "stage {alpha}: carve size floor({fa} * {zsize}) is 0"
                )));
            }
            let mut inside = z.clone();
            inside.intersect_with(g.row(u));
            let mut outside = z.clone();
            outside.difference_with(g.row(u));
            let ins: Vec<usize> = inside.ones().collect();
            let outs: Vec<usize> = outside.ones().collect();
            let ri = capped_rank(g, &ins, d_cap);
            let ro = capped_rank(g, &outs, d_cap);
            let (neighbour_side, src) = if ri <= ro { (true, ins) } else { (false, outs) };
            let members: Vec<usize> = src.into_iter().take(take).collect();
            for &m in &members {
                z.set(m, false);
            }
            let rank = capped_rank(g, &members, d_cap);
            let level = good_level_against(g, &members, &nodes);
            sets.push(CarvedSet { stage: alpha, members, carved_from: zsize, splitter: u, neighbour_side, rank, level });
        }
        let residue: Vec<usize> = z.ones().collect();
        stages.push(Stage { index: alpha, f: fa, sets, residue_level: good_level_against(g, &residue, &nodes) });
    }
    let residue: Vec<usize> = z.ones().collect();
    let residue_level = good_level_against(g, &residue, &nodes);
    let mut gp = GoodPartition {
        input,
        d_cap,
        rounding,
        stages,
        residue,
        residue_level,
        sizes_exact: false,
        ranks_below_cap: false,
        stage_residues_good: false,
        disjoint_cover: false,
    };
    reverify(g, &mut gp);
    Ok(gp)
}

/// Recompute the size, rank, goodness and cover conditions from scratch.
fn reverify(g: &BipartiteGraph, gp: &mut GoodPartition) {
    let nodes: Vec<usize> = (0..g.left()).collect();
    let mut live = gp.input.clone();
    let mut sizes_exact = true;
    let mut ranks = true;
    let mut residues = true;
    let mut seen = FixedBitSet::with_capacity(g.right());
    let mut disjoint = true;
    for st in &gp.stages {
        for s in &st.sets {
            let want = gp.rounding.apply(&(st.f * Q::from_integer(live.len() as i128)));
            sizes_exact &= s.members.len() == want && s.carved_from == live.len();
            ranks &= capped_rank(g, &s.members, gp.d_cap) < gp.d_cap;
            for &m in &s.members {
                disjoint &= !seen.put(m);
            }
            live.retain(|v| !s.members.contains(v));
        }
        residues &= live.is_empty() || good_level_against(g, &live, &nodes) <= st.f;
    }
    for &m in &gp.residue {
        disjoint &= !seen.put(m);
    }
    let cover = seen.count_ones(..) == gp.input.len() && gp.input.iter().all(|&v| seen.contains(v));
    gp.sizes_exact = sizes_exact;
    gp.ranks_below_cap = ranks;
    gp.stage_residues_good = residues;
    gp.disjoint_cover = disjoint && cover && live == gp.residue;
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum SymmetryClass {
    DensityLow,
    DensityHigh,
    HypothesesFail,
}

#[derive(Clone, Debug, Serialize)]
pub struct SymmetryReport {
    pub class: SymmetryClass,
    #[serde(with = "num::qser")]
    pub density: Q,
    /// First vertex violating the homogeneity hypothesis, if any.
    pub failing: Option<(Side, usize)>,
}

/// Classify the density of a bipartite graph whose large vertex subsets are
/// nearly homogeneous: low means below 2√ε, high means above 1 - 2√ε.
pub fn symmetry_classify(g: &BipartiteGraph, u_prime: &[usize], w_prime: &[usize], eps: Q) -> Result<SymmetryReport> {
    if eps <= Q::zero() || eps >= Q::new(1, 4) {
        return Err(Error::InvalidParameter(format!("eps {eps} outside (0,1/4)")));
    }
    let (nu, nw) = (g.left(), g.right());
    let total = (nu * nw).max(1) as i128;
    let density = Q::new(g.edge_count() as i128, total);
    let fail = |failing| Ok(SymmetryReport { class: SymmetryClass::HypothesesFail, density, failing });
    let big = |part: usize, whole: usize| Q::from_integer(part as i128) >= (Q::one() - eps) * Q::from_integer(whole as i128);
    if !big(u_prime.len(), nu) || !big(w_prime.len(), nw) {
        return fail(None);
    }
    for &u in u_prime {
        let deg = g.row(u).count_ones(..);
        if !big(deg.max(nw - deg), nw) {
            return fail(Some((Side::Left, u)));
        }
    }
    for &w in w_prime {
        let deg = g.col(w).count_ones(..);
        if !big(deg.max(nu - deg), nu) {
            return fail(Some((Side::Right, w)));
        }
    }
    let four_eps = Q::from_integer(4) * eps;
    let low = density * density < four_eps;
    let high = (Q::one() - density) * (Q::one() - density) < four_eps;
    let class = match (low, high) {
        (true, true) if density <= Q::new(1, 2) => SymmetryClass::DensityLow,
        (true, true) => SymmetryClass::DensityHigh,
        (true, false) => SymmetryClass::DensityLow,
        (false, true) => SymmetryClass::DensityHigh,
        (false, false) => {
            return Err(Error::Infeasible(format!("density {density} lies in neither interval under the hypotheses")))
        }
    };
    Ok(SymmetryReport { class, density, failing: None })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::q;
    use proptest::prelude::*;

    fn half(k: usize) -> BipartiteGraph {
        BipartiteGraph::from_fn(k, k, |i, j| i <= j)
    }

    #[test]
    fn levels_of_small_sets() {
        let h2 = half(2);
        assert_eq!(epsilon_good_level(&h2, &[0, 1], Side::Right).unwrap(), (q(1, 2), Some(1)));
        assert_eq!(epsilon_good_level(&h2, &[1], Side::Right).unwrap().0, Q::zero());
        let k = BipartiteGraph::complete(3, 4);
        assert_eq!(epsilon_good_level(&k, &[0, 2, 3], Side::Right).unwrap().0, Q::zero());
        assert_eq!(epsilon_good_level(&k, &[0, 1, 2], Side::Left).unwrap().0, Q::zero());
        assert!(epsilon_good_level(&k, &[], Side::Right).is_err());
    }

    #[test]
    fn schedule_values() {
        let s = Schedule::parse("f=geometric:0.5").unwrap();
        assert_eq!(s.at(1), q(1, 2));
        assert_eq!(s.at(3), q(1, 8));
        let e = Schedule::parse("explicit:1/2,1/4").unwrap();
        assert_eq!(e.at(5), q(1, 4));
        assert!(Schedule::parse("explicit:1/4,1/2").is_err());
        assert!(Schedule::parse("geometric:2").is_err());
    }

    #[test]
    fn half_graph_four_trace() {
        let g = half(4);
        let gp = goodsets1_partition(&g, &[0, 1, 2, 3], 2, &Schedule::Geometric(q(1, 2))).unwrap();
        assert!(gp.verified());
        let sets: Vec<Vec<usize>> = gp.carved().map(|s| s.members.clone()).collect();
        assert_eq!(sets, vec![vec![2, 3], vec![1]]);
        assert_eq!(gp.residue, vec![0]);
        assert_eq!(gp.t(), 1);
    }

    #[test]
    fn already_good_and_empty_node_side() {
        let k = BipartiteGraph::complete(3, 5);
        let gp = goodsets1_partition(&k, &[0, 1, 2, 3, 4], 1, &Schedule::Geometric(q(1, 2))).unwrap();
        assert_eq!(gp.t(), 0);
        assert_eq!(gp.residue.len(), 5);
        assert_eq!(gp.residue_level, Q::zero());
        let e = BipartiteGraph::empty(0, 4);
        let gp = goodsets1_partition(&e, &[0, 1, 2, 3], 1, &Schedule::Geometric(q(1, 2))).unwrap();
        assert_eq!(gp.t(), 0);
        assert!(gp.verified());
    }

    #[test]
    fn zero_carve_is_reported_with_stage() {
        let g = half(4);
        let err = goodsets1_partition(&g, &[0, 1, 2, 3], 2, &Schedule::Geometric(q(1, 3))).unwrap_err();
        assert!(err.to_string().contains("stage 1"), "{err}");
    }

    #[test]
    fn ceil_rounding_never_stalls() {
        let g = half(4);
        let gp = goodsets1_partition_with(&g, &[0, 1, 2, 3], 2, &Schedule::Geometric(q(1, 3)), Rounding::Ceil).unwrap();
        assert!(gp.verified());
        assert_eq!(gp.residue_level, Q::zero());
    }

    #[test]
    fn rank_precondition() {
        let g = half(8);
        let all: Vec<usize> = (0..8).collect();
        assert!(goodsets1_partition(&g, &all, 2, &Schedule::Geometric(q(1, 2))).is_err());
    }

    #[test]
    fn symmetry_examples() {
        let k = BipartiteGraph::complete(10, 10);
        let all: Vec<usize> = (0..10).collect();
        let r = symmetry_classify(&k, &all, &all, q(1, 10)).unwrap();
        assert_eq!((r.class, r.density), (SymmetryClass::DensityHigh, Q::one()));
        let e = BipartiteGraph::empty(10, 10);
        let r = symmetry_classify(&e, &all, &all, q(1, 10)).unwrap();
        assert_eq!((r.class, r.density), (SymmetryClass::DensityLow, Q::zero()));
        let mut rng = crate::num::stream(5, "sym");
        use rand::Rng;
        let g = BipartiteGraph::from_fn(40, 40, |_, _| rng.gen_bool(0.5));
        let all: Vec<usize> = (0..40).collect();
        assert_eq!(symmetry_classify(&g, &all, &all, q(1, 10)).unwrap().class, SymmetryClass::HypothesesFail);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn goodsets1_reverifies(bits in proptest::collection::vec(any::<bool>(), 36), r in 2i128..5) {
            let g = BipartiteGraph::from_fn(6, 6, |u, w| bits[u * 6 + w]);
            let w: Vec<usize> = (0..6).collect();
            let rank = tree_rank(&g, &w, 6).0.max(1);
            match goodsets1_partition(&g, &w, rank, &Schedule::Geometric(q(1, r))) {
                Ok(gp) => prop_assert!(gp.verified()),
                Err(e) => prop_assert!(matches!(e, Error::Infeasible(_))),
            }
        }

        #[test]
        fn level_matches_brute_force(bits in proptest::collection::vec(any::<bool>(), 30), mask in 1u32..64) {
            let g = BipartiteGraph::from_fn(5, 6, |u, w| bits[u * 6 + w]);
            let x: Vec<usize> = (0..6).filter(|i| mask >> i & 1 == 1).collect();
            let (lvl, _) = epsilon_good_level(&g, &x, Side::Right).unwrap();
            let brute = (0..5).map(|u| {
                let ins = x.iter().filter(|&&w| g.has(u, w)).count();
                Q::new(ins.min(x.len() - ins) as i128, x.len() as i128)
            }).max().unwrap();
            prop_assert_eq!(lvl, brute);
        }

        #[test]
        fn symmetry_never_contradicts_density(bits in proptest::collection::vec(any::<bool>(), 64), e in 1i128..25) {
            let g = BipartiteGraph::from_fn(8, 8, |u, w| bits[u * 8 + w]);
            let all: Vec<usize> = (0..8).collect();
            let eps = q(e, 100);
            let r = symmetry_classify(&g, &all, &all, eps).unwrap();
            let four = Q::from_integer(4) * eps;
            match r.class {
                SymmetryClass::DensityLow => prop_assert!(r.density * r.density < four),
                SymmetryClass::DensityHigh => prop_assert!((Q::one() - r.density) * (Q::one() - r.density) < four),
                SymmetryClass::HypothesesFail => {}
            }
        }
    }
}
