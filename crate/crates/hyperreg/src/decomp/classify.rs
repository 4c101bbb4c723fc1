//! Triad measurement and classification, homogeneity, and error shapes.

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use serde::Serialize;

use crate::core::ThreeGraph;
use crate::decomp::decomposition::{Decomposition, TriadKey};
use crate::error::{Error, Result};
use crate::num::{q, qi, sub_seed, Q};
use crate::quasi::disc2::DEFAULT_DISC2_CAP;
use crate::quasi::{dev23_sum, disc23_witness_search, disc2_deviation, Disc23Options, Disc2Options, Triad};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum TriadClass {
    Disc2Irregular,
    Disc3Irregular,
    Regular,
}

#[derive(Clone, Debug)]
pub struct ClassifyOptions {
    pub eps1: Q,
    pub eps2: Q,
    /// Homogeneity threshold.
    pub mu: Q,
    /// Largest smaller side measured exactly by disc2.
    pub disc2_cap: usize,
    /// Random row subsets tried above the cap.
    pub disc2_samples: usize,
    /// Witness search settings; `d3` and `seed` are set per triad.
    pub disc23: Disc23Options,
    pub seed: u64,
    /// Compute the normalized dev23 moment for triads of at most this volume.
    pub dev23_volume_cap: usize,
}

impl ClassifyOptions {
    pub fn new(eps1: Q, eps2: Q) -> Self {
        ClassifyOptions {
            eps1,
            eps2,
            mu: eps1,
            disc2_cap: DEFAULT_DISC2_CAP,
            disc2_samples: 4096,
            disc23: Disc23Options { budget: 4000, ..Default::default() },
            seed: 0,
            dev23_volume_cap: 0,
        }
    }
}

/// disc2 deviation of one edge part at density 1/l.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PartReport {
    pub i: usize,
    pub j: usize,
    pub alpha: usize,
    pub size: usize,
    #[serde(with = "crate::num::qser")]
    pub deviation: Q,
    pub exact: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TriadReport {
    pub key: TriadKey,
    /// disc2 deviations of the ij, ik and jk parts.
    #[serde(with = "crate::num::qvec")]
    pub disc2: Vec<Q>,
    pub disc2_exact: [bool; 3],
    pub triangles: usize,
    pub edges: usize,
    #[serde(with = "crate::num::qser")]
    pub d3: Q,
    pub dev23: Option<f64>,
    /// Lower bound from the witness search; None for disc2-irregular triads.
    #[serde(with = "crate::num::qopt")]
    pub disc23: Option<Q>,
    pub disc23_exact: bool,
    pub class: TriadClass,
    pub homogeneous: bool,
}

/// Triangle and edge counts of one triad.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct TriadCount {
    pub key: TriadKey,
    pub triangles: usize,
    pub edges: usize,
}

impl TriadCount {
    pub fn d3(&self) -> Q {
        if self.triangles == 0 {
            qi(0)
        } else {
            q(self.edges as i128, self.triangles as i128)
        }
    }
}

/// Index of a key in [`Decomposition::triad_keys`] order.
fn key_slot(d: &Decomposition, triple_slot: &BTreeMap<(usize, usize, usize), usize>, key: &TriadKey) -> usize {
    let l = d.l();
    triple_slot[&(key.i, key.j, key.k)] * l * l * l + (key.alpha * l + key.beta) * l + key.gamma
}

fn triple_slots(t: usize) -> BTreeMap<(usize, usize, usize), usize> {
    let mut m = BTreeMap::new();
    for i in 0..t {
        for j in i + 1..t {
            for k in j + 1..t {
                let n = m.len();
                m.insert((i, j, k), n);
            }
        }
    }
    m
}

/// Triangle and edge counts of every triad, in [`Decomposition::triad_keys`] order.
pub fn triad_census(h: &ThreeGraph, d: &Decomposition) -> Result<Vec<TriadCount>> {
    if h.n() != d.n() {
        return Err(Error::Precondition(format!("decomposition covers {} vertices, graph has {}", d.n(), h.n())));
    }
    let keys = d.triad_keys();
    let slots = triple_slots(d.t());
    let mut out: Vec<TriadCount> = keys.iter().map(|&key| TriadCount { key, triangles: 0, edges: 0 }).collect();
    let l = d.l();
    let cl = d.classes();
    for (&(i, j, k), &s) in &slots {
        let (ij, ik, jk) = (d.pair_colours(i, j), d.pair_colours(i, k), d.pair_colours(j, k));
        let (mj, mk) = (cl[j].len(), cl[k].len());
        let base = s * l * l * l;
        for a in 0..cl[i].len() {
            for b in 0..mj {
                let alpha = ij[a * mj + b];
                for c in 0..mk {
                    let slot = base + (alpha * l + ik[a * mk + c]) * l + jk[b * mk + c];
                    out[slot].triangles += 1;
                }
            }
        }
    }
    for e in h.edges() {
        let mut by_class = e.map(|v| (d.class_of(v), v));
        by_class.sort_unstable();
        let [(i, x), (j, y), (k, z)] = by_class;
        if i == j || j == k {
            continue;
        }
        let alpha = d.colour(x, y).expect("distinct classes").2;
        let beta = d.colour(x, z).expect("distinct classes").2;
        let gamma = d.colour(y, z).expect("distinct classes").2;
        out[key_slot(d, &slots, &TriadKey { i, j, k, alpha, beta, gamma })].edges += 1;
    }
    Ok(out)
}

/// disc2 deviation at density 1/l of every edge part.
pub fn part_reports(d: &Decomposition, cap: usize, samples: usize, seed: u64) -> Vec<PartReport> {
    let l = d.l();
    let mut jobs = Vec::new();
    for i in 0..d.t() {
        for j in i + 1..d.t() {
            for alpha in 0..l {
                jobs.push((i, j, alpha));
            }
        }
    }
    jobs.par_iter()
        .map(|&(i, j, alpha)| {
            let g = d.part_graph(i, j, alpha);
            let opts = Disc2Options {
                density: Some(q(1, l as i128)),
                cap,
                min_fraction: None,
                sampling: Some((samples, sub_seed(seed, &format!("part-{i}-{j}-{alpha}")))),
            };
            let r = disc2_deviation(&g, &opts).expect("sampling covers graphs over the cap");
            PartReport { i, j, alpha, size: g.edge_count(), deviation: r.deviation, exact: r.exact }
        })
        .collect()
}

/// The edge indicator on the cube V_i x V_j x V_k, local indices.
fn class_cube(h: &ThreeGraph, d: &Decomposition, i: usize, j: usize, k: usize) -> Vec<bool> {
    let cl = d.classes();
    let (mj, mk) = (cl[j].len(), cl[k].len());
    let mut cube = vec![false; cl[i].len() * mj * mk];
    for e in h.edges() {
        let mut by_class = e.map(|v| (d.class_of(v), v));
        by_class.sort_unstable();
        if [by_class[0].0, by_class[1].0, by_class[2].0] == [i, j, k] {
            let (a, b, c) = (d.local(by_class[0].1), d.local(by_class[1].1), d.local(by_class[2].1));
            cube[(a * mj + b) * mk + c] = true;
        }
    }
    cube
}

/// Measure and classify every triad.
pub fn classify_triads(h: &ThreeGraph, d: &Decomposition, opts: &ClassifyOptions) -> Result<Vec<TriadReport>> {
    let census = triad_census(h, d)?;
    let parts = part_reports(d, opts.disc2_cap, opts.disc2_samples, opts.seed);
    let part_of: BTreeMap<(usize, usize, usize), &PartReport> =
        parts.iter().map(|p| ((p.i, p.j, p.alpha), p)).collect();
    let cubes: BTreeMap<(usize, usize, usize), Vec<bool>> = triple_slots(d.t())
        .into_keys()
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|(i, j, k)| ((i, j, k), class_cube(h, d, i, j, k)))
        .collect();
    let one = qi(1);
    let reports = census
        .par_iter()
        .map(|c| {
            let key = c.key;
            let prs = key.parts().map(|(i, j, a)| part_of[&(i, j, a)]);
            let disc2: Vec<Q> = prs.iter().map(|p| p.deviation).collect();
            let disc2_exact = prs.map(|p| p.exact);
            let d3 = c.d3();
            let disc2_ok = disc2.iter().all(|x| *x <= opts.eps2);
            let needs_triad = (disc2_ok && c.triangles > 0 && d3 != qi(0) && d3 != one)
                || (opts.dev23_volume_cap > 0 && c.triangles > 0);
            let triad = needs_triad.then(|| {
                let g = d.triad_graph(&key);
                let cube = &cubes[&(key.i, key.j, key.k)];
                let [_, mj, mk] = g.sizes();
                Triad::from_fn(&g, |a, b, cc| cube[(a * mj + b) * mk + cc])
            });
            let (disc23, disc23_exact) = if !disc2_ok {
                (None, false)
            } else if c.triangles == 0 || d3 == qi(0) || d3 == one {
                // every sub-triad has density d3 exactly
                (Some(qi(0)), true)
            } else {
                let t = triad.as_ref().expect("built above");
                let mut o = opts.disc23.clone();
                o.d3 = Some(d3);
                o.seed = sub_seed(opts.seed, &format!("triad-{key:?}"));
                let r = disc23_witness_search(t, &o);
                (Some(r.deviation), r.exact)
            };
            let dev23 = triad.as_ref().and_then(|t| {
                let [a, b, cc] = t.sizes();
                (a * b * cc <= opts.dev23_volume_cap)
                    .then(|| dev23_sum(t, Some(d3)).normalized.map(|m| m.approx))
                    .flatten()
            });
            let class = if !disc2_ok {
                TriadClass::Disc2Irregular
            } else if disc23.expect("measured when disc2-regular") > opts.eps1 {
                TriadClass::Disc3Irregular
            } else {
                TriadClass::Regular
            };
            TriadReport {
                key,
                disc2,
                disc2_exact,
                triangles: c.triangles,
                edges: c.edges,
                d3,
                dev23,
                disc23,
                disc23_exact,
                class,
                homogeneous: d3 < opts.mu || d3 > one - opts.mu,
            }
        })
        .collect();
    Ok(reports)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HomogeneityReport {
    /// Cross-class triples (every one lies in exactly one triad).
    pub covered: u128,
    /// Triples in triads with density in [0, mu) or (1 - mu, 1].
    pub homogeneous: u128,
    pub total: u128,
    #[serde(with = "crate::num::qser")]
    pub fraction: Q,
}

pub fn homogeneity_report(h: &ThreeGraph, d: &Decomposition, mu: Q) -> Result<HomogeneityReport> {
    let census = triad_census(h, d)?;
    let one = qi(1);
    let covered: u128 = census.iter().map(|c| c.triangles as u128).sum();
    let homogeneous: u128 = census
        .iter()
        .filter(|c| {
            let x = c.d3();
            x < mu || x > one - mu
        })
        .map(|c| c.triangles as u128)
        .sum();
    let n = h.n() as u128;
    let total = if n < 3 { 0 } else { n * (n - 1) * (n - 2) / 6 };
    let fraction = if total == 0 { qi(0) } else { q(homogeneous as i128, total as i128) };
    Ok(HomogeneityReport { covered, homogeneous, total, fraction })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ShapeKind {
    Zero,
    Binary,
    Linear,
    NoneOfThese,
}

/// Size limits for the pair cover and the triple cover.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ErrorBudgets {
    pub pairs: usize,
    pub triples: usize,
}

impl ErrorBudgets {
    /// floor(eps1 t^2) pairs and floor(eps1 t^3) triples.
    pub fn from_eps(eps1: Q, t: usize) -> Self {
        let t = t as i128;
        let f = |x: Q| crate::num::floor(&x).max(0) as usize;
        ErrorBudgets { pairs: f(eps1 * qi(t * t)), triples: f(eps1 * qi(t * t * t)) }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ErrorShape {
    pub kind: ShapeKind,
    /// Class triples holding an irregular triad.
    pub sigma: Vec<[usize; 3]>,
    /// Smallest pair set found meeting every triple of `sigma`.
    pub gamma: Vec<(usize, usize)>,
    /// Whether `gamma` is a proven minimum.
    pub gamma_exact: bool,
    pub budgets: ErrorBudgets,
}

impl ErrorShape {
    pub fn linear_fits(&self) -> bool {
        self.sigma.len() <= self.budgets.triples
    }

    pub fn binary_fits(&self) -> bool {
        self.gamma.len() <= self.budgets.pairs
    }
}

fn triple_pairs(s: &[usize; 3]) -> [(usize, usize); 3] {
    [(s[0], s[1]), (s[0], s[2]), (s[1], s[2])]
}

fn covered(s: &[usize; 3], chosen: &BTreeSet<(usize, usize)>) -> bool {
    triple_pairs(s).iter().any(|p| chosen.contains(p))
}

/// Minimum hitting set by branching on the three pairs of an uncovered triple.
fn exact_cover(sigma: &[[usize; 3]], chosen: &mut BTreeSet<(usize, usize)>, best: &mut Option<BTreeSet<(usize, usize)>>) {
    if best.as_ref().is_some_and(|b| chosen.len() >= b.len()) {
        return;
    }
    match sigma.iter().find(|s| !covered(s, chosen)) {
        None => *best = Some(chosen.clone()),
        Some(s) => {
            for p in triple_pairs(s) {
                chosen.insert(p);
                exact_cover(sigma, chosen, best);
                chosen.remove(&p);
            }
        }
    }
}

fn greedy_cover(sigma: &[[usize; 3]]) -> BTreeSet<(usize, usize)> {
    let mut chosen = BTreeSet::new();
    loop {
        let mut counts: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        for s in sigma.iter().filter(|s| !covered(s, &chosen)) {
            for p in triple_pairs(s) {
                *counts.entry(p).or_default() += 1;
            }
        }
        let Some((&p, _)) = counts.iter().max_by_key(|(p, &c)| (c, std::cmp::Reverse(**p))) else {
            return chosen;
        };
        chosen.insert(p);
    }
}

/// Classify where the irregular triads sit, against the given budgets.
pub fn error_shape(reports: &[TriadReport], t: usize, budgets: ErrorBudgets) -> ErrorShape {
    let sigma: Vec<[usize; 3]> = reports
        .iter()
        .filter(|r| r.class != TriadClass::Regular)
        .map(|r| r.key.classes())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let (gamma, gamma_exact) = if t <= 8 {
        let mut best = None;
        exact_cover(&sigma, &mut BTreeSet::new(), &mut best);
        (best.unwrap_or_default(), true)
    } else {
        (greedy_cover(&sigma), sigma.is_empty())
    };
    let gamma: Vec<(usize, usize)> = gamma.into_iter().collect();
    let kind = if sigma.is_empty() {
        ShapeKind::Zero
    } else if gamma.len() <= budgets.pairs {
        ShapeKind::Binary
    } else if sigma.len() <= budgets.triples {
        ShapeKind::Linear
    } else {
        ShapeKind::NoneOfThese
    };
    ErrorShape { kind, sigma, gamma, gamma_exact, budgets }
}

/// For every class pair ij in `gamma`, cut V_i into halves and let the first
/// floor(l/2) parts live on the first half and the rest on the second. Each
/// such part then misses half of V_i and is far from disc2 at density 1/l,
/// so no triad over a pair of `gamma` can be disc2-regular.
pub fn split_sigma_pairs(d: &Decomposition, gamma: &[(usize, usize)], seed: u64) -> Result<Decomposition> {
    let l = d.l();
    if l < 2 {
        return Err(Error::Precondition("splitting pairs needs at least two edge parts".into()));
    }
    let mut out = d.clone();
    let l1 = l / 2;
    for &(i, j) in gamma {
        if i >= j || j >= d.t() {
            return Err(Error::InvalidParameter(format!("{i},{j} is not a class pair")));
        }
        let (mi, mj) = (d.classes()[i].len(), d.classes()[j].len());
        let h1 = mi / 2;
        let s = sub_seed(seed, &format!("split-{i}-{j}"));
        let top = crate::decomp::decomposition::random_pair_colours(h1, mj, l1, sub_seed(s, "top"))?;
        let bottom = crate::decomp::decomposition::random_pair_colours(mi - h1, mj, l - l1, sub_seed(s, "bottom"))?;
        let colours: Vec<usize> = top.into_iter().chain(bottom.into_iter().map(|c| c + l1)).collect();
        out.set_pair(i, j, colours)?;
    }
    Ok(out)
}

/// Parts below the target before and after [`fix_disc2_irregular`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FixReport {
    pub failing_before: usize,
    pub failing_after: usize,
    /// Class pairs that were re-sliced whole.
    pub whole_pairs: Vec<(usize, usize)>,
    /// Class pairs where only the failing parts were re-sliced.
    pub partial_pairs: Vec<(usize, usize)>,
}

/// Re-slice edge parts failing disc2 at density 1/l against `target`.
///
/// When at least two parts of a pair fail and together hold less than
/// `whole_fraction` of the pair, their union is re-sliced into the same
/// labels; otherwise the whole pair is re-sliced.
pub fn fix_disc2_irregular(
    h: &ThreeGraph,
    d: &Decomposition,
    target: Q,
    seed: u64,
    whole_fraction: Q,
    cap: usize,
) -> Result<(Decomposition, FixReport)> {
    if h.n() != d.n() {
        return Err(Error::Precondition(format!("decomposition covers {} vertices, graph has {}", d.n(), h.n())));
    }
    let samples = 4096;
    let before = part_reports(d, cap, samples, seed);
    let failing_before = before.iter().filter(|p| p.deviation > target).count();
    let mut out = d.clone();
    let (mut whole_pairs, mut partial_pairs) = (Vec::new(), Vec::new());
    for i in 0..d.t() {
        for j in i + 1..d.t() {
            let failing: Vec<usize> = before
                .iter()
                .filter(|p| p.i == i && p.j == j && p.deviation > target)
                .map(|p| p.alpha)
                .collect();
            if failing.is_empty() {
                continue;
            }
            let cols = d.pair_colours(i, j);
            let mass = cols.iter().filter(|c| failing.contains(c)).count();
            let s = sub_seed(seed, &format!("fix-{i}-{j}"));
            let (mi, mj) = (d.classes()[i].len(), d.classes()[j].len());
            if failing.len() >= 2 && qi(mass as i128) < whole_fraction * qi((mi * mj) as i128) {
                let cells: Vec<usize> = (0..cols.len()).filter(|x| failing.contains(&cols[*x])).collect();
                let g = crate::core::BipartiteGraph::from_fn(mi, mj, |a, b| failing.contains(&cols[a * mj + b]));
                let sl = crate::construct::slice_bipartite(&g, failing.len(), s, None)?;
                let mut new = cols.to_vec();
                for (slot, part) in sl.parts.iter().enumerate() {
                    for &(a, b) in part {
                        new[a * mj + b] = failing[slot];
                    }
                }
                debug_assert!(cells.iter().all(|&x| failing.contains(&new[x])));
                out.set_pair(i, j, new)?;
                partial_pairs.push((i, j));
            } else {
                out.set_pair(i, j, crate::decomp::decomposition::random_pair_colours(mi, mj, d.l(), s)?)?;
                whole_pairs.push((i, j));
            }
        }
    }
    let after = part_reports(&out, cap, samples, seed);
    let failing_after = after.iter().filter(|p| p.deviation > target).count();
    Ok((out, FixReport { failing_before, failing_after, whole_pairs, partial_pairs }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decomp::decomposition::{build_decomposition, sliced_decomposition, Strategy};
    use proptest::prelude::*;

    fn opts() -> ClassifyOptions {
        ClassifyOptions::new(q(1, 10), q(1, 5))
    }

    fn random_graph(n: usize, p: f64, seed: u64) -> ThreeGraph {
        use rand::Rng;
        let mut rng = crate::num::stream(seed, "test-graph");
        let mut e = Vec::new();
        for a in 0..n {
            for b in a + 1..n {
                for c in b + 1..n {
                    if rng.gen_bool(p) {
                        e.push([a, b, c]);
                    }
                }
            }
        }
        ThreeGraph::new(n, e).unwrap()
    }

    #[test]
    fn edgeless_is_regular_and_zero() {
        let h = ThreeGraph::empty(12);
        let d = build_decomposition(&h, 3, 2, &Strategy::Random, 1).unwrap();
        let mut o = opts();
        o.eps2 = qi(1);
        for r in classify_triads(&h, &d, &o).unwrap() {
            assert_eq!(r.d3, qi(0));
            assert_eq!(r.class, TriadClass::Regular);
            assert!(r.homogeneous);
        }
    }

    #[test]
    fn census_matches_bruteforce() {
        let h = random_graph(10, 0.4, 3);
        let d = build_decomposition(&h, 3, 2, &Strategy::Random, 9).unwrap();
        let census = triad_census(&h, &d).unwrap();
        for c in &census {
            let g = d.triad_graph(&c.key);
            let mut tri = 0;
            let mut edges = 0;
            for (a, &x) in g.parts[0].iter().enumerate() {
                for (b, &y) in g.parts[1].iter().enumerate() {
                    for (cc, &z) in g.parts[2].iter().enumerate() {
                        if g.is_triangle(a, b, cc) {
                            tri += 1;
                            edges += usize::from(h.contains(x, y, z));
                        }
                    }
                }
            }
            assert_eq!((c.triangles, c.edges), (tri, edges));
        }
    }

    #[test]
    fn binary_host_is_homogeneous() {
        // the edge set is a union of whole triads
        let d = build_decomposition(&ThreeGraph::empty(12), 4, 2, &Strategy::Random, 2).unwrap();
        let keep = |k: &TriadKey| (k.alpha + k.beta + k.gamma + k.i) % 2 == 0;
        let mut e = Vec::new();
        for a in 0..12 {
            for b in a + 1..12 {
                for c in b + 1..12 {
                    let mut cls = [(d.class_of(a), a), (d.class_of(b), b), (d.class_of(c), c)];
                    cls.sort_unstable();
                    if cls[0].0 == cls[1].0 || cls[1].0 == cls[2].0 {
                        continue;
                    }
                    let key = TriadKey {
                        i: cls[0].0,
                        j: cls[1].0,
                        k: cls[2].0,
                        alpha: d.colour(cls[0].1, cls[1].1).unwrap().2,
                        beta: d.colour(cls[0].1, cls[2].1).unwrap().2,
                        gamma: d.colour(cls[1].1, cls[2].1).unwrap().2,
                    };
                    if keep(&key) {
                        e.push([a, b, c]);
                    }
                }
            }
        }
        let h = ThreeGraph::new(12, e).unwrap();
        let mut o = opts();
        o.eps2 = qi(1);
        let reports = classify_triads(&h, &d, &o).unwrap();
        for r in &reports {
            assert!(r.homogeneous);
            if r.triangles > 0 {
                assert!(r.d3 == qi(0) || r.d3 == qi(1));
            }
            assert_eq!(r.class, TriadClass::Regular);
        }
        let hr = homogeneity_report(&h, &d, q(1, 10)).unwrap();
        assert_eq!(hr.homogeneous, hr.covered);
        assert_eq!(hr.covered, 3 * 3 * 3 * 4);
    }

    #[test]
    fn half_mu_counts_every_covered_triple() {
        let h = random_graph(9, 0.5, 5);
        let d = build_decomposition(&h, 3, 2, &Strategy::Random, 1).unwrap();
        let hr = homogeneity_report(&h, &d, q(1, 2)).unwrap();
        let census = triad_census(&h, &d).unwrap();
        let half: u128 = census.iter().filter(|c| c.d3() == q(1, 2)).map(|c| c.triangles as u128).sum();
        assert_eq!(hr.homogeneous + half, hr.covered);
        assert_eq!(hr.total, 84);
    }

    fn report(i: usize, j: usize, k: usize, class: TriadClass) -> TriadReport {
        TriadReport {
            key: TriadKey { i, j, k, alpha: 0, beta: 0, gamma: 0 },
            disc2: vec![qi(0); 3],
            disc2_exact: [true; 3],
            triangles: 1,
            edges: 0,
            d3: qi(0),
            dev23: None,
            disc23: Some(qi(0)),
            disc23_exact: true,
            class,
            homogeneous: true,
        }
    }

    #[test]
    fn shapes() {
        let b = ErrorBudgets { pairs: 1, triples: 3 };
        assert_eq!(error_shape(&[report(0, 1, 2, TriadClass::Regular)], 5, b).kind, ShapeKind::Zero);
        let irr = [
            report(0, 1, 2, TriadClass::Disc3Irregular),
            report(0, 1, 3, TriadClass::Disc2Irregular),
            report(0, 1, 4, TriadClass::Disc3Irregular),
        ];
        let s = error_shape(&irr, 5, b);
        assert_eq!(s.kind, ShapeKind::Binary);
        assert_eq!(s.gamma, vec![(0, 1)]);
        let spread = [
            report(0, 1, 2, TriadClass::Disc3Irregular),
            report(0, 3, 4, TriadClass::Disc3Irregular),
            report(1, 3, 4, TriadClass::Disc3Irregular),
        ];
        let s = error_shape(&spread, 5, b);
        assert_eq!(s.kind, ShapeKind::Linear);
        assert_eq!(s.sigma.len(), 3);
        let s = error_shape(&spread, 5, ErrorBudgets { pairs: 1, triples: 2 });
        assert_eq!(s.kind, ShapeKind::NoneOfThese);
    }

    fn brute_min_cover(sigma: &[[usize; 3]], t: usize) -> usize {
        let pairs: Vec<(usize, usize)> = (0..t).flat_map(|i| (i + 1..t).map(move |j| (i, j))).collect();
        (0u32..1 << pairs.len())
            .filter(|m| {
                let chosen: BTreeSet<_> = (0..pairs.len()).filter(|b| m >> b & 1 == 1).map(|b| pairs[b]).collect();
                sigma.iter().all(|s| covered(s, &chosen))
            })
            .map(|m| m.count_ones() as usize)
            .min()
            .unwrap()
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(40))]
        #[test]
        fn cover_is_minimum_and_linear_follows_binary(mask in 0u32..1 << 10, eps in 1i128..20) {
            let t = 5;
            let triples: Vec<[usize; 3]> = (0..t)
                .flat_map(|i| (i + 1..t).flat_map(move |j| (j + 1..t).map(move |k| [i, j, k])))
                .collect();
            let reports: Vec<TriadReport> = triples
                .iter()
                .enumerate()
                .filter(|(b, _)| mask >> b & 1 == 1)
                .map(|(_, s)| report(s[0], s[1], s[2], TriadClass::Disc3Irregular))
                .collect();
            let budgets = ErrorBudgets::from_eps(q(eps, 100), t);
            let s = error_shape(&reports, t, budgets);
            prop_assert_eq!(s.gamma.len(), brute_min_cover(&s.sigma, t));
            for tr in &s.sigma {
                prop_assert!(covered(tr, &s.gamma.iter().copied().collect()));
            }
            if s.kind == ShapeKind::Binary {
                prop_assert!(s.linear_fits());
            }
        }

        #[test]
        fn triangles_partition_class_triples(n in 6usize..14, seed in any::<u64>()) {
            let h = ThreeGraph::empty(n);
            let d = build_decomposition(&h, 3, 3, &Strategy::Random, seed).unwrap();
            let census = triad_census(&h, &d).unwrap();
            let s = d.classes().iter().map(Vec::len).product::<usize>();
            prop_assert_eq!(census.iter().map(|c| c.triangles).sum::<usize>(), s);
        }
    }

    #[test]
    fn disc3_irregular_triads_are_caught_and_split_away() {
        // edges: x in the first half of class 0, y in class 1, z elsewhere
        let classes: Vec<Vec<usize>> = (0..4).map(|c| (c * 8..c * 8 + 8).collect()).collect();
        let d = sliced_decomposition(classes, 2, 21).unwrap();
        let mut e = Vec::new();
        for x in 0..4 {
            for y in 8..16 {
                for z in 16..32 {
                    e.push([x, y, z]);
                }
            }
        }
        let h = ThreeGraph::new(32, e).unwrap();
        let o = ClassifyOptions::new(q(1, 10), q(1, 5));
        let reports = classify_triads(&h, &d, &o).unwrap();
        for r in &reports {
            if r.class == TriadClass::Disc3Irregular {
                assert!(r.disc2.iter().all(|x| *x <= o.eps2));
            }
        }
        let shape = error_shape(&reports, 4, ErrorBudgets::from_eps(o.eps1, 4));
        assert!(reports.iter().any(|r| r.class == TriadClass::Disc3Irregular));
        assert_eq!(shape.kind, ShapeKind::Binary);
        let split = split_sigma_pairs(&d, &shape.gamma, 5).unwrap();
        let after = classify_triads(&h, &split, &o).unwrap();
        assert!(after.iter().all(|r| r.class != TriadClass::Disc3Irregular));
    }

    #[test]
    fn fix_identity_and_improvement() {
        let h = ThreeGraph::empty(24);
        let classes: Vec<Vec<usize>> = (0..3).map(|c| (c * 8..c * 8 + 8).collect()).collect();
        let d = sliced_decomposition(classes, 2, 4).unwrap();
        let (same, rep) = fix_disc2_irregular(&h, &d, qi(1), 3, q(1, 4), 22).unwrap();
        assert_eq!(same, d);
        assert_eq!(rep.failing_before, 0);
        // make part 0 of pair (0,1) a complete block on the first half of V_0
        let mut bad = d.clone();
        bad.set_pair(0, 1, (0..64).map(|x| usize::from(x >= 32)).collect()).unwrap();
        let (fixed, rep) = fix_disc2_irregular(&h, &bad, q(1, 5), 3, q(1, 4), 22).unwrap();
        assert!(rep.failing_after < rep.failing_before);
        assert_eq!(fixed.l(), 2);
        // one part: a reshuffle keeps the count
        let one = sliced_decomposition(d.classes().to_vec(), 1, 4).unwrap();
        let (f1, _) = fix_disc2_irregular(&h, &one, qi(0), 3, q(1, 4), 22).unwrap();
        assert_eq!(f1.l(), 1);
    }
}
