//! Common refinements of two decompositions and the approximate-refinement check.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::construct::{even_repartition, SliceResult};
use crate::core::BipartiteGraph;
use crate::decomp::decomposition::Decomposition;
use crate::error::{Error, Result};
use crate::num::{q, qi, sub_seed, Q};
use crate::quasi::disc2::DEFAULT_DISC2_CAP;
use crate::quasi::{disc2_deviation, Disc2Options};

/// Part label of a pair in a decomposition: (i, j, alpha) for a cross pair,
/// (i, i, 0) for a pair inside class i (the pairs of a one-class
/// decomposition form its single part).
type Label = (usize, usize, usize);

fn label(d: &Decomposition, x: usize, y: usize) -> Label {
    match d.colour(x, y) {
        Some(l) => l,
        None => {
            let c = d.class_of(x);
            (c, c, 0)
        }
    }
}

/// Class containment for one class of the finer decomposition.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClassDefect {
    pub class: usize,
    /// Class of the coarser decomposition with the largest overlap.
    pub best: usize,
    /// |V_i \ W_best|.
    pub defect: usize,
    pub size: usize,
}

/// Containment of one edge part in its best part of the coarser decomposition.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PartDefect {
    pub i: usize,
    pub j: usize,
    pub alpha: usize,
    pub size: usize,
    pub best: Option<Label>,
    /// |P \ Q|.
    pub defect: usize,
    /// disc2 deviation of P \ Q at its own density.
    #[serde(with = "crate::num::qser")]
    pub disc2: Q,
    pub disc2_exact: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RefinementCheck {
    pub pass: bool,
    pub classes: Vec<ClassDefect>,
    pub parts: Vec<PartDefect>,
    /// Class pairs with a part failing containment.
    pub sigma: Vec<(usize, usize)>,
    pub failures: Vec<String>,
}

fn class_defects(r: &Decomposition, q_: &Decomposition) -> Vec<ClassDefect> {
    r.classes()
        .iter()
        .enumerate()
        .map(|(c, class)| {
            let mut overlap = vec![0usize; q_.t()];
            for &v in class {
                overlap[q_.class_of(v)] += 1;
            }
            let (best, &o) = overlap
                .iter()
                .enumerate()
                .max_by_key(|(b, &o)| (o, std::cmp::Reverse(*b)))
                .expect("at least one class");
            ClassDefect { class: c, best, defect: class.len() - o, size: class.len() }
        })
        .collect()
}

/// Candidate coarser parts of P, by decreasing overlap.
fn part_candidates(r: &Decomposition, q_: &Decomposition, i: usize, j: usize, alpha: usize) -> (usize, Vec<(Label, usize)>) {
    let (ci, cj) = (&r.classes()[i], &r.classes()[j]);
    let cols = r.pair_colours(i, j);
    let mut counts: BTreeMap<Label, usize> = BTreeMap::new();
    let mut size = 0;
    for (a, &x) in ci.iter().enumerate() {
        for (b, &y) in cj.iter().enumerate() {
            if cols[a * cj.len() + b] == alpha {
                size += 1;
                *counts.entry(label(q_, x, y)).or_default() += 1;
            }
        }
    }
    let mut c: Vec<(Label, usize)> = counts.into_iter().collect();
    c.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
    (size, c)
}

fn difference_disc2(r: &Decomposition, q_: &Decomposition, i: usize, j: usize, alpha: usize, best: Option<Label>) -> (Q, bool) {
    let (ci, cj) = (&r.classes()[i], &r.classes()[j]);
    let cols = r.pair_colours(i, j);
    let g = BipartiteGraph::from_fn(ci.len(), cj.len(), |a, b| {
        cols[a * cj.len() + b] == alpha && Some(label(q_, ci[a], cj[b])) != best
    });
    let opts = Disc2Options {
        density: None,
        cap: DEFAULT_DISC2_CAP,
        min_fraction: None,
        sampling: Some((4096, sub_seed(0, &format!("difference-{i}-{j}-{alpha}")))),
    };
    let rep = disc2_deviation(&g, &opts).expect("sampling covers graphs over the cap");
    (rep.deviation, rep.exact)
}

/// Check that `r` is an (eps1, eps2)-approximate refinement of `q_`.
pub fn verify_approx_refinement(r: &Decomposition, q_: &Decomposition, eps1: Q, eps2: Q) -> Result<RefinementCheck> {
    if r.n() != q_.n() {
        return Err(Error::Precondition(format!("vertex sets differ: {} and {}", r.n(), q_.n())));
    }
    let mut failures = Vec::new();
    let classes = class_defects(r, q_);
    for c in &classes {
        if c.defect > 0 && qi(c.defect as i128) >= eps1 * qi(c.size as i128) {
            failures.push(format!("class {} has {} of {} vertices outside class {}", c.class, c.defect, c.size, c.best));
        }
    }
    let mut parts = Vec::new();
    let mut sigma = Vec::new();
    for i in 0..r.t() {
        for j in i + 1..r.t() {
            let mut pair_ok = true;
            for alpha in 0..r.l() {
                let (size, cands) = part_candidates(r, q_, i, j, alpha);
                let allowed = eps1 * qi(size as i128);
                let mut chosen: Option<PartDefect> = None;
                for &(lab, count) in &cands {
                    let defect = size - count;
                    if qi(defect as i128) > allowed {
                        break;
                    }
                    let (disc2, exact) = difference_disc2(r, q_, i, j, alpha, Some(lab));
                    let pd = PartDefect { i, j, alpha, size, best: Some(lab), defect, disc2, disc2_exact: exact };
                    if disc2 <= eps2 {
                        chosen = Some(pd);
                        break;
                    }
                    chosen.get_or_insert(pd);
                }
                let pd = chosen.unwrap_or_else(|| {
                    let best = cands.first().map(|c| c.0);
                    let (disc2, exact) = difference_disc2(r, q_, i, j, alpha, best);
                    PartDefect { i, j, alpha, size, best, defect: size - cands.first().map_or(0, |c| c.1), disc2, disc2_exact: exact }
                });
                if qi(pd.defect as i128) > allowed || pd.disc2 > eps2 {
                    pair_ok = false;
                }
                parts.push(pd);
            }
            if !pair_ok {
                sigma.push((i, j));
            }
        }
    }
    let t = r.t() as i128;
    if qi(sigma.len() as i128) > eps1 * q(t * (t - 1), 2) {
        failures.push(format!("{} exceptional class pairs exceed the allowance", sigma.len()));
    }
    Ok(RefinementCheck { pass: failures.is_empty(), classes, parts, sigma, failures })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RefinementReport {
    /// Nonempty intersections V^p_a with V^q_b, before rebalancing.
    pub cell_sizes: Vec<usize>,
    /// Vertices moved to reach an equipartition.
    pub moved: Vec<usize>,
    /// Smallest parameters at which the output passes against both inputs.
    #[serde(with = "crate::num::qser")]
    pub eps1: Q,
    #[serde(with = "crate::num::qser")]
    pub eps2: Q,
    pub against_p: RefinementCheck,
    pub against_q: RefinementCheck,
}

/// Intersect the classes of `p` and `q_`, rebalance to an equipartition
/// (largest cells receive the extra vertex; each cell over its target gives
/// up its lowest-index vertices, which fill the short cells in order), then
/// cut every new class pair into `l_out` parts following the joint labels.
pub fn common_refinement(p: &Decomposition, q_: &Decomposition, l_out: Option<usize>, seed: u64) -> Result<(Decomposition, RefinementReport)> {
    let n = p.n();
    if n != q_.n() {
        return Err(Error::Precondition(format!("vertex sets differ: {} and {}", n, q_.n())));
    }
    let l_out = l_out.unwrap_or(p.l() * q_.l());
    if l_out == 0 {
        return Err(Error::InvalidParameter("l must be positive".into()));
    }
    let mut cells: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
    for v in 0..n {
        cells.entry((p.class_of(v), q_.class_of(v))).or_default().push(v);
    }
    let mut cells: Vec<Vec<usize>> = cells.into_values().collect();
    let cell_sizes: Vec<usize> = cells.iter().map(Vec::len).collect();
    let c = cells.len();
    let (base, rem) = (n / c, n % c);
    let mut by_size: Vec<usize> = (0..c).collect();
    by_size.sort_by(|&a, &b| cell_sizes[b].cmp(&cell_sizes[a]).then(a.cmp(&b)));
    let mut target = vec![base; c];
    for &x in by_size.iter().take(rem) {
        target[x] += 1;
    }
    let mut pool = Vec::new();
    for (cell, &t) in cells.iter_mut().zip(&target) {
        if cell.len() > t {
            let surplus = cell.len() - t;
            pool.extend(cell.drain(..surplus));
        }
    }
    let moved = pool.clone();
    let mut pool = pool.into_iter();
    for (cell, &t) in cells.iter_mut().zip(&target) {
        while cell.len() < t {
            cell.push(pool.next().expect("surplus matches deficit"));
        }
        cell.sort_unstable();
    }
    let mut colours = BTreeMap::new();
    for i in 0..c {
        for j in i + 1..c {
            let (ci, cj) = (&cells[i], &cells[j]);
            let mut groups: BTreeMap<(Label, Label), Vec<(usize, usize)>> = BTreeMap::new();
            for (a, &x) in ci.iter().enumerate() {
                for (b, &y) in cj.iter().enumerate() {
                    groups.entry((label(p, x, y), label(q_, x, y))).or_default().push((a, b));
                }
            }
            let input = SliceResult::from_parts(ci.len(), cj.len(), groups.into_values().collect());
            let total = ci.len() * cj.len();
            let mut cols = vec![0usize; total];
            if total < l_out {
                for (alpha, part) in input.parts.iter().enumerate() {
                    for &(a, b) in part {
                        cols[a * cj.len() + b] = alpha;
                    }
                }
            } else {
                let even = even_repartition(&input, l_out, sub_seed(seed, &format!("refine-{i}-{j}")))?;
                for (alpha, part) in even.slices.parts.iter().enumerate() {
                    for &(a, b) in part {
                        cols[a * cj.len() + b] = alpha;
                    }
                }
            }
            colours.insert((i, j), cols);
        }
    }
    let r = Decomposition::new(l_out, cells, colours)?;
    let (e1p, e2p) = minimal_params(&r, p);
    let (e1q, e2q) = minimal_params(&r, q_);
    let eps1 = e1p.max(e1q);
    let eps2 = e2p.max(e2q);
    let against_p = verify_approx_refinement(&r, p, eps1, eps2)?;
    let against_q = verify_approx_refinement(&r, q_, eps1, eps2)?;
    Ok((r, RefinementReport { cell_sizes, moved, eps1, eps2, against_p, against_q }))
}

/// Smallest (eps1, eps2) passing with an empty exceptional set, taking the
/// largest-overlap part for each edge part.
fn minimal_params(r: &Decomposition, q_: &Decomposition) -> (Q, Q) {
    let mut eps1 = qi(0);
    let half_n = q(1, 2 * r.n() as i128);
    for c in class_defects(r, q_) {
        if c.defect > 0 {
            eps1 = eps1.max(q(c.defect as i128, c.size as i128) + half_n);
        }
    }
    let mut eps2 = qi(0);
    for i in 0..r.t() {
        for j in i + 1..r.t() {
            for alpha in 0..r.l() {
                let (size, cands) = part_candidates(r, q_, i, j, alpha);
                let Some(&(lab, count)) = cands.first() else { continue };
                eps1 = eps1.max(q((size - count) as i128, size as i128));
                eps2 = eps2.max(difference_disc2(r, q_, i, j, alpha, Some(lab)).0);
            }
        }
    }
    (eps1, eps2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::core::ThreeGraph;
    use crate::decomp::decomposition::{build_decomposition, sliced_decomposition, Strategy};
    use proptest::prelude::*;

    fn trivial(n: usize) -> Decomposition {
        Decomposition::new(1, vec![(0..n).collect()], BTreeMap::new()).unwrap()
    }

    #[test]
    fn trivial_coarse_has_zero_defects() {
        let d = build_decomposition(&ThreeGraph::empty(12), 3, 2, &Strategy::Random, 5).unwrap();
        let c = verify_approx_refinement(&d, &trivial(12), qi(0), qi(0)).unwrap();
        assert!(c.pass);
        assert!(c.classes.iter().all(|x| x.defect == 0));
        assert!(c.parts.iter().all(|x| x.defect == 0));
    }

    #[test]
    fn exact_refinement_passes_at_zero() {
        let d = build_decomposition(&ThreeGraph::empty(12), 3, 2, &Strategy::Random, 5).unwrap();
        assert!(verify_approx_refinement(&d, &d, qi(0), qi(0)).unwrap().pass);
    }

    #[test]
    fn split_class_fails_and_is_named() {
        let q_ = sliced_decomposition(vec![(0..6).collect(), (6..12).collect()], 1, 1).unwrap();
        let r = sliced_decomposition(vec![vec![0, 1, 2, 6, 7, 8], vec![3, 4, 5, 9, 10, 11]], 1, 1).unwrap();
        let c = verify_approx_refinement(&r, &q_, q(1, 10), qi(1)).unwrap();
        assert!(!c.pass);
        assert!(c.failures[0].starts_with("class 0"));
    }

    #[test]
    fn self_refinement_moves_little() {
        let d = build_decomposition(&ThreeGraph::empty(14), 3, 2, &Strategy::Random, 8).unwrap();
        let (r, rep) = common_refinement(&d, &d, None, 1).unwrap();
        assert_eq!(r.t(), 3);
        assert!(rep.moved.len() <= 3);
        assert!(rep.against_p.classes.iter().all(|c| c.defect <= 3));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(50))]
        #[test]
        fn refinement_passes_at_reported_parameters(seed in any::<u64>(), n in 8usize..16) {
            let h = ThreeGraph::empty(n);
            let p = build_decomposition(&h, 2, 2, &Strategy::Random, seed).unwrap();
            let q_ = build_decomposition(&h, 2, 1, &Strategy::Random, seed ^ 0xabc).unwrap();
            let (r, rep) = common_refinement(&p, &q_, None, seed).unwrap();
            prop_assert!(rep.against_p.pass, "{:?}", rep.against_p.failures);
            prop_assert!(rep.against_q.pass, "{:?}", rep.against_q.failures);
            let sizes: Vec<usize> = r.classes().iter().map(Vec::len).collect();
            prop_assert!(sizes.iter().max().unwrap() - sizes.iter().min().unwrap() <= 1);
            prop_assert!(verify_approx_refinement(&r, &p, rep.eps1, rep.eps2).unwrap().pass);
        }
    }
}
