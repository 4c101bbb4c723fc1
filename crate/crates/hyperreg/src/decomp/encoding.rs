//! Reduced encodings: edge parts against corners, and patterns read off them.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::construct::{build_canonical, Family, FamilySpec};
use crate::core::{BipartiteGraph, ThreeGraph};
use crate::decomp::classify::{part_reports, triad_census};
use crate::decomp::decomposition::{random_pair_colours, Decomposition, TriadKey};
use crate::detect::pattern::{find_pattern_in, Host, Pattern, PatternWitness, SearchStatus};
use crate::error::{Error, Result};
use crate::num::{qi, sub_seed, Q};
use crate::quasi::disc2::DEFAULT_DISC2_CAP;

/// Edge part `alpha` of the class pair j < k.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct EdgePart {
    pub j: usize,
    pub k: usize,
    pub alpha: usize,
}

/// Two disc2-regular parts meeting at the apex class: part `to_j` of the
/// pair {apex, j} and part `to_k` of {apex, k}, over the base pair j < k.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Corner {
    pub apex: usize,
    pub j: usize,
    pub k: usize,
    pub to_j: usize,
    pub to_k: usize,
}

impl Corner {
    /// The triad formed with an edge part over the same base.
    pub fn triad_with(&self, alpha: usize) -> TriadKey {
        let Corner { apex, j, k, to_j, to_k } = *self;
        if apex < j {
            TriadKey { i: apex, j, k, alpha: to_j, beta: to_k, gamma: alpha }
        } else if apex < k {
            TriadKey { i: j, j: apex, k, alpha: to_j, beta: alpha, gamma: to_k }
        } else {
            TriadKey { i: j, j: k, k: apex, alpha, beta: to_j, gamma: to_k }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Relation {
    /// Density at least 1 - eps.
    E1,
    /// Density at most eps.
    E0,
    Undecided,
    /// The triad has no triangles.
    Unsupported,
}

#[derive(Clone, Debug, Serialize)]
pub struct EncodingEntry {
    pub edge: EdgePart,
    pub corner: Corner,
    pub relation: Relation,
    pub triangles: usize,
    #[serde(with = "crate::num::qser")]
    pub d3: Q,
}

#[derive(Clone, Debug, Serialize)]
pub struct ReducedEncoding {
    #[serde(with = "crate::num::qser")]
    pub eps: Q,
    #[serde(with = "crate::num::qser")]
    pub eps2: Q,
    pub l: usize,
    pub corners: Vec<Corner>,
    pub entries: Vec<EncodingEntry>,
    #[serde(skip)]
    lookup: BTreeMap<(EdgePart, Corner), Relation>,
}

impl ReducedEncoding {
    pub fn relation(&self, edge: EdgePart, corner: Corner) -> Option<Relation> {
        self.lookup.get(&(edge, corner)).copied()
    }

    pub fn corners_over(&self, j: usize, k: usize) -> impl Iterator<Item = &Corner> + '_ {
        self.corners.iter().filter(move |c| c.j == j && c.k == k)
    }

    pub fn count(&self, rel: Relation) -> usize {
        self.entries.iter().filter(|e| e.relation == rel).count()
    }
}

/// Corners from parts with disc2 deviation at most `eps2` at density 1/l, and
/// every (edge part, corner) over a common base placed by triad density.
pub fn reduced_encoding(h: &ThreeGraph, d: &Decomposition, eps: Q, eps2: Q, seed: u64) -> Result<ReducedEncoding> {
    if eps <= qi(0) || eps >= crate::num::q(1, 2) {
        return Err(Error::InvalidParameter(format!("eps must lie in (0, 1/2), got {eps}")));
    }
    let census = triad_census(h, d)?;
    let counts: BTreeMap<TriadKey, (usize, Q)> = census.iter().map(|c| (c.key, (c.triangles, c.d3()))).collect();
    let regular: BTreeMap<(usize, usize, usize), bool> = part_reports(d, DEFAULT_DISC2_CAP, 4096, seed)
        .into_iter()
        .map(|p| ((p.i, p.j, p.alpha), p.deviation <= eps2))
        .collect();
    let ok = |a: usize, b: usize, part: usize| regular[&(a.min(b), a.max(b), part)];
    let (t, l) = (d.t(), d.l());
    let mut corners = Vec::new();
    for j in 0..t {
        for k in j + 1..t {
            for apex in (0..t).filter(|&a| a != j && a != k) {
                for to_j in 0..l {
                    for to_k in 0..l {
                        if ok(apex, j, to_j) && ok(apex, k, to_k) {
                            corners.push(Corner { apex, j, k, to_j, to_k });
                        }
                    }
                }
            }
        }
    }
    let one = qi(1);
    let mut entries = Vec::new();
    let mut lookup = BTreeMap::new();
    for corner in &corners {
        for alpha in 0..l {
            let edge = EdgePart { j: corner.j, k: corner.k, alpha };
            let (triangles, d3) = counts[&corner.triad_with(alpha)];
            let relation = if triangles == 0 {
                Relation::Unsupported
            } else if d3 >= one - eps {
                Relation::E1
            } else if d3 <= eps {
                Relation::E0
            } else {
                Relation::Undecided
            };
            lookup.insert((edge, *corner), relation);
            entries.push(EncodingEntry { edge, corner: *corner, relation, triangles, d3 });
        }
    }
    Ok(ReducedEncoding { eps, eps2, l, corners, entries, lookup })
}

/// Maps g (left vertices to corners) and f (right vertices to edge parts) over one base pair.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EncodingWitness {
    pub pattern: String,
    pub status: SearchStatus,
    pub base: Option<(usize, usize)>,
    pub g: Vec<Corner>,
    pub f: Vec<EdgePart>,
    pub nodes_explored: u64,
}

struct EncSearch<'a> {
    enc: &'a ReducedEncoding,
    r: &'a BipartiteGraph,
    corners: Vec<Corner>,
    base: (usize, usize),
    budget: u64,
    nodes: u64,
}

impl EncSearch<'_> {
    fn fits(&self, a: usize, corner: &Corner, f: &[usize]) -> bool {
        f.iter().enumerate().all(|(b, &alpha)| {
            let want = if self.r.has(a, b) { Relation::E1 } else { Relation::E0 };
            let edge = EdgePart { j: self.base.0, k: self.base.1, alpha };
            self.enc.relation(edge, *corner) == Some(want)
        })
    }

    /// Assign f right vertex by right vertex; every left vertex must keep a corner.
    fn run(&mut self, f: &mut Vec<usize>) -> Option<bool> {
        let (left, right) = (self.r.left(), self.r.right());
        if (0..left).any(|a| !self.corners.iter().any(|c| self.fits(a, c, f))) {
            return Some(false);
        }
        if f.len() == right {
            return Some(true);
        }
        for alpha in 0..self.enc.l {
            self.nodes += 1;
            if self.nodes > self.budget {
                return None;
            }
            f.push(alpha);
            match self.run(f) {
                Some(false) => {}
                other => return other,
            }
            f.pop();
        }
        Some(false)
    }
}

/// Search every base pair for an encoding of the bipartite pattern `r`.
pub fn find_encoding(enc: &ReducedEncoding, r: &BipartiteGraph, name: &str, budget: u64) -> EncodingWitness {
    let mut bases: Vec<(usize, usize)> = enc.corners.iter().map(|c| (c.j, c.k)).collect();
    bases.dedup();
    let mut nodes = 0;
    let mut inconclusive = false;
    for base in bases {
        let corners: Vec<Corner> = enc.corners_over(base.0, base.1).copied().collect();
        let mut s = EncSearch { enc, r, corners, base, budget: budget.saturating_sub(nodes), nodes: 0 };
        let mut f = Vec::new();
        let outcome = s.run(&mut f);
        nodes += s.nodes;
        match outcome {
            Some(true) => {
                let g: Vec<Corner> = (0..r.left())
                    .map(|a| *s.corners.iter().find(|c| s.fits(a, c, &f)).expect("checked by the search"))
                    .collect();
                let f = f.into_iter().map(|alpha| EdgePart { j: base.0, k: base.1, alpha }).collect();
                let w = EncodingWitness {
                    pattern: name.to_string(),
                    status: SearchStatus::Found,
                    base: Some(base),
                    g,
                    f,
                    nodes_explored: nodes,
                };
                verify_encoding(enc, r, &w).expect("search output satisfies the encoding conditions");
                return w;
            }
            Some(false) => {}
            None => {
                inconclusive = true;
                break;
            }
        }
    }
    let status = if inconclusive { SearchStatus::Inconclusive } else { SearchStatus::AbsentCertified };
    EncodingWitness { pattern: name.to_string(), status, base: None, g: Vec::new(), f: Vec::new(), nodes_explored: nodes }
}

/// Check both encoding conditions for a found witness.
pub fn verify_encoding(enc: &ReducedEncoding, r: &BipartiteGraph, w: &EncodingWitness) -> Result<()> {
    let bad = |m: String| Err(Error::InvalidWitness(m));
    let Some((j0, k0)) = w.base else { return bad("no base pair".into()) };
    if w.g.len() != r.left() || w.f.len() != r.right() {
        return bad("maps do not cover the pattern".into());
    }
    if w.f.iter().any(|e| (e.j, e.k) != (j0, k0)) || w.g.iter().any(|c| (c.j, c.k) != (j0, k0)) {
        return bad("images leave the base pair".into());
    }
    for (a, c) in w.g.iter().enumerate() {
        for (b, e) in w.f.iter().enumerate() {
            let want = if r.has(a, b) { Relation::E1 } else { Relation::E0 };
            if enc.relation(*e, *c) != Some(want) {
                return bad(format!("pattern pair {a} {b} is not encoded"));
            }
        }
    }
    Ok(())
}

/// Search the blocks named by an H(k) encoding for an induced F(k).
///
/// F(k) has parts A (k vertices), B (one vertex per function and index) and
/// C (k vertices). A goes to one base class and B to the other (both
/// orientations are tried), and C_w to the apex class of g(a_w).
pub fn extract_fop2_witness(
    h: &ThreeGraph,
    d: &Decomposition,
    w: &EncodingWitness,
    k: usize,
    budget: u64,
) -> Result<PatternWitness> {
    let name = format!("F({k})");
    if w.status != SearchStatus::Found || w.g.len() != k || w.f.len() != k {
        return Err(Error::InvalidWitness("need a found encoding of H(k)".into()));
    }
    let (j0, k0) = w.base.expect("found witnesses carry a base");
    let pattern = Pattern::build(&FamilySpec::new(Family::F, k), crate::construct::families::DEFAULT_VERTEX_CAP)?;
    let parts = match &pattern {
        Pattern::Three(p) => p.partition().expect("F(k) is 3-partite").clone(),
        Pattern::Bip(_) => unreachable!("F(k) is a 3-graph"),
    };
    let mut total = 0;
    for (x, y) in [(k0, j0), (j0, k0)] {
        let mut domains = vec![Vec::new(); pattern.vertex_count()];
        for &v in &parts[0] {
            domains[v] = d.classes()[x].clone();
        }
        for &v in &parts[1] {
            domains[v] = d.classes()[y].clone();
        }
        for (wi, &v) in parts[2].iter().enumerate() {
            domains[v] = d.classes()[w.g[wi].apex].clone();
        }
        let r = find_pattern_in(Host::Three(h), &pattern, &name, budget.saturating_sub(total), &domains)?;
        total += r.nodes_explored;
        if r.status != SearchStatus::AbsentCertified {
            return Ok(PatternWitness { nodes_explored: total, ..r });
        }
    }
    Ok(PatternWitness { pattern: name, status: SearchStatus::AbsentCertified, embedding: None, nodes_explored: total })
}

/// A 3-graph with an H(k) encoding built in: classes X, Y and Z_0..Z_{k-1}
/// of size m, K2[X, Y] randomly cut into k parts, and xyz (z in Z_b) an
/// edge exactly when b <= the part of xy. Returns the graph and its
/// decomposition (all other pairs randomly cut into k parts).
pub fn otherway_instance(m: usize, k: usize, seed: u64) -> Result<(ThreeGraph, Decomposition)> {
    if m == 0 || k == 0 {
        return Err(Error::InvalidParameter("m and k must be positive".into()));
    }
    let t = 2 + k;
    let classes: Vec<Vec<usize>> = (0..t).map(|c| (c * m..(c + 1) * m).collect()).collect();
    let mut colours = BTreeMap::new();
    for i in 0..t {
        for j in i + 1..t {
            colours.insert((i, j), random_pair_colours(m, m, k, sub_seed(seed, &format!("pair-{i}-{j}")))?);
        }
    }
    let xy = colours[&(0, 1)].clone();
    let mut edges = Vec::new();
    for x in 0..m {
        for y in 0..m {
            let alpha = xy[x * m + y];
            for b in 0..=alpha {
                for z in 0..m {
                    edges.push([x, m + y, (2 + b) * m + z]);
                }
            }
        }
    }
    let h = ThreeGraph::new(t * m, edges)?;
    let d = Decomposition::new(k, classes, colours)?;
    Ok((h, d))
}

/// H(k) as a bipartite pattern.
pub fn half_graph(k: usize) -> BipartiteGraph {
    build_canonical(&FamilySpec::new(Family::HalfGraph, k), 1 << 16)
        .expect("half graphs are small")
        .bip()
        .expect("half graphs are bipartite")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decomp::decomposition::sliced_decomposition;
    use crate::detect::pattern::verify_embedding;
    use crate::num::q;
    use proptest::prelude::*;

    #[test]
    fn corner_triads_are_sorted() {
        let c = Corner { apex: 1, j: 0, k: 2, to_j: 3, to_k: 4 };
        assert_eq!(c.triad_with(5), TriadKey { i: 0, j: 1, k: 2, alpha: 3, beta: 5, gamma: 4 });
        let c = Corner { apex: 3, j: 0, k: 2, to_j: 3, to_k: 4 };
        assert_eq!(c.triad_with(5), TriadKey { i: 0, j: 2, k: 3, alpha: 5, beta: 3, gamma: 4 });
        let c = Corner { apex: 0, j: 1, k: 2, to_j: 3, to_k: 4 };
        assert_eq!(c.triad_with(5), TriadKey { i: 0, j: 1, k: 2, alpha: 3, beta: 4, gamma: 5 });
    }

    #[test]
    fn empty_e1_certifies_absence() {
        let classes: Vec<Vec<usize>> = (0..3).map(|c| (c * 5..c * 5 + 5).collect()).collect();
        let d = sliced_decomposition(classes, 2, 1).unwrap();
        let h = ThreeGraph::empty(15);
        let enc = reduced_encoding(&h, &d, q(1, 10), qi(1), 0).unwrap();
        assert_eq!(enc.count(Relation::E1), 0);
        let w = find_encoding(&enc, &half_graph(2), "H(2)", 1_000_000);
        assert_eq!(w.status, SearchStatus::AbsentCertified);
        let w = find_encoding(&enc, &half_graph(1), "H(1)", 0);
        assert_eq!(w.status, SearchStatus::Inconclusive);
    }

    #[test]
    fn otherway_pipeline() {
        let (h, d) = otherway_instance(48, 2, 3).unwrap();
        let enc = reduced_encoding(&h, &d, q(1, 10), q(1, 5), 1).unwrap();
        assert_eq!(enc.count(Relation::Undecided), 0);
        let w = find_encoding(&enc, &half_graph(2), "H(2)", 1_000_000);
        assert_eq!(w.status, SearchStatus::Found);
        verify_encoding(&enc, &half_graph(2), &w).unwrap();
        let f = extract_fop2_witness(&h, &d, &w, 2, 5_000_000).unwrap();
        assert_eq!(f.status, SearchStatus::Found);
        let p = Pattern::build(&FamilySpec::new(Family::F, 2), 1 << 16).unwrap();
        verify_embedding(Host::Three(&h), &p, f.embedding.as_ref().unwrap()).unwrap();
        let none = extract_fop2_witness(&h, &d, &w, 2, 0).unwrap();
        assert_eq!(none.status, SearchStatus::Inconclusive);
    }

    #[test]
    fn single_split_pair_gives_fop1() {
        let (h, d) = otherway_instance(6, 1, 2).unwrap();
        let enc = reduced_encoding(&h, &d, q(1, 10), qi(1), 1).unwrap();
        let w = find_encoding(&enc, &half_graph(1), "H(1)", 10_000);
        assert_eq!(w.status, SearchStatus::Found);
        assert_eq!(extract_fop2_witness(&h, &d, &w, 1, 100_000).unwrap().status, SearchStatus::Found);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(20))]
        #[test]
        fn e1_and_e0_are_disjoint_and_rederivable(seed in any::<u64>(), num in 1i128..50) {
            use rand::Rng;
            let mut rng = crate::num::stream(seed, "enc-graph");
            let mut e = Vec::new();
            for a in 0..12 {
                for b in a + 1..12 {
                    for c in b + 1..12 {
                        if rng.gen_bool(0.5) {
                            e.push([a, b, c]);
                        }
                    }
                }
            }
            let h = ThreeGraph::new(12, e).unwrap();
            let classes: Vec<Vec<usize>> = (0..4).map(|c| (c * 3..c * 3 + 3).collect()).collect();
            let d = sliced_decomposition(classes, 2, seed).unwrap();
            let eps = q(num, 101);
            let enc = reduced_encoding(&h, &d, eps, qi(1), seed).unwrap();
            for entry in &enc.entries {
                let g = d.triad_graph(&entry.corner.triad_with(entry.edge.alpha));
                let mut tri = 0i128;
                let mut hit = 0i128;
                for (a, &x) in g.parts[0].iter().enumerate() {
                    for (b, &y) in g.parts[1].iter().enumerate() {
                        for (c, &z) in g.parts[2].iter().enumerate() {
                            if g.is_triangle(a, b, c) {
                                tri += 1;
                                hit += i128::from(h.contains(x, y, z));
                            }
                        }
                    }
                }
                let in1 = tri > 0 && q(hit, tri) >= qi(1) - eps;
                let in0 = tri > 0 && q(hit, tri) <= eps;
                prop_assert!(!(in1 && in0));
                prop_assert_eq!(entry.relation == Relation::E1, in1);
                prop_assert_eq!(entry.relation == Relation::E0, in0);
            }
        }
    }
}
