//! Vertex equipartitions with per-pair edge partitions, and their builders.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::construct::slice_bipartite;
use crate::core::{pair_at, pair_index, BipartiteGraph, ThreeGraph, TripartiteGraph};
use crate::error::{Error, Result};
use crate::num::{sub_seed, Q};

/// One triad: classes i < j < k, part alpha on ij, beta on ik, gamma on jk.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct TriadKey {
    pub i: usize,
    pub j: usize,
    pub k: usize,
    pub alpha: usize,
    pub beta: usize,
    pub gamma: usize,
}

impl TriadKey {
    pub fn classes(&self) -> [usize; 3] {
        [self.i, self.j, self.k]
    }

    /// The three (pair, part) references of the triad.
    pub fn parts(&self) -> [(usize, usize, usize); 3] {
        [(self.i, self.j, self.alpha), (self.i, self.k, self.beta), (self.j, self.k, self.gamma)]
    }
}

/// A (t, l)-decomposition: t classes and, for every class pair i < j, a
/// colouring of K2[V_i, V_j] by parts 0..l.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decomposition {
    l: usize,
    classes: Vec<Vec<usize>>,
    class_of: Vec<usize>,
    local: Vec<usize>,
    /// colours[(i, j)][a * |V_j| + b] is the part of (V_i[a], V_j[b]).
    colours: BTreeMap<(usize, usize), Vec<usize>>,
    pub eps1: Option<Q>,
    pub eps2: Option<Q>,
}

#[derive(Serialize, Deserialize)]
struct DecompositionFile {
    t: usize,
    l: usize,
    classes: Vec<Vec<usize>>,
    edge_parts: BTreeMap<String, Vec<Vec<usize>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    eps1: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    eps2: Option<String>,
}

impl Decomposition {
    /// Checks the classes partition 0..n into an equipartition and that every
    /// colouring has the right length and uses parts below `l`.
    pub fn new(
        l: usize,
        mut classes: Vec<Vec<usize>>,
        colours: BTreeMap<(usize, usize), Vec<usize>>,
    ) -> Result<Self> {
        if l == 0 || classes.is_empty() {
            return Err(Error::InvalidParameter("t and l must be positive".into()));
        }
        let n: usize = classes.iter().map(Vec::len).sum();
        let mut class_of = vec![usize::MAX; n];
        let mut local = vec![0; n];
        for (c, class) in classes.iter_mut().enumerate() {
            class.sort_unstable();
            for (a, &v) in class.iter().enumerate() {
                if v >= n {
                    return Err(Error::OutOfRange { index: v, n });
                }
                if class_of[v] != usize::MAX {
                    return Err(Error::OverlappingParts(v));
                }
                class_of[v] = c;
                local[v] = a;
            }
        }
        let sizes: Vec<usize> = classes.iter().map(Vec::len).collect();
        let (lo, hi) = (sizes.iter().min().copied().unwrap_or(0), sizes.iter().max().copied().unwrap_or(0));
        if hi - lo > 1 {
            return Err(Error::NotEquipartition(sizes));
        }
        let t = classes.len();
        for i in 0..t {
            for j in i + 1..t {
                let c = colours
                    .get(&(i, j))
                    .ok_or_else(|| Error::Precondition(format!("class pair {i},{j} has no edge partition")))?;
                if c.len() != sizes[i] * sizes[j] {
                    return Err(Error::Arity { expected: sizes[i] * sizes[j], got: c.len() });
                }
                if let Some(&bad) = c.iter().find(|&&a| a >= l) {
                    return Err(Error::OutOfRange { index: bad, n: l });
                }
            }
        }
        if colours.keys().any(|&(i, j)| i >= j || j >= t) {
            return Err(Error::Precondition("edge partition keys must be class pairs i < j".into()));
        }
        Ok(Decomposition { l, classes, class_of, local, colours, eps1: None, eps2: None })
    }

    pub fn t(&self) -> usize {
        self.classes.len()
    }

    pub fn l(&self) -> usize {
        self.l
    }

    pub fn n(&self) -> usize {
        self.class_of.len()
    }

    pub fn classes(&self) -> &[Vec<usize>] {
        &self.classes
    }

    pub fn class_of(&self, v: usize) -> usize {
        self.class_of[v]
    }

    /// Position of `v` inside its (sorted) class.
    pub fn local(&self, v: usize) -> usize {
        self.local[v]
    }

    /// Part colouring of the class pair i < j.
    pub fn pair_colours(&self, i: usize, j: usize) -> &[usize] {
        &self.colours[&(i, j)]
    }

    /// (i, j, part) of the pair {x, y} with i < j, or None inside a class.
    pub fn colour(&self, x: usize, y: usize) -> Option<(usize, usize, usize)> {
        let (cx, cy) = (self.class_of[x], self.class_of[y]);
        if cx == cy {
            return None;
        }
        let ((i, a), (j, b)) = if cx < cy {
            ((cx, self.local[x]), (cy, self.local[y]))
        } else {
            ((cy, self.local[y]), (cx, self.local[x]))
        };
        Some((i, j, self.colours[&(i, j)][a * self.classes[j].len() + b]))
    }

    /// Part `alpha` of the pair i < j as a bipartite graph on local indices.
    pub fn part_graph(&self, i: usize, j: usize, alpha: usize) -> BipartiteGraph {
        let cols = &self.colours[&(i, j)];
        let w = self.classes[j].len();
        BipartiteGraph::from_fn(self.classes[i].len(), w, |a, b| cols[a * w + b] == alpha)
    }

    pub fn part_size(&self, i: usize, j: usize, alpha: usize) -> usize {
        self.colours[&(i, j)].iter().filter(|&&c| c == alpha).count()
    }

    pub fn triad_graph(&self, key: &TriadKey) -> TripartiteGraph {
        let [i, j, k] = key.classes();
        TripartiteGraph::new(
            [self.classes[i].clone(), self.classes[j].clone(), self.classes[k].clone()],
            self.part_graph(i, j, key.alpha),
            self.part_graph(i, k, key.beta),
            self.part_graph(j, k, key.gamma),
        )
        .expect("part graphs match class sizes")
    }

    /// Every triad key, ordered.
    pub fn triad_keys(&self) -> Vec<TriadKey> {
        let (t, l) = (self.t(), self.l);
        let mut out = Vec::new();
        for i in 0..t {
            for j in i + 1..t {
                for k in j + 1..t {
                    for alpha in 0..l {
                        for beta in 0..l {
                            for gamma in 0..l {
                                out.push(TriadKey { i, j, k, alpha, beta, gamma });
                            }
                        }
                    }
                }
            }
        }
        out
    }

    /// Replace the colouring of one class pair.
    pub fn set_pair(&mut self, i: usize, j: usize, colours: Vec<usize>) -> Result<()> {
        let expected = self.classes[i].len() * self.classes[j].len();
        if i >= j || colours.len() != expected {
            return Err(Error::Arity { expected, got: colours.len() });
        }
        if let Some(&bad) = colours.iter().find(|&&a| a >= self.l) {
            return Err(Error::OutOfRange { index: bad, n: self.l });
        }
        self.colours.insert((i, j), colours);
        Ok(())
    }

    pub fn to_json(&self) -> String {
        let n = self.n();
        let mut edge_parts = BTreeMap::new();
        for (&(i, j), cols) in &self.colours {
            let w = self.classes[j].len();
            let mut parts = vec![Vec::new(); self.l];
            for (idx, &c) in cols.iter().enumerate() {
                let (x, y) = (self.classes[i][idx / w], self.classes[j][idx % w]);
                parts[c].push(pair_index(n, x, y));
            }
            for p in &mut parts {
                p.sort_unstable();
            }
            edge_parts.insert(format!("{i},{j}"), parts);
        }
        let file = DecompositionFile {
            t: self.t(),
            l: self.l,
            classes: self.classes.clone(),
            edge_parts,
            eps1: self.eps1.map(|x| x.to_string()),
            eps2: self.eps2.map(|x| x.to_string()),
        };
        serde_json::to_string(&file).expect("decomposition serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: DecompositionFile =
            serde_json::from_str(text).map_err(|e| Error::Parse { line: e.line(), msg: e.to_string() })?;
        if file.classes.len() != file.t {
            return Err(Error::Arity { expected: file.t, got: file.classes.len() });
        }
        let n: usize = file.classes.iter().map(Vec::len).sum();
        let mut class_of = vec![usize::MAX; n];
        let mut local = vec![0; n];
        let mut classes = file.classes.clone();
        for (c, class) in classes.iter_mut().enumerate() {
            class.sort_unstable();
            for (a, &v) in class.iter().enumerate() {
                if v >= n {
                    return Err(Error::OutOfRange { index: v, n });
                }
                class_of[v] = c;
                local[v] = a;
            }
        }
        let pairs = n * n.saturating_sub(1) / 2;
        let mut colours = BTreeMap::new();
        for (key, parts) in &file.edge_parts {
            let bad = || Error::Parse { line: 0, msg: format!("bad class pair key {key:?}") };
            let (a, b) = key.split_once(',').ok_or_else(bad)?;
            let (i, j): (usize, usize) = (a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?);
            if i >= j || j >= file.t {
                return Err(bad());
            }
            let w = classes[j].len();
            let mut cols = vec![usize::MAX; classes[i].len() * w];
            if parts.len() != file.l {
                return Err(Error::Arity { expected: file.l, got: parts.len() });
            }
            for (alpha, part) in parts.iter().enumerate() {
                for &p in part {
                    if p >= pairs {
                        return Err(Error::OutOfRange { index: p, n: pairs });
                    }
                    let (x, y) = pair_at(n, p);
                    let (x, y) = if class_of[x] == i { (x, y) } else { (y, x) };
                    if class_of[x] != i || class_of[y] != j {
                        return Err(Error::Precondition(format!("pair {p} does not cross classes {i},{j}")));
                    }
                    let slot = &mut cols[local[x] * w + local[y]];
                    if *slot != usize::MAX {
                        return Err(Error::DuplicatePair(x, y));
                    }
                    *slot = alpha;
                }
            }
            if cols.contains(&usize::MAX) {
                return Err(Error::Precondition(format!("edge parts of {i},{j} do not cover the pair")));
            }
            colours.insert((i, j), cols);
        }
        let mut d = Decomposition::new(file.l, file.classes, colours)?;
        let parse = |s: &Option<String>| -> Result<Option<Q>> {
            s.as_ref()
                .map(|x| crate::num::parse_q(x).ok_or_else(|| Error::Parse { line: 0, msg: format!("bad rational {x:?}") }))
                .transpose()
        };
        d.eps1 = parse(&file.eps1)?;
        d.eps2 = parse(&file.eps2)?;
        Ok(d)
    }
}

/// How the vertex classes are chosen.
#[derive(Clone, Debug)]
pub enum Strategy {
    /// Uniform random equipartition.
    Random,
    /// The 3-partition of a 3-partite input, each part cut into t/3 classes.
    Natural,
    /// A prepared decomposition, checked against the graph.
    Given(Decomposition),
}

/// Random colouring of K2[V_i, V_j] by `l` parts.
pub fn random_pair_colours(rows: usize, cols: usize, l: usize, seed: u64) -> Result<Vec<usize>> {
    let s = slice_bipartite(&BipartiteGraph::complete(rows, cols), l, seed, None)?;
    let mut out = vec![0; rows * cols];
    for (alpha, part) in s.parts.iter().enumerate() {
        for &(a, b) in part {
            out[a * cols + b] = alpha;
        }
    }
    Ok(out)
}

/// Classes plus random slicing of every class pair into `l` parts.
pub fn sliced_decomposition(classes: Vec<Vec<usize>>, l: usize, seed: u64) -> Result<Decomposition> {
    let t = classes.len();
    let mut colours = BTreeMap::new();
    for i in 0..t {
        for j in i + 1..t {
            let s = sub_seed(seed, &format!("pair-{i}-{j}"));
            colours.insert((i, j), random_pair_colours(classes[i].len(), classes[j].len(), l, s)?);
        }
    }
    Decomposition::new(l, classes, colours)
}

pub fn build_decomposition(h: &ThreeGraph, t: usize, l: usize, strategy: &Strategy, seed: u64) -> Result<Decomposition> {
    let n = h.n();
    if let Strategy::Given(d) = strategy {
        if d.n() != n {
            return Err(Error::Precondition(format!("decomposition covers {} vertices, graph has {n}", d.n())));
        }
        return Ok(d.clone());
    }
    if t == 0 || l == 0 || t > n {
        return Err(Error::Infeasible(format!("t = {t}, l = {l} on {n} vertices")));
    }
    let classes = match strategy {
        Strategy::Random => {
            let mut rng = crate::num::stream(seed, "decomposition-classes");
            crate::core::VertexPartition::random_equipartition(n, t, &mut rng)?.classes()
        }
        Strategy::Natural => {
            let parts = h
                .partition()
                .ok_or_else(|| Error::Precondition("natural strategy needs a 3-partite graph".into()))?;
            if t % 3 != 0 {
                return Err(Error::Infeasible(format!("natural strategy needs t divisible by 3, got {t}")));
            }
            let s = t / 3;
            let mut classes = Vec::with_capacity(t);
            for p in parts {
                let mut p = p.clone();
                p.sort_unstable();
                let (q, r) = (p.len() / s, p.len() % s);
                let mut start = 0;
                for c in 0..s {
                    let len = q + usize::from(c < r);
                    classes.push(p[start..start + len].to_vec());
                    start += len;
                }
            }
            classes
        }
        Strategy::Given(_) => unreachable!("handled above"),
    };
    if classes.iter().any(Vec::is_empty) {
        return Err(Error::Infeasible("a class would be empty".into()));
    }
    sliced_decomposition(classes, l, seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construct::{build_canonical, Family, FamilySpec};
    use proptest::prelude::*;
    use super::Strategy;

    fn hbar(k: usize) -> ThreeGraph {
        build_canonical(&FamilySpec::new(Family::Hbar, k), 1 << 16).unwrap().three().unwrap()
    }

    #[test]
    fn natural_uses_the_three_parts() {
        let h = hbar(4);
        let d = build_decomposition(&h, 3, 2, &Strategy::Natural, 1).unwrap();
        assert_eq!(d.classes(), &h.partition().unwrap()[..]);
        assert!(build_decomposition(&h, 4, 2, &Strategy::Natural, 1).is_err());
    }

    #[test]
    fn infeasible_parameters() {
        let h = ThreeGraph::empty(5);
        assert!(matches!(build_decomposition(&h, 6, 1, &Strategy::Random, 0), Err(Error::Infeasible(_))));
        assert!(build_decomposition(&h, 2, 0, &Strategy::Random, 0).is_err());
    }

    fn check_invariants(d: &Decomposition, n: usize) {
        let mut seen = vec![false; n];
        for c in d.classes() {
            for &v in c {
                assert!(!seen[v]);
                seen[v] = true;
            }
        }
        assert!(seen.iter().all(|&b| b));
        for i in 0..d.t() {
            for j in i + 1..d.t() {
                let total: usize = (0..d.l()).map(|a| d.part_size(i, j, a)).sum();
                assert_eq!(total, d.classes()[i].len() * d.classes()[j].len());
            }
        }
    }

    #[test]
    fn colour_lookup_is_symmetric() {
        let d = build_decomposition(&ThreeGraph::empty(9), 3, 2, &Strategy::Random, 4).unwrap();
        for x in 0..9 {
            for y in 0..9 {
                assert_eq!(d.colour(x, y), d.colour(y, x));
                assert_eq!(d.colour(x, y).is_none(), d.class_of(x) == d.class_of(y));
            }
        }
    }

    #[test]
    fn bad_json_is_rejected() {
        let d = build_decomposition(&ThreeGraph::empty(6), 2, 2, &Strategy::Random, 4).unwrap();
        let text = d.to_json();
        let missing = text.replace("\"0,1\"", "\"0,2\"");
        assert!(Decomposition::from_json(&missing).is_err());
        assert!(Decomposition::from_json("{").is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(40))]
        #[test]
        fn random_invariants_and_round_trip(n in 4usize..20, t in 1usize..5, l in 1usize..4, seed in any::<u64>()) {
            prop_assume!(t <= n);
            let mut d = build_decomposition(&ThreeGraph::empty(n), t, l, &Strategy::Random, seed).unwrap();
            check_invariants(&d, n);
            d.eps1 = Some(crate::num::q(1, 10));
            let back = Decomposition::from_json(&d.to_json()).unwrap();
            prop_assert_eq!(back, d);
        }
    }
}
