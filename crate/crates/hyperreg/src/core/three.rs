use std::collections::{HashMap, HashSet};

use crate::error::{Error, Result};

pub type Triple = [u32; 3];

fn sort3(mut t: [usize; 3]) -> [usize; 3] {
    t.sort_unstable();
    t
}

/// A 3-uniform hypergraph on vertices `0..n` with an optional 3-partition.
#[derive(Clone, Debug)]
pub struct ThreeGraph {
    n: usize,
    edges: Vec<Triple>,
    lookup: HashSet<Triple>,
    partition: Option<[Vec<usize>; 3]>,
}

impl PartialEq for ThreeGraph {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.edges == other.edges && self.partition == other.partition
    }
}

impl Eq for ThreeGraph {}

impl ThreeGraph {
    /// Build from arbitrary vertex orderings; triples are stored sorted and deduplicated.
    pub fn new<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = [usize; 3]>,
    {
        let mut lookup = HashSet::new();
        for e in edges {
            let [a, b, c] = sort3(e);
            if c >= n {
                return Err(Error::OutOfRange { index: c, n });
            }
            if a == b || b == c {
                return Err(Error::DegenerateTriple(e[0], e[1], e[2]));
            }
            lookup.insert([a as u32, b as u32, c as u32]);
        }
        let mut edges: Vec<Triple> = lookup.iter().copied().collect();
        edges.sort_unstable();
        Ok(ThreeGraph { n, edges, lookup, partition: None })
    }

    pub fn empty(n: usize) -> Self {
        ThreeGraph { n, edges: Vec::new(), lookup: HashSet::new(), partition: None }
    }

    /// A 3-partite graph with parts `0..s0`, `s0..s0+s1`, `s0+s1..` and edges given by a predicate on local indices.
    pub fn tripartite_from_fn<F>(sizes: [usize; 3], mut f: F) -> Self
    where
        F: FnMut(usize, usize, usize) -> bool,
    {
        let off = [0, sizes[0], sizes[0] + sizes[1]];
        let n = sizes.iter().sum();
        let mut edges = Vec::new();
        for a in 0..sizes[0] {
            for b in 0..sizes[1] {
                for c in 0..sizes[2] {
                    if f(a, b, c) {
                        edges.push([a + off[0], b + off[1], c + off[2]]);
                    }
                }
            }
        }
        let parts = [
            (0..sizes[0]).collect(),
            (off[1]..off[1] + sizes[1]).collect(),
            (off[2]..n).collect(),
        ];
        ThreeGraph::new(n, edges)
            .and_then(|g| g.with_partition(parts))
            .expect("tripartite construction is valid by design")
    }

    /// Attach a 3-partition; every edge must meet each part at most once.
    pub fn with_partition(mut self, parts: [Vec<usize>; 3]) -> Result<Self> {
        let mut owner = vec![usize::MAX; self.n];
        for (p, part) in parts.iter().enumerate() {
            for &v in part {
                if v >= self.n {
                    return Err(Error::OutOfRange { index: v, n: self.n });
                }
                if owner[v] != usize::MAX {
                    return Err(Error::OverlappingParts(v));
                }
                owner[v] = p;
            }
        }
        for e in &self.edges {
            let mut seen = [0u8; 3];
            for &v in e {
                let o = owner[v as usize];
                if o != usize::MAX {
                    seen[o] += 1;
                    if seen[o] > 1 {
                        return Err(Error::PartitionViolation {
                            edge: [e[0] as usize, e[1] as usize, e[2] as usize],
                            part: o,
                        });
                    }
                }
            }
        }
        self.partition = Some(parts);
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> impl Iterator<Item = [usize; 3]> + '_ {
        self.edges.iter().map(|e| [e[0] as usize, e[1] as usize, e[2] as usize])
    }

    pub fn raw_edges(&self) -> &[Triple] {
        &self.edges
    }

    pub fn partition(&self) -> Option<&[Vec<usize>; 3]> {
        self.partition.as_ref()
    }

    /// Membership in any vertex order; degenerate triples are never edges.
    pub fn contains(&self, a: usize, b: usize, c: usize) -> bool {
        if a == b || b == c || a == c || a >= self.n || b >= self.n || c >= self.n {
            return false;
        }
        let [x, y, z] = sort3([a, b, c]);
        self.lookup.contains(&[x as u32, y as u32, z as u32])
    }

    pub fn degree(&self, v: usize) -> usize {
        self.edges.iter().filter(|e| e.contains(&(v as u32))).count()
    }

    /// Link of `v`: sorted pairs {x,y} with {v,x,y} an edge.
    pub fn link(&self, v: usize) -> Vec<(usize, usize)> {
        let v = v as u32;
        let mut out: Vec<(usize, usize)> = self
            .edges
            .iter()
            .filter(|e| e.contains(&v))
            .map(|e| {
                let rest: Vec<usize> = e.iter().filter(|&&x| x != v).map(|&x| x as usize).collect();
                (rest[0], rest[1])
            })
            .collect();
        out.sort_unstable();
        out
    }

    /// Neighbourhood of each pair that lies in some edge.
    pub fn pair_neighbourhoods(&self) -> HashMap<(usize, usize), Vec<usize>> {
        let mut m: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
        for e in self.edges() {
            let [a, b, c] = e;
            m.entry((a, b)).or_default().push(c);
            m.entry((a, c)).or_default().push(b);
            m.entry((b, c)).or_default().push(a);
        }
        for v in m.values_mut() {
            v.sort_unstable();
        }
        m
    }

    /// Part index of every vertex, `None` outside the declared parts.
    pub fn part_map(&self) -> Vec<Option<usize>> {
        let mut out = vec![None; self.n];
        if let Some(parts) = &self.partition {
            for (p, part) in parts.iter().enumerate() {
                for &v in part {
                    out[v] = Some(p);
                }
            }
        }
        out
    }

    /// Complement inside the complete 3-partite triple system of the attached partition,
    /// or inside all triples when no partition is attached.
    pub fn complement(&self) -> ThreeGraph {
        let mut edges = Vec::new();
        match &self.partition {
            Some([p0, p1, p2]) => {
                for &a in p0 {
                    for &b in p1 {
                        for &c in p2 {
                            if !self.contains(a, b, c) {
                                edges.push([a, b, c]);
                            }
                        }
                    }
                }
            }
            None => {
                for a in 0..self.n {
                    for b in a + 1..self.n {
                        for c in b + 1..self.n {
                            if !self.contains(a, b, c) {
                                edges.push([a, b, c]);
                            }
                        }
                    }
                }
            }
        }
        let g = ThreeGraph::new(self.n, edges).expect("complement of a valid graph is valid");
        match &self.partition {
            Some(p) => g.with_partition(p.clone()).expect("same partition"),
            None => g,
        }
    }

    /// Relabel vertices by `perm` (vertex v becomes perm[v]).
    pub fn relabel(&self, perm: &[usize]) -> Result<ThreeGraph> {
        if perm.len() != self.n {
            return Err(Error::Arity { expected: self.n, got: perm.len() });
        }
        let g = ThreeGraph::new(
            self.n,
            self.edges().map(|[a, b, c]| [perm[a], perm[b], perm[c]]),
        )?;
        match &self.partition {
            Some(parts) => {
                let np = [
                    parts[0].iter().map(|&v| perm[v]).collect(),
                    parts[1].iter().map(|&v| perm[v]).collect(),
                    parts[2].iter().map(|&v| perm[v]).collect(),
                ];
                g.with_partition(np)
            }
            None => Ok(g),
        }
    }
}

/// Edge predicate of a 3-partite graph over local part indices, for families
/// too large to materialize.
pub trait TripartiteOracle: Sync {
    fn part_sizes(&self) -> [usize; 3];
    fn has(&self, a: usize, b: usize, c: usize) -> bool;
}

/// A materialized 3-partite graph read through its attached partition.
pub struct PartitionedView<'a> {
    g: &'a ThreeGraph,
}

impl<'a> PartitionedView<'a> {
    pub fn new(g: &'a ThreeGraph) -> Result<Self> {
        if g.partition().is_none() {
            return Err(Error::Precondition("graph carries no 3-partition".into()));
        }
        Ok(PartitionedView { g })
    }
}

impl TripartiteOracle for PartitionedView<'_> {
    fn part_sizes(&self) -> [usize; 3] {
        let p = self.g.partition().expect("checked at construction");
        [p[0].len(), p[1].len(), p[2].len()]
    }

    fn has(&self, a: usize, b: usize, c: usize) -> bool {
        let p = self.g.partition().expect("checked at construction");
        self.g.contains(p[0][a], p[1][b], p[2][c])
    }
}

/// Materialize an oracle as a 3-partite graph with parts laid out consecutively.
pub fn materialize<O: TripartiteOracle + ?Sized>(o: &O) -> ThreeGraph {
    ThreeGraph::tripartite_from_fn(o.part_sizes(), |a, b, c| o.has(a, b, c))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_degenerate_and_out_of_range() {
        assert_eq!(ThreeGraph::new(3, [[0, 0, 1]]), Err(Error::DegenerateTriple(0, 0, 1)));
        assert_eq!(ThreeGraph::new(3, [[0, 1, 3]]), Err(Error::OutOfRange { index: 3, n: 3 }));
    }

    #[test]
    fn stores_sorted_and_answers_any_order() {
        let g = ThreeGraph::new(4, [[2, 0, 1], [1, 2, 0]]).unwrap();
        assert_eq!(g.edge_count(), 1);
        assert!(g.contains(1, 0, 2));
        assert!(!g.contains(0, 1, 3));
        assert!(!g.contains(0, 0, 1));
    }

    #[test]
    fn partition_must_be_transversal() {
        let g = ThreeGraph::new(4, [[0, 1, 2]]).unwrap();
        let err = g.clone().with_partition([vec![0, 1], vec![2], vec![3]]).unwrap_err();
        assert!(matches!(err, Error::PartitionViolation { part: 0, .. }));
        assert!(g.with_partition([vec![0], vec![1], vec![2, 3]]).is_ok());
    }

    #[test]
    fn link_and_complement() {
        let g = ThreeGraph::tripartite_from_fn([2, 2, 2], |a, b, c| a + b + c == 0);
        assert_eq!(g.link(0), vec![(2, 4)]);
        assert_eq!(g.complement().edge_count(), 7);
    }
}
