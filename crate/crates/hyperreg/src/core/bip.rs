use fixedbitset::FixedBitSet;

use crate::error::{Error, Result};

/// A bipartite graph with left vertices `0..left` and right vertices `0..right`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BipartiteGraph {
    left: usize,
    right: usize,
    rows: Vec<FixedBitSet>,
    cols: Vec<FixedBitSet>,
    edge_count: usize,
}

impl BipartiteGraph {
    pub fn empty(left: usize, right: usize) -> Self {
        BipartiteGraph {
            left,
            right,
            rows: vec![FixedBitSet::with_capacity(right); left],
            cols: vec![FixedBitSet::with_capacity(left); right],
            edge_count: 0,
        }
    }

    /// Build from an edge list; duplicate pairs are rejected.
    pub fn new<I>(left: usize, right: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut g = Self::empty(left, right);
        for (u, w) in edges {
            if u >= left {
                return Err(Error::OutOfRange { index: u, n: left });
            }
            if w >= right {
                return Err(Error::OutOfRange { index: w, n: right });
            }
            if g.rows[u].contains(w) {
                return Err(Error::DuplicatePair(u, w));
            }
            g.insert_unchecked(u, w);
        }
        Ok(g)
    }

    pub fn from_fn<F>(left: usize, right: usize, mut f: F) -> Self
    where
        F: FnMut(usize, usize) -> bool,
    {
        let mut g = Self::empty(left, right);
        for u in 0..left {
            for w in 0..right {
                if f(u, w) {
                    g.insert_unchecked(u, w);
                }
            }
        }
        g
    }

    pub fn complete(left: usize, right: usize) -> Self {
        Self::from_fn(left, right, |_, _| true)
    }

    fn insert_unchecked(&mut self, u: usize, w: usize) {
        self.rows[u].insert(w);
        self.cols[w].insert(u);
        self.edge_count += 1;
    }

    pub fn left(&self) -> usize {
        self.left
    }

    pub fn right(&self) -> usize {
        self.right
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn has(&self, u: usize, w: usize) -> bool {
        u < self.left && w < self.right && self.rows[u].contains(w)
    }

    /// Right neighbours of left vertex `u`.
    pub fn row(&self, u: usize) -> &FixedBitSet {
        &self.rows[u]
    }

    /// Left neighbours of right vertex `w`.
    pub fn col(&self, w: usize) -> &FixedBitSet {
        &self.cols[w]
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.rows.iter().enumerate().flat_map(|(u, r)| r.ones().map(move |w| (u, w)))
    }

    /// Swap the two sides.
    pub fn transpose(&self) -> BipartiteGraph {
        BipartiteGraph {
            left: self.right,
            right: self.left,
            rows: self.cols.clone(),
            cols: self.rows.clone(),
            edge_count: self.edge_count,
        }
    }

    /// Induced subgraph on the given left and right index lists, re-indexed in list order.
    pub fn restrict(&self, ls: &[usize], rs: &[usize]) -> BipartiteGraph {
        Self::from_fn(ls.len(), rs.len(), |i, j| self.has(ls[i], rs[j]))
    }

    /// Graph with the complementary edge set inside K2[left,right].
    pub fn complement(&self) -> BipartiteGraph {
        Self::from_fn(self.left, self.right, |u, w| !self.has(u, w))
    }

    /// Number of edges between a left subset and a right subset.
    pub fn count_between(&self, ls: &FixedBitSet, rs: &FixedBitSet) -> usize {
        ls.ones().map(|u| self.rows[u].intersection(rs).count()).sum()
    }
}

/// A simple graph on `0..n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimpleGraph {
    n: usize,
    edges: Vec<(usize, usize)>,
}

impl SimpleGraph {
    pub fn new<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut out = Vec::new();
        for (a, b) in edges {
            if a >= n || b >= n {
                return Err(Error::OutOfRange { index: a.max(b), n });
            }
            if a == b {
                return Err(Error::InvalidParameter(format!("loop at {a}")));
            }
            out.push((a.min(b), a.max(b)));
        }
        out.sort_unstable();
        out.dedup();
        Ok(SimpleGraph { n, edges: out })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn has(&self, a: usize, b: usize) -> bool {
        self.edges.binary_search(&(a.min(b), a.max(b))).is_ok()
    }
}
