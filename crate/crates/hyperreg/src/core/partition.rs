use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Assignment of each vertex to one of `t` classes.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VertexPartition {
    t: usize,
    assignment: Vec<usize>,
    equipartition: bool,
}

impl VertexPartition {
    pub fn new(t: usize, assignment: Vec<usize>) -> Result<Self> {
        if let Some(&bad) = assignment.iter().find(|&&c| c >= t) {
            return Err(Error::OutOfRange { index: bad, n: t });
        }
        Ok(VertexPartition { t, assignment, equipartition: false })
    }

    /// Same as `new`, but class sizes must differ by at most one.
    pub fn equipartition(t: usize, assignment: Vec<usize>) -> Result<Self> {
        let mut p = Self::new(t, assignment)?;
        let sizes = p.sizes();
        let (lo, hi) = (sizes.iter().min().copied(), sizes.iter().max().copied());
        if let (Some(lo), Some(hi)) = (lo, hi) {
            if hi - lo > 1 {
                return Err(Error::NotEquipartition(sizes));
            }
        }
        p.equipartition = true;
        Ok(p)
    }

    pub fn from_classes(n: usize, classes: &[Vec<usize>]) -> Result<Self> {
        let mut a = vec![usize::MAX; n];
        for (c, class) in classes.iter().enumerate() {
            for &v in class {
                if v >= n {
                    return Err(Error::OutOfRange { index: v, n });
                }
                if a[v] != usize::MAX {
                    return Err(Error::OverlappingParts(v));
                }
                a[v] = c;
            }
        }
        if let Some(v) = a.iter().position(|&c| c == usize::MAX) {
            return Err(Error::Precondition(format!("vertex {v} is in no class")));
        }
        Self::new(classes.len(), a)
    }

    /// Uniformly random equipartition of `0..n` into `t` classes.
    pub fn random_equipartition<R: rand::Rng>(n: usize, t: usize, rng: &mut R) -> Result<Self> {
        if t == 0 {
            return Err(Error::InvalidParameter("t must be positive".into()));
        }
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(rng);
        let mut a = vec![0; n];
        for (pos, &v) in order.iter().enumerate() {
            a[v] = pos % t;
        }
        Self::equipartition(t, a)
    }

    pub fn t(&self) -> usize {
        self.t
    }

    pub fn n(&self) -> usize {
        self.assignment.len()
    }

    pub fn class_of(&self, v: usize) -> usize {
        self.assignment[v]
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    pub fn is_equipartition(&self) -> bool {
        self.equipartition
    }

    pub fn sizes(&self) -> Vec<usize> {
        let mut s = vec![0; self.t];
        for &c in &self.assignment {
            s[c] += 1;
        }
        s
    }

    /// Members of each class in increasing order.
    pub fn classes(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.t];
        for (v, &c) in self.assignment.iter().enumerate() {
            out[c].push(v);
        }
        out
    }
}
