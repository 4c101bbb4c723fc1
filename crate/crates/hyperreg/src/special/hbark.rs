//! Irregularity witnesses in H-bar(n) for an arbitrary vertex partition.

use serde::Serialize;

use crate::construct::HbarOracle;
use crate::core::{TripartiteOracle, VertexPartition};
use crate::error::{Error, Result};
use crate::num::{self, q, Q};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum WitnessCase {
    /// w lies in the middle of both B_i and C_j.
    Midpoint,
    /// Best split found by scanning all class pairs and split points.
    PairScan,
    /// Split index given by the caller.
    Fixed,
}

/// Sets A_i, B_j1, B_j0, C_k1, C_k0 of H-bar(n), as local indices 0..n within
/// each part (vertex a_i is i, b_j is n + j, c_k is 2n + k in the partition).
#[derive(Clone, Debug, Serialize)]
pub struct IrregularityWitness {
    /// Classes (i, j, k) of A, B and C.
    pub classes: [usize; 3],
    pub split: usize,
    pub case: WitnessCase,
    pub a: Vec<usize>,
    pub b1: Vec<usize>,
    pub b0: Vec<usize>,
    pub c1: Vec<usize>,
    pub c0: Vec<usize>,
    pub min_size: usize,
    pub size_bound: f64,
    pub edges_ok: bool,
    pub non_edges_ok: bool,
}

impl IrregularityWitness {
    pub fn containments_ok(&self) -> bool {
        self.edges_ok && self.non_edges_ok
    }

    pub fn meets_bound(&self) -> bool {
        self.min_size as f64 >= self.size_bound
    }

    pub fn verified(&self) -> bool {
        self.containments_ok() && self.meets_bound()
    }
}

struct Classes {
    a: Vec<Vec<usize>>,
    b: Vec<Vec<usize>>,
    c: Vec<Vec<usize>>,
}

fn split_classes(n: usize, partition: &VertexPartition) -> Result<Classes> {
    if partition.n() != 3 * n {
        return Err(Error::Precondition(format!("partition covers {} vertices, H-bar({n}) has {}", partition.n(), 3 * n)));
    }
    let t = partition.t();
    let mut cl = Classes { a: vec![Vec::new(); t], b: vec![Vec::new(); t], c: vec![Vec::new(); t] };
    for v in 0..3 * n {
        let k = partition.class_of(v);
        match v / n {
            0 => cl.a[k].push(v),
            1 => cl.b[k].push(v - n),
            _ => cl.c[k].push(v - 2 * n),
        }
    }
    Ok(cl)
}

/// K3[A, B1, C1] inside E and K3[A, B0, C0] disjoint from E, checked triple by triple.
fn certify(n: usize, a: &[usize], b1: &[usize], b0: &[usize], c1: &[usize], c0: &[usize]) -> (bool, bool) {
    let o = HbarOracle { k: n };
    let all = |bs: &[usize], cs: &[usize], want: bool| {
        a.iter().all(|&x| bs.iter().all(|&y| cs.iter().all(|&z| o.has(x, y, z) == want)))
    };
    (all(b1, c1, true), all(b0, c0, false))
}

#[allow(clippy::too_many_arguments)]
fn build(n: usize, cl: &Classes, classes: [usize; 3], w: usize, case: WitnessCase, bound: f64) -> IrregularityWitness {
    let [i, j, k] = classes;
    let a = cl.a[i].clone();
    let b1: Vec<usize> = cl.b[j].iter().copied().filter(|&y| y <= w).collect();
    let b0: Vec<usize> = cl.b[j].iter().copied().filter(|&y| y > w).collect();
    let c1: Vec<usize> = cl.c[k].iter().copied().filter(|&z| z >= w).collect();
    let c0: Vec<usize> = cl.c[k].iter().copied().filter(|&z| z < w).collect();
    let (edges_ok, non_edges_ok) = certify(n, &a, &b1, &b0, &c1, &c0);
    let min_size = [a.len(), b1.len(), b0.len(), c1.len(), c0.len()].into_iter().min().expect("five sets");
    IrregularityWitness { classes, split: w, case, a, b1, b0, c1, c0, min_size, size_bound: bound, edges_ok, non_edges_ok }
}

fn eps_root(eps1: Q) -> f64 {
    num::to_f64(&eps1).powf(1.0 / 9.0)
}

fn check_pre(n: usize, partition: &VertexPartition, eps1: Q) -> Result<f64> {
    if eps1 > q(1, 1 << 18) || eps1 <= Q::from_integer(0) {
        return Err(Error::Precondition(format!("eps1 = {eps1} must lie in (0, 2^-18]")));
    }
    let t = partition.t();
    if t < 3 {
        return Err(Error::Precondition(format!("t = {t} must be at least 3")));
    }
    let bound = eps_root(eps1) * 3.0 * n as f64 / t as f64;
    if bound < 1.0 {
        return Err(Error::Precondition(format!("size bound eps1^(1/9) 3n/t = {bound:.3} is below 1")));
    }
    Ok(bound)
}

/// Witness with the split index w and the classes fixed by the caller.
pub fn hbark_witness_at(n: usize, partition: &VertexPartition, eps1: Q, classes: [usize; 3], w: usize) -> Result<IrregularityWitness> {
    let bound = check_pre(n, partition, eps1)?;
    let cl = split_classes(n, partition)?;
    if classes.iter().any(|&c| c >= partition.t()) || w >= n {
        return Err(Error::InvalidParameter(format!("classes {classes:?} or split {w} out of range")));
    }
    Ok(build(n, &cl, classes, w, WitnessCase::Fixed, bound))
}

/// Search for a witness following the midpoint case analysis, falling back to
/// a scan over all class pairs and split points.
pub fn hbark_irregular_witness(n: usize, partition: &VertexPartition, eps1: Q) -> Result<IrregularityWitness> {
    let bound = check_pre(n, partition, eps1)?;
    let cl = split_classes(n, partition)?;
    let t = partition.t();
    let mu = eps_root(eps1);
    let thr = mu * n as f64 / t as f64;
    let big = |v: &Vec<Vec<usize>>| -> Vec<usize> { (0..t).filter(|&i| v[i].len() as f64 >= thr).collect() };
    let (ba, bb, bc) = (big(&cl.a), big(&cl.b), big(&cl.c));

    // prefix[i][w] = |class_i cap [0, w)|
    let prefix = |v: &Vec<Vec<usize>>| -> Vec<Vec<usize>> {
        v.iter()
            .map(|cls| {
                let mut row = vec![0; n + 1];
                for &x in cls {
                    row[x + 1] += 1;
                }
                for w in 0..n {
                    row[w + 1] += row[w];
                }
                row
            })
            .collect()
    };
    let (pb, pc) = (prefix(&cl.b), prefix(&cl.c));
    let sizes_at = |j: usize, k: usize, w: usize| {
        let (bj, ck) = (cl.b[j].len(), cl.c[k].len());
        let b1 = pb[j][w + 1];
        let c0 = pc[k][w];
        [b1, bj - b1, ck - c0, c0]
    };
    let middle = |pre: &Vec<Vec<usize>>, i: usize, w: usize, size: usize| {
        let lo = pre[i][w + 1] as f64;
        let hi = (size - pre[i][w + 1]) as f64;
        lo >= mu * size as f64 && hi >= mu * size as f64
    };
    let best_a = |j: usize, k: usize, pool: &[usize]| pool.iter().copied().filter(|&i| i != j && i != k).max_by_key(|&i| (cl.a[i].len(), usize::MAX - i));

    let mut best: Option<(usize, [usize; 3], usize)> = None;
    fn consider(best: &mut Option<(usize, [usize; 3], usize)>, score: usize, classes: [usize; 3], w: usize) {
        if best.is_none_or(|b| score > b.0) {
            *best = Some((score, classes, w));
        }
    }
    for &j in &bb {
        for &k in &bc {
            if j == k {
                continue;
            }
            let Some(i) = best_a(j, k, &ba) else { continue };
            for w in 0..n {
                if cl.b[j].binary_search(&w).is_ok()
                    && cl.c[k].binary_search(&w).is_ok()
                    && middle(&pb, j, w, cl.b[j].len())
                    && middle(&pc, k, w, cl.c[k].len())
                {
                    let s = sizes_at(j, k, w).into_iter().min().expect("four").min(cl.a[i].len());
                    consider(&mut best, s, [i, j, k], w);
                }
            }
        }
    }
    let mut case = WitnessCase::Midpoint;
    if best.is_none_or(|b| b.0 as f64 + f64::EPSILON < bound) {
        let all: Vec<usize> = (0..t).collect();
        let before = best.map(|b| b.0);
        for j in 0..t {
            for k in 0..t {
                if j == k {
                    continue;
                }
                let Some(i) = best_a(j, k, &all) else { continue };
                for w in 0..n {
                    let s = sizes_at(j, k, w).into_iter().min().expect("four").min(cl.a[i].len());
                    consider(&mut best, s, [i, j, k], w);
                }
            }
        }
        if best.map(|b| b.0) != before {
            case = WitnessCase::PairScan;
        }
    }
    match best {
        Some((s, classes, w)) if s > 0 => Ok(build(n, &cl, classes, w, case, bound)),
        _ => Err(Error::Infeasible("no class triple and split index give five nonempty sets".into())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    fn natural(n: usize) -> VertexPartition {
        VertexPartition::new(3, (0..3 * n).map(|v| v / n).collect()).unwrap()
    }

    #[test]
    fn fixed_split_h9() {
        // split at b_4 / c_4 (1-based)
        let w = hbark_witness_at(9, &natural(9), q(1, 1 << 18), [0, 1, 2], 3).unwrap();
        assert_eq!(w.a, (0..9).collect::<Vec<_>>());
        assert_eq!(w.b1, vec![0, 1, 2, 3]);
        assert_eq!(w.b0, vec![4, 5, 6, 7, 8]);
        assert_eq!(w.c1, vec![3, 4, 5, 6, 7, 8]);
        assert_eq!(w.c0, vec![0, 1, 2]);
        assert!(w.containments_ok());
    }

    #[test]
    fn search_h9() {
        let w = hbark_irregular_witness(9, &natural(9), q(1, 1 << 18)).unwrap();
        assert_eq!(w.case, WitnessCase::Midpoint);
        assert_eq!(w.classes, [0, 1, 2]);
        assert_eq!(w.min_size, 4);
        assert!(w.containments_ok());
        assert!(w.meets_bound());
    }

    #[test]
    fn preconditions() {
        let two = VertexPartition::new(2, (0..27).map(|v| usize::from(v >= 14)).collect()).unwrap();
        assert!(matches!(hbark_irregular_witness(9, &two, q(1, 1 << 18)), Err(Error::Precondition(_))));
        assert!(matches!(hbark_irregular_witness(9, &natural(9), q(1, 100)), Err(Error::Precondition(_))));
        assert!(hbark_witness_at(9, &natural(9), q(1, 1 << 18), [0, 1, 5], 3).is_err());
    }

    #[test]
    fn random_partitions_certify() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for t in [3, 5, 8] {
            let p = VertexPartition::random_equipartition(150, t, &mut rng).unwrap();
            let w = hbark_irregular_witness(50, &p, q(1, 1 << 18)).unwrap();
            assert!(w.containments_ok(), "t={t}");
            assert!(w.min_size >= 1);
        }
    }
}
