//! Vertex discrepancy of 3-partite 3-graphs.
//!
//! Subsets of the two smaller parts are enumerated (outer and inner Gray
//! codes); the largest part is completed column by column as in disc2.

use rand::Rng;
use rayon::prelude::*;

use crate::core::{PartitionedView, ThreeGraph, TripartiteOracle};
use crate::error::{Error, Result};
use crate::num::{q, Q};
use crate::quasi::report::{DeviationReport, Witness};

pub const DEFAULT_VDISC3_CAP: usize = 26;

#[derive(Clone, Debug)]
pub struct Vdisc3Options {
    pub density: Option<Q>,
    /// Largest allowed sum of the two smaller part sizes.
    pub cap: usize,
    pub sampling: Option<(usize, u64)>,
}

impl Default for Vdisc3Options {
    fn default() -> Self {
        Vdisc3Options { density: None, cap: DEFAULT_VDISC3_CAP, sampling: None }
    }
}

impl Vdisc3Options {
    pub fn at(density: Q) -> Self {
        Vdisc3Options { density: Some(density), ..Default::default() }
    }
}

pub fn oracle_edge_count<O: TripartiteOracle + ?Sized>(o: &O) -> usize {
    let [a, b, c] = o.part_sizes();
    (0..a)
        .into_par_iter()
        .map(|x| (0..b).map(|y| (0..c).filter(|&z| o.has(x, y, z)).count()).sum::<usize>())
        .sum()
}

#[derive(Clone, Copy)]
struct Best {
    value: i128,
    key: (u64, u64),
    positive: bool,
}

fn better(a: &Best, b: &Best) -> bool {
    a.value > b.value || (a.value == b.value && a.key < b.key)
}

fn complete(c: &[i64], base: i128, den: i128) -> (i128, bool) {
    let mut pos = 0i128;
    let mut neg = 0i128;
    for &cz in c {
        let m = cz as i128 * den - base;
        if m > 0 {
            pos += m;
        } else {
            neg -= m;
        }
    }
    if pos >= neg {
        (pos, true)
    } else {
        (neg, false)
    }
}

/// Exact (or sampled) vdisc3 deviation. Witness sets are local indices per part.
pub fn vdisc3_deviation<O: TripartiteOracle + ?Sized>(o: &O, opts: &Vdisc3Options) -> Result<DeviationReport> {
    let sizes = o.part_sizes();
    let total = sizes[0] * sizes[1] * sizes[2];
    let d = match opts.density {
        Some(d) => d,
        None if total == 0 => q(0, 1),
        None => q(oracle_edge_count(o) as i128, total as i128),
    };
    let (num, den) = (*d.numer(), *d.denom());
    // order[0], order[1] enumerated; order[2] completed
    let mut order = [0usize, 1, 2];
    order.sort_by_key(|&i| (sizes[i], i));
    let [p, r, s] = [sizes[order[0]], sizes[order[1]], sizes[order[2]]];
    let has = |x: usize, y: usize, z: usize| {
        let mut idx = [0usize; 3];
        idx[order[0]] = x;
        idx[order[1]] = y;
        idx[order[2]] = z;
        o.has(idx[0], idx[1], idx[2])
    };
    // adj[x][y] = list of z
    let adj: Vec<Vec<Vec<u32>>> = (0..p)
        .into_par_iter()
        .map(|x| (0..r).map(|y| (0..s).filter(|&z| has(x, y, z)).map(|z| z as u32).collect()).collect())
        .collect();

    let (best, exact) = if p + r <= opts.cap && p <= 62 && r <= 62 {
        (exhaustive(&adj, p, r, s, num, den), true)
    } else if let Some((samples, seed)) = opts.sampling {
        (sampled(&adj, p, r, s, num, den, samples, seed), false)
    } else {
        return Err(Error::CapExceeded { what: "vdisc3 two smaller parts".into(), needed: p + r, cap: opts.cap });
    };

    let s1: Vec<usize> = (0..p).filter(|&i| best.key.0 >> i & 1 == 1).collect();
    let s2: Vec<usize> = (0..r).filter(|&i| best.key.1 >> i & 1 == 1).collect();
    let mut c = vec![0i64; s];
    for &x in &s1 {
        for &y in &s2 {
            for &z in &adj[x][y] {
                c[z as usize] += 1;
            }
        }
    }
    let base = num * (s1.len() * s2.len()) as i128;
    let s3: Vec<usize> = (0..s)
        .filter(|&z| {
            let m = c[z] as i128 * den - base;
            if best.positive {
                m > 0
            } else {
                m < 0
            }
        })
        .collect();
    let mut parts: [Vec<usize>; 3] = Default::default();
    parts[order[0]] = s1;
    parts[order[1]] = s2;
    parts[order[2]] = s3;
    Ok(DeviationReport {
        deviation: q(best.value.max(0), den * total.max(1) as i128),
        density_used: d,
        witness: Witness::Triple { parts },
        exact,
    })
}

fn exhaustive(adj: &[Vec<Vec<u32>>], p: usize, r: usize, s: usize, num: i128, den: i128) -> Best {
    let low = p.min(12);
    let chunks: Vec<u64> = (0..(1u64 << (p - low))).collect();
    let results: Vec<Best> = chunks
        .par_iter()
        .map(|&hi| {
            let mut m1 = hi << low;
            // w[y][z] = |{x in S1: xyz edge}|
            let mut w = vec![vec![0i64; s]; r];
            let mut size1 = 0usize;
            let add = |w: &mut Vec<Vec<i64>>, x: usize, sign: i64| {
                for (y, zs) in adj[x].iter().enumerate() {
                    for &z in zs {
                        w[y][z as usize] += sign;
                    }
                }
            };
            for x in low..p {
                if m1 >> x & 1 == 1 {
                    size1 += 1;
                    add(&mut w, x, 1);
                }
            }
            let mut best = Best { value: -1, key: (0, 0), positive: true };
            let mut c = vec![0i64; s];
            for i in 0u64..(1u64 << low) {
                if i > 0 {
                    let bit = i.trailing_zeros() as usize;
                    m1 ^= 1 << bit;
                    if m1 >> bit & 1 == 1 {
                        size1 += 1;
                        add(&mut w, bit, 1);
                    } else {
                        size1 -= 1;
                        add(&mut w, bit, -1);
                    }
                }
                c.iter_mut().for_each(|v| *v = 0);
                let mut m2 = 0u64;
                let mut size2 = 0usize;
                for j in 0u64..(1u64 << r) {
                    if j > 0 {
                        let bit = j.trailing_zeros() as usize;
                        m2 ^= 1 << bit;
                        let sign = if m2 >> bit & 1 == 1 {
                            size2 += 1;
                            1
                        } else {
                            size2 -= 1;
                            -1
                        };
                        for (cz, wz) in c.iter_mut().zip(&w[bit]) {
                            *cz += sign * wz;
                        }
                    }
                    let (v, positive) = complete(&c, num * (size1 * size2) as i128, den);
                    let cand = Best { value: v, key: (m1, m2), positive };
                    if better(&cand, &best) {
                        best = cand;
                    }
                }
            }
            best
        })
        .collect();
    results.into_iter().reduce(|a, b| if better(&b, &a) { b } else { a }).expect("at least one chunk")
}

#[allow(clippy::too_many_arguments)]
fn sampled(adj: &[Vec<Vec<u32>>], p: usize, r: usize, s: usize, num: i128, den: i128, samples: usize, seed: u64) -> Best {
    let mut rng = crate::num::stream(seed, "vdisc3-sample");
    let mut best = Best { value: -1, key: (0, 0), positive: true };
    for _ in 0..samples.max(1) {
        let s1: Vec<usize> = (0..p.min(64)).filter(|_| rng.gen_bool(0.5)).collect();
        let s2: Vec<usize> = (0..r.min(64)).filter(|_| rng.gen_bool(0.5)).collect();
        let mut c = vec![0i64; s];
        for &x in &s1 {
            for &y in &s2 {
                for &z in &adj[x][y] {
                    c[z as usize] += 1;
                }
            }
        }
        let (v, positive) = complete(&c, num * (s1.len() * s2.len()) as i128, den);
        let key = (s1.iter().map(|&i| 1u64 << i).sum(), s2.iter().map(|&i| 1u64 << i).sum());
        let cand = Best { value: v, key, positive };
        if better(&cand, &best) {
            best = cand;
        }
    }
    best
}

/// vdisc3 of a 3-graph carrying a 3-partition; witness sets are global labels.
pub fn vdisc3_graph(h: &ThreeGraph, opts: &Vdisc3Options) -> Result<DeviationReport> {
    let view = PartitionedView::new(h)?;
    let mut r = vdisc3_deviation(&view, opts)?;
    let parts = h.partition().expect("view checked");
    if let Witness::Triple { parts: w } = &mut r.witness {
        for (i, set) in w.iter_mut().enumerate() {
            for v in set.iter_mut() {
                *v = parts[i][*v];
            }
        }
    }
    Ok(r)
}

/// Enumeration of all three parts; the independent oracle for [`vdisc3_deviation`].
pub fn vdisc3_bruteforce<O: TripartiteOracle + ?Sized>(o: &O, d: Q) -> Q {
    let [a, b, c] = o.part_sizes();
    assert!(a + b + c <= 24, "brute force limited to 24 vertices");
    let (num, den) = (*d.numer(), *d.denom());
    let mut best = 0i128;
    for ma in 0u32..(1 << a) {
        for mb in 0u32..(1 << b) {
            for mc in 0u32..(1 << c) {
                let mut e = 0i128;
                for x in (0..a).filter(|x| ma >> x & 1 == 1) {
                    for y in (0..b).filter(|y| mb >> y & 1 == 1) {
                        for z in (0..c).filter(|z| mc >> z & 1 == 1) {
                            if o.has(x, y, z) {
                                e += 1;
                            }
                        }
                    }
                }
                let vol = (ma.count_ones() * mb.count_ones() * mc.count_ones()) as i128;
                best = best.max((e * den - num * vol).abs());
            }
        }
    }
    q(best, den * (a * b * c).max(1) as i128)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construct::HbarOracle;
    use crate::num::qi;
    use proptest::prelude::*;
    use rand::Rng;

    struct Table {
        sizes: [usize; 3],
        bits: Vec<bool>,
    }

    impl TripartiteOracle for Table {
        fn part_sizes(&self) -> [usize; 3] {
            self.sizes
        }
        fn has(&self, a: usize, b: usize, c: usize) -> bool {
            self.bits[(a * self.sizes[1] + b) * self.sizes[2] + c]
        }
    }

    #[test]
    fn complete_and_empty() {
        let full = Table { sizes: [2, 3, 2], bits: vec![true; 12] };
        assert_eq!(vdisc3_deviation(&full, &Vdisc3Options::at(qi(1))).unwrap().deviation, qi(0));
        let none = Table { sizes: [2, 3, 2], bits: vec![false; 12] };
        assert_eq!(vdisc3_deviation(&none, &Vdisc3Options::at(qi(0))).unwrap().deviation, qi(0));
    }

    #[test]
    fn hbar_two() {
        let r = vdisc3_deviation(&HbarOracle { k: 2 }, &Vdisc3Options::at(q(3, 4))).unwrap();
        assert_eq!(r.deviation, q(3, 16));
        assert_eq!(r.witness, Witness::Triple { parts: [vec![0, 1], vec![1], vec![0]] });
        assert!(r.exact);
    }

    #[test]
    fn cap_exceeded() {
        let t = Table { sizes: [3, 3, 3], bits: vec![false; 27] };
        let opts = Vdisc3Options { cap: 5, ..Default::default() };
        assert!(matches!(vdisc3_deviation(&t, &opts), Err(Error::CapExceeded { .. })));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(40))]
        #[test]
        fn matches_bruteforce(a in 1usize..4, b in 1usize..4, c in 1usize..5, seed in any::<u64>()) {
            let mut rng = crate::num::stream(seed, "t");
            let bits: Vec<bool> = (0..a * b * c).map(|_| rng.gen_bool(0.5)).collect();
            let t = Table { sizes: [a, b, c], bits };
            let r = vdisc3_deviation(&t, &Vdisc3Options::default()).unwrap();
            prop_assert_eq!(r.deviation, vdisc3_bruteforce(&t, r.density_used));
        }
    }
}
