//! Bipartite discrepancy.
//!
//! For fixed U' the best W' is read off column by column: the positive branch
//! keeps every column with positive marginal, the negative branch every column
//! with negative marginal. So the exact maximum needs only the 2^|U| subsets of
//! the smaller side.

use rand::Rng;
use rayon::prelude::*;

use crate::core::BipartiteGraph;
use crate::error::{Error, Result};
use crate::num::{q, Q};
use crate::quasi::report::{DeviationReport, Witness};

pub const DEFAULT_DISC2_CAP: usize = 22;

#[derive(Clone, Debug)]
pub struct Disc2Options {
    /// Reference density; the edge density when absent.
    pub density: Option<Q>,
    /// Largest smaller side allowed for exhaustive search.
    pub cap: usize,
    /// Restrict to |U'| >= f|U| and |W'| >= f|W| (the epsilon-regular variant).
    pub min_fraction: Option<Q>,
    /// Fall back to this many random subsets (with the given seed) when over the cap.
    pub sampling: Option<(usize, u64)>,
}

impl Default for Disc2Options {
    fn default() -> Self {
        Disc2Options { density: None, cap: DEFAULT_DISC2_CAP, min_fraction: None, sampling: None }
    }
}

impl Disc2Options {
    pub fn at(density: Q) -> Self {
        Disc2Options { density: Some(density), ..Default::default() }
    }
}

pub fn edge_density(g: &BipartiteGraph) -> Q {
    let total = g.left() * g.right();
    if total == 0 {
        q(0, 1)
    } else {
        q(g.edge_count() as i128, total as i128)
    }
}

fn min_size(frac: &Option<Q>, total: usize) -> usize {
    match frac {
        None => 0,
        Some(f) => crate::num::ceil(&(*f * Q::from_integer(total as i128))).max(0) as usize,
    }
}

/// Best completion for fixed row subset: (|gap| scaled by den, positive branch?, chosen columns).
struct Best {
    value: i128,
    mask: u64,
    positive: bool,
}

fn better(a: &Best, b: &Best) -> bool {
    a.value > b.value || (a.value == b.value && a.mask < b.mask)
}

/// Evaluate both branches for a row subset of size `s` with column counts `c`.
fn complete(c: &[i64], s: usize, num: i128, den: i128, min_cols: usize) -> (i128, bool) {
    let base = num * s as i128;
    if min_cols == 0 {
        let mut pos = 0i128;
        let mut neg = 0i128;
        for &cw in c {
            let m = cw as i128 * den - base;
            if m > 0 {
                pos += m;
            } else {
                neg += m;
            }
        }
        if pos >= -neg {
            (pos, true)
        } else {
            (-neg, false)
        }
    } else {
        if c.len() < min_cols {
            return (-1, true);
        }
        let mut m: Vec<i128> = c.iter().map(|&cw| cw as i128 * den - base).collect();
        m.sort_unstable_by(|a, b| b.cmp(a));
        let take = |v: &[i128]| -> i128 {
            let mut s = 0;
            for (i, &x) in v.iter().enumerate() {
                if i < min_cols || x > 0 {
                    s += x;
                } else {
                    break;
                }
            }
            s
        };
        let pos = take(&m);
        let rev: Vec<i128> = m.iter().rev().map(|x| -x).collect();
        let neg = take(&rev);
        if pos >= neg {
            (pos, true)
        } else {
            (neg, false)
        }
    }
}

fn columns_for(c: &[i64], s: usize, num: i128, den: i128, min_cols: usize, positive: bool) -> Vec<usize> {
    let base = num * s as i128;
    let sign = if positive { 1 } else { -1 };
    let mut m: Vec<(i128, usize)> =
        c.iter().enumerate().map(|(w, &cw)| (sign * (cw as i128 * den - base), w)).collect();
    m.sort_unstable_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
    let mut out: Vec<usize> = m
        .iter()
        .enumerate()
        .take_while(|(i, (x, _))| *i < min_cols || *x > 0)
        .map(|(_, &(_, w))| w)
        .collect();
    out.sort_unstable();
    out
}

/// Exact or sampled disc2 deviation of `g`.
pub fn disc2_deviation(g: &BipartiteGraph, opts: &Disc2Options) -> Result<DeviationReport> {
    let d = opts.density.unwrap_or_else(|| edge_density(g));
    let (num, den) = (*d.numer(), *d.denom());
    let transposed = g.left() > g.right();
    let h = if transposed { g.transpose() } else { g.clone() };
    let (m, n) = (h.left(), h.right());
    let min_rows = min_size(&opts.min_fraction, m);
    let min_cols = min_size(&opts.min_fraction, n);
    let norm = den * (m * n).max(1) as i128;

    let (best, exact) = if m <= opts.cap && m <= 62 {
        (exhaustive(&h, num, den, min_rows, min_cols), true)
    } else if let Some((samples, seed)) = opts.sampling {
        (sampled(&h, num, den, min_rows, min_cols, samples, seed), false)
    } else {
        return Err(Error::CapExceeded { what: "disc2 smaller side".into(), needed: m, cap: opts.cap });
    };

    let rows: Vec<usize> = (0..m).filter(|&i| best.mask >> i & 1 == 1).collect();
    let mut c = vec![0i64; n];
    for &u in &rows {
        for w in h.row(u).ones() {
            c[w] += 1;
        }
    }
    let cols = if best.value < 0 {
        Vec::new()
    } else {
        columns_for(&c, rows.len(), num, den, min_cols, best.positive)
    };
    let value = best.value.max(0);
    let (left, right) = if transposed { (cols, rows) } else { (rows, cols) };
    Ok(DeviationReport {
        deviation: q(value, norm),
        density_used: d,
        witness: Witness::Pair { left, right },
        exact,
    })
}

fn exhaustive(h: &BipartiteGraph, num: i128, den: i128, min_rows: usize, min_cols: usize) -> Best {
    let (m, n) = (h.left(), h.right());
    let rows: Vec<Vec<usize>> = (0..m).map(|u| h.row(u).ones().collect()).collect();
    let low_bits = m.min(16);
    let high = m - low_bits;
    let chunks: Vec<u64> = (0..(1u64 << high)).collect();
    let results: Vec<Best> = chunks
        .par_iter()
        .map(|&hi| {
            let base_mask = hi << low_bits;
            let mut c = vec![0i64; n];
            let mut size = 0usize;
            for u in low_bits..m {
                if base_mask >> u & 1 == 1 {
                    size += 1;
                    for &w in &rows[u] {
                        c[w] += 1;
                    }
                }
            }
            let mut mask = base_mask;
            let mut best = Best { value: -1, mask: 0, positive: true };
            let eval = |mask: u64, size: usize, c: &[i64], best: &mut Best| {
                if size < min_rows {
                    return;
                }
                let (v, positive) = complete(c, size, num, den, min_cols);
                let cand = Best { value: v, mask, positive };
                if better(&cand, best) {
                    *best = cand;
                }
            };
            eval(mask, size, &c, &mut best);
            for i in 1u64..(1u64 << low_bits) {
                let bit = i.trailing_zeros() as usize;
                mask ^= 1 << bit;
                if mask >> bit & 1 == 1 {
                    size += 1;
                    for &w in &rows[bit] {
                        c[w] += 1;
                    }
                } else {
                    size -= 1;
                    for &w in &rows[bit] {
                        c[w] -= 1;
                    }
                }
                eval(mask, size, &c, &mut best);
            }
            best
        })
        .collect();
    results
        .into_iter()
        .reduce(|a, b| if better(&b, &a) { b } else { a })
        .unwrap_or(Best { value: 0, mask: 0, positive: true })
}

fn sampled(
    h: &BipartiteGraph,
    num: i128,
    den: i128,
    min_rows: usize,
    min_cols: usize,
    samples: usize,
    seed: u64,
) -> Best {
    let (m, n) = (h.left(), h.right());
    let mut rng = crate::num::stream(seed, "disc2-sample");
    let mut best = Best { value: -1, mask: 0, positive: true };
    for _ in 0..samples.max(1) {
        let mut mask = 0u64;
        for u in 0..m.min(64) {
            if rng.gen_bool(0.5) {
                mask |= 1 << u;
            }
        }
        let size = mask.count_ones() as usize;
        if size < min_rows {
            continue;
        }
        let mut c = vec![0i64; n];
        for u in 0..m.min(64) {
            if mask >> u & 1 == 1 {
                for w in h.row(u).ones() {
                    c[w] += 1;
                }
            }
        }
        let (v, positive) = complete(&c, size, num, den, min_cols);
        let cand = Best { value: v, mask, positive };
        if better(&cand, &best) {
            best = cand;
        }
    }
    best
}

/// Full enumeration of both sides; the independent oracle for [`disc2_deviation`].
pub fn disc2_bruteforce(g: &BipartiteGraph, d: Q) -> Q {
    let (m, n) = (g.left(), g.right());
    assert!(m <= 16 && n <= 16, "brute force limited to 16x16");
    let (num, den) = (*d.numer(), *d.denom());
    let mut best = 0i128;
    for wmask in 0u32..(1 << n) {
        let wsize = wmask.count_ones() as i128;
        let cnt: Vec<i128> = (0..m)
            .map(|u| (0..n).filter(|&w| wmask >> w & 1 == 1 && g.has(u, w)).count() as i128)
            .collect();
        let mut sums = vec![0i128; 1 << m];
        let mut sizes = vec![0i128; 1 << m];
        for umask in 1usize..(1 << m) {
            let low = umask.trailing_zeros() as usize;
            let prev = umask & (umask - 1);
            sums[umask] = sums[prev] + cnt[low];
            sizes[umask] = sizes[prev] + 1;
        }
        for umask in 0..(1usize << m) {
            let gap = (sums[umask] * den - num * sizes[umask] * wsize).abs();
            best = best.max(gap);
        }
    }
    q(best, den * (m * n).max(1) as i128)
}

/// Number of ordered quadruples (u0,u1,v0,v1), repeats allowed, spanning four edges.
pub fn cycle2_count(g: &BipartiteGraph) -> u128 {
    let h = if g.left() > g.right() { g.transpose() } else { g.clone() };
    // sum over ordered pairs of left vertices of codegree squared
    let mut total = 0u128;
    for a in 0..h.left() {
        for b in 0..h.left() {
            let c = h.row(a).intersection(h.row(b)).count() as u128;
            total += c * c;
        }
    }
    total
}

/// The normalized quadruple sum of products of g(u,v) = 1-d or -d.
pub fn dev2_sum(g: &BipartiteGraph, d2: Q) -> Q {
    let (num, den) = (*d2.numer(), *d2.denom());
    let h = if g.left() > g.right() { g.transpose() } else { g.clone() };
    let (m, n) = (h.left(), h.right());
    let gv = |u: usize, w: usize| if h.has(u, w) { den - num } else { -num };
    let mut total = 0i128;
    for a in 0..m {
        for b in 0..m {
            let s: i128 = (0..n).map(|w| gv(a, w) * gv(b, w)).sum();
            total += s * s;
        }
    }
    let den4 = den.pow(4);
    q(total, den4 * ((m * m * n * n).max(1)) as i128)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::qi;

    fn half(k: usize) -> BipartiteGraph {
        BipartiteGraph::from_fn(k, k, |i, j| i <= j)
    }

    #[test]
    fn complete_is_zero() {
        let r = disc2_deviation(&BipartiteGraph::complete(2, 2), &Disc2Options::at(qi(1))).unwrap();
        assert_eq!(r.deviation, qi(0));
        assert!(r.exact);
    }

    #[test]
    fn half_graph_two() {
        let r = disc2_deviation(&half(2), &Disc2Options::at(q(3, 4))).unwrap();
        assert_eq!(r.deviation, q(3, 16));
        assert_eq!(r.witness, Witness::Pair { left: vec![1], right: vec![0] });
        assert_eq!(disc2_bruteforce(&half(2), q(3, 4)), q(3, 16));
    }

    #[test]
    fn empty_is_zero() {
        let r = disc2_deviation(&BipartiteGraph::empty(3, 4), &Disc2Options::at(qi(0))).unwrap();
        assert_eq!(r.deviation, qi(0));
    }

    #[test]
    fn cap_and_sampling() {
        let g = BipartiteGraph::complete(5, 5);
        let opts = Disc2Options { cap: 3, ..Default::default() };
        assert!(matches!(disc2_deviation(&g, &opts), Err(Error::CapExceeded { .. })));
        let opts = Disc2Options { cap: 3, sampling: Some((10, 1)), ..Default::default() };
        let r = disc2_deviation(&g, &opts).unwrap();
        assert!(!r.exact);
    }

    #[test]
    fn regular_variant_restricts_sizes() {
        // only the full sets are allowed at fraction 1
        let g = half(3);
        let opts = Disc2Options { min_fraction: Some(qi(1)), ..Default::default() };
        let r = disc2_deviation(&g, &opts).unwrap();
        assert_eq!(r.deviation, qi(0));
    }

    #[test]
    fn cycle_counts() {
        assert_eq!(cycle2_count(&BipartiteGraph::complete(2, 2)), 16);
        assert_eq!(cycle2_count(&BipartiteGraph::empty(2, 2)), 0);
        assert_eq!(cycle2_count(&BipartiteGraph::new(2, 2, [(0, 0)]).unwrap()), 1);
    }

    #[test]
    fn dev2_examples() {
        assert_eq!(dev2_sum(&BipartiteGraph::complete(3, 2), qi(1)), qi(0));
        assert_eq!(dev2_sum(&BipartiteGraph::empty(3, 2), qi(0)), qi(0));
        let g = BipartiteGraph::new(2, 2, [(0, 0)]).unwrap();
        let d = q(1, 4);
        let gv = |u: usize, w: usize| if g.has(u, w) { qi(1) - d } else { -d };
        let mut brute = qi(0);
        for u0 in 0..2 {
            for u1 in 0..2 {
                for v0 in 0..2 {
                    for v1 in 0..2 {
                        brute += gv(u0, v0) * gv(u0, v1) * gv(u1, v0) * gv(u1, v1);
                    }
                }
            }
        }
        assert_eq!(dev2_sum(&g, d), brute / qi(16));
    }
}
