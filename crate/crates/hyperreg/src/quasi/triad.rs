//! Measures of a 3-graph over an underlying 3-partite graph (a triad).

use rand::Rng;
use serde::Serialize;

use crate::core::{BipartiteGraph, ThreeGraph, TripartiteGraph};
use crate::error::{Error, Result};
use crate::num::{q, to_f64, Q};
use crate::quasi::report::{DeviationReport, Witness};

pub const DEFAULT_DISC23_EXACT_EDGES: usize = 24;

/// The 3-graph read on the local cube of a triad.
#[derive(Clone, Debug)]
pub struct Triad {
    pub g: TripartiteGraph,
    sizes: [usize; 3],
    cube: Vec<bool>,
}

impl Triad {
    /// Errors when a transversal edge of `h` is not a triangle of `g`.
    pub fn new(h: &ThreeGraph, g: &TripartiteGraph) -> Result<Self> {
        let sizes = g.sizes();
        let mut cube = vec![false; sizes[0] * sizes[1] * sizes[2]];
        for (a, &x) in g.parts[0].iter().enumerate() {
            for (b, &y) in g.parts[1].iter().enumerate() {
                for (c, &z) in g.parts[2].iter().enumerate() {
                    if h.contains(x, y, z) {
                        if !g.is_triangle(a, b, c) {
                            return Err(Error::Precondition(format!(
                                "edge {x} {y} {z} is not a triangle of the underlying graph"
                            )));
                        }
                        cube[(a * sizes[1] + b) * sizes[2] + c] = true;
                    }
                }
            }
        }
        Ok(Triad { g: g.clone(), sizes, cube })
    }

    /// Build from a local predicate; edges outside triangles are dropped.
    pub fn from_fn<F: FnMut(usize, usize, usize) -> bool>(g: &TripartiteGraph, mut f: F) -> Self {
        let sizes = g.sizes();
        let mut cube = vec![false; sizes[0] * sizes[1] * sizes[2]];
        for a in 0..sizes[0] {
            for b in 0..sizes[1] {
                for c in 0..sizes[2] {
                    cube[(a * sizes[1] + b) * sizes[2] + c] = g.is_triangle(a, b, c) && f(a, b, c);
                }
            }
        }
        Triad { g: g.clone(), sizes, cube }
    }

    pub fn sizes(&self) -> [usize; 3] {
        self.sizes
    }

    pub fn edge(&self, a: usize, b: usize, c: usize) -> bool {
        self.cube[(a * self.sizes[1] + b) * self.sizes[2] + c]
    }

    pub fn edge_count(&self) -> usize {
        self.cube.iter().filter(|&&b| b).count()
    }

    pub fn triangle_count(&self) -> usize {
        crate::core::triangle_triples(&self.g).len()
    }

    /// |E| / |triangles|, zero when there are no triangles.
    pub fn d3(&self) -> Q {
        let t = self.triangle_count();
        if t == 0 {
            q(0, 1)
        } else {
            q(self.edge_count() as i128, t as i128)
        }
    }

    /// The minimum of the three pair densities.
    pub fn d2(&self) -> Q {
        self.g.pair_densities().into_iter().min().expect("three pairs")
    }

    fn volume(&self) -> i128 {
        (self.sizes[0] * self.sizes[1] * self.sizes[2]) as i128
    }
}

/// A sum that is exact when it fits in i128 arithmetic.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Moment {
    #[serde(with = "crate::num::qopt")]
    pub exact: Option<Q>,
    pub approx: f64,
}

impl Moment {
    fn from_scaled(total: Option<i128>, approx_total: f64, scale: Option<i128>) -> Self {
        let exact = match (total, scale) {
            (Some(t), Some(s)) if s != 0 => Some(q(t, s)),
            _ => None,
        };
        let approx = match &exact {
            Some(x) => to_f64(x),
            None => approx_total,
        };
        Moment { exact, approx }
    }

    pub fn value(&self) -> f64 {
        self.approx
    }
}

/// Sum over (w0,w1) of ||M^T M||_F^2 with M[u][v] = f(u,v,w0) f(u,v,w1).
fn octahedral_sum<F: Fn(usize, usize, usize) -> i128>(sizes: [usize; 3], f: F) -> (Option<i128>, f64) {
    let [nu, nv, nw] = sizes;
    let mut exact: Option<i128> = Some(0);
    let mut approx = 0f64;
    for w0 in 0..nw {
        for w1 in 0..nw {
            let m: Vec<i128> = (0..nu * nv).map(|i| f(i / nv, i % nv, w0) * f(i / nv, i % nv, w1)).collect();
            for v0 in 0..nv {
                for v1 in 0..nv {
                    let mut s: Option<i128> = Some(0);
                    let mut sa = 0f64;
                    for u in 0..nu {
                        let p = m[u * nv + v0].checked_mul(m[u * nv + v1]);
                        s = s.zip(p).and_then(|(s, p)| s.checked_add(p));
                        sa += m[u * nv + v0] as f64 * m[u * nv + v1] as f64;
                    }
                    exact = exact.zip(s.and_then(|s| s.checked_mul(s))).and_then(|(e, x)| e.checked_add(x));
                    approx += sa * sa;
                }
            }
        }
    }
    (exact, approx)
}

/// The six-index dev23 sum and its normalization by d2^12 |V1|^2|V2|^2|V3|^2.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Dev23 {
    pub sum: Moment,
    /// None when d2 = 0.
    pub normalized: Option<Moment>,
    #[serde(with = "crate::num::qser")]
    pub d2: Q,
    #[serde(with = "crate::num::qser")]
    pub d3: Q,
}

pub fn dev23_sum(t: &Triad, d3: Option<Q>) -> Dev23 {
    let d3 = d3.unwrap_or_else(|| t.d3());
    let (num, den) = (*d3.numer(), *d3.denom());
    let f = |u: usize, v: usize, w: usize| {
        if !t.g.is_triangle(u, v, w) {
            0
        } else if t.edge(u, v, w) {
            den - num
        } else {
            -num
        }
    };
    let (exact, approx) = octahedral_sum(t.sizes, f);
    let den8 = den.checked_pow(8);
    let sum = Moment::from_scaled(exact, approx / (den as f64).powi(8), den8);
    let d2 = t.d2();
    let normalized = if d2 == q(0, 1) {
        None
    } else {
        let vol2 = t.volume().checked_mul(t.volume());
        let scale = d2.numer().checked_pow(12).zip(vol2).and_then(|(a, b)| a.checked_mul(b));
        let exact = sum.exact.zip(scale).and_then(|(s, sc)| {
            let dd = d2.denom().checked_pow(12)?;
            Some(q(s.numer().checked_mul(dd)?, s.denom().checked_mul(sc)?))
        });
        let approx = sum.approx / (to_f64(&d2).powi(12) * (t.volume() as f64).powi(2));
        Some(Moment { approx: exact.as_ref().map(to_f64).unwrap_or(approx), exact })
    };
    Dev23 { sum, normalized, d2, d3 }
}

/// Direct six-fold sum; the independent oracle for [`dev23_sum`].
pub fn dev23_bruteforce(t: &Triad, d3: Q) -> Q {
    let [a, b, c] = t.sizes;
    let f = |u: usize, v: usize, w: usize| {
        if !t.g.is_triangle(u, v, w) {
            q(0, 1)
        } else if t.edge(u, v, w) {
            q(1, 1) - d3
        } else {
            -d3
        }
    };
    let mut total = q(0, 1);
    for u0 in 0..a {
        for u1 in 0..a {
            for v0 in 0..b {
                for v1 in 0..b {
                    for w0 in 0..c {
                        for w1 in 0..c {
                            let mut p = q(1, 1);
                            for &u in &[u0, u1] {
                                for &v in &[v0, v1] {
                                    for &w in &[w0, w1] {
                                        p *= f(u, v, w);
                                    }
                                }
                            }
                            total += p;
                        }
                    }
                }
            }
        }
    }
    total
}

/// Ordered 6-tuples (u0,u1,v0,v1,w0,w1), repeats allowed, spanning eight edges.
pub fn oct23_count(t: &Triad) -> u128 {
    let f = |u: usize, v: usize, w: usize| t.edge(u, v, w) as i128;
    let (exact, approx) = octahedral_sum(t.sizes, f);
    exact.map(|x| x as u128).unwrap_or(approx as u128)
}

pub fn oct23_bruteforce(t: &Triad) -> u128 {
    let [a, b, c] = t.sizes;
    let mut n = 0u128;
    for u0 in 0..a {
        for u1 in 0..a {
            for v0 in 0..b {
                for v1 in 0..b {
                    for w0 in 0..c {
                        for w1 in 0..c {
                            let all = [u0, u1].iter().all(|&u| {
                                [v0, v1].iter().all(|&v| [w0, w1].iter().all(|&w| t.edge(u, v, w)))
                            });
                            n += all as u128;
                        }
                    }
                }
            }
        }
    }
    n
}

#[derive(Clone, Debug)]
pub struct Disc23Options {
    pub d3: Option<Q>,
    /// Local search proposals when not exhaustive.
    pub budget: usize,
    pub seed: u64,
    /// Largest cross edge count searched exhaustively.
    pub exact_edges: usize,
}

impl Default for Disc23Options {
    fn default() -> Self {
        Disc23Options { d3: None, budget: 20_000, seed: 0, exact_edges: DEFAULT_DISC23_EXACT_EDGES }
    }
}

/// Search state: subsets of the two pair sets touching the apex part; the
/// third pair set is completed optimally edge by edge.
struct Search<'a> {
    t: &'a Triad,
    /// Part roles: apex z, then x, y (x < y).
    z: usize,
    x: usize,
    y: usize,
    zx: Vec<(usize, usize)>,
    zy: Vec<(usize, usize)>,
    xy: Vec<(usize, usize)>,
    num: i128,
    den: i128,
}

impl<'a> Search<'a> {
    fn new(t: &'a Triad, d3: Q) -> Self {
        let sizes = [t.g.e01.edge_count(), t.g.e02.edge_count(), t.g.e12.edge_count()];
        // complete the largest pair set; pair index p joins parts (0,1), (0,2), (1,2)
        let p = (0..3).max_by_key(|&i| (sizes[i], std::cmp::Reverse(i))).expect("three pairs");
        let (x, y, z) = [(0, 1, 2), (0, 2, 1), (1, 2, 0)][p];
        let zx = Self::pairs(t, z, x);
        let zy = Self::pairs(t, z, y);
        let xy = Self::pairs(t, x, y);
        Search { t, z, x, y, zx, zy, xy, num: *d3.numer(), den: *d3.denom() }
    }

    fn graph(t: &Triad, i: usize, j: usize) -> (&BipartiteGraph, bool) {
        match (i, j) {
            (0, 1) => (&t.g.e01, false),
            (1, 0) => (&t.g.e01, true),
            (0, 2) => (&t.g.e02, false),
            (2, 0) => (&t.g.e02, true),
            (1, 2) => (&t.g.e12, false),
            (2, 1) => (&t.g.e12, true),
            _ => unreachable!("distinct parts"),
        }
    }

    fn pairs(t: &Triad, i: usize, j: usize) -> Vec<(usize, usize)> {
        let (g, flip) = Self::graph(t, i, j);
        let mut out: Vec<_> = g.edges().map(|(a, b)| if flip { (b, a) } else { (a, b) }).collect();
        out.sort_unstable();
        out
    }

    /// Scaled weight den*(1_E - d3) of the local triple (z,x,y) in role order.
    fn weight(&self, z: usize, x: usize, y: usize) -> i128 {
        let mut idx = [0; 3];
        idx[self.z] = z;
        idx[self.x] = x;
        idx[self.y] = y;
        if self.t.edge(idx[0], idx[1], idx[2]) {
            self.den - self.num
        } else {
            -self.num
        }
    }

    /// Best completion value (scaled) and branch for chosen zx/zy subsets.
    fn evaluate(&self, on_zx: &[bool], on_zy: &[bool]) -> (i128, bool) {
        let [_, nx, ny] = [0, self.t.sizes[self.x], self.t.sizes[self.y]];
        let nz = self.t.sizes[self.z];
        let mut adj_x = vec![vec![false; nx]; nz];
        let mut adj_y = vec![vec![false; ny]; nz];
        for (k, &(a, b)) in self.zx.iter().enumerate() {
            adj_x[a][b] = on_zx[k];
        }
        for (k, &(a, b)) in self.zy.iter().enumerate() {
            adj_y[a][b] = on_zy[k];
        }
        let (mut pos, mut neg) = (0i128, 0i128);
        for &(i, j) in &self.xy {
            let c: i128 = (0..nz).filter(|&k| adj_x[k][i] && adj_y[k][j]).map(|k| self.weight(k, i, j)).sum();
            if c > 0 {
                pos += c;
            } else {
                neg -= c;
            }
        }
        if pos >= neg {
            (pos, true)
        } else {
            (neg, false)
        }
    }

    fn witness(&self, on_zx: &[bool], on_zy: &[bool], positive: bool) -> Witness {
        let nz = self.t.sizes[self.z];
        let mut xy_on = Vec::new();
        for &(i, j) in &self.xy {
            let c: i128 = (0..nz)
                .filter(|&k| {
                    self.zx.binary_search(&(k, i)).map(|p| on_zx[p]).unwrap_or(false)
                        && self.zy.binary_search(&(k, j)).map(|p| on_zy[p]).unwrap_or(false)
                })
                .map(|k| self.weight(k, i, j))
                .sum();
            if (positive && c > 0) || (!positive && c < 0) {
                xy_on.push((i, j));
            }
        }
        let zx: Vec<_> = self.zx.iter().zip(on_zx).filter(|(_, &o)| o).map(|(&e, _)| e).collect();
        let zy: Vec<_> = self.zy.iter().zip(on_zy).filter(|(_, &o)| o).map(|(&e, _)| e).collect();
        // back to (0,1), (0,2), (1,2) orientation
        let mut sets: [Vec<(usize, usize)>; 3] = Default::default();
        for (edges, (i, j)) in [(zx, (self.z, self.x)), (zy, (self.z, self.y)), (xy_on, (self.x, self.y))] {
            let (lo, hi, flip) = if i < j { (i, j, false) } else { (j, i, true) };
            let slot = match (lo, hi) {
                (0, 1) => 0,
                (0, 2) => 1,
                _ => 2,
            };
            let mut e: Vec<_> = edges.into_iter().map(|(a, b)| if flip { (b, a) } else { (a, b) }).collect();
            e.sort_unstable();
            sets[slot] = e;
        }
        let [e01, e02, e12] = sets;
        Witness::Subgraph { e01, e02, e12 }
    }
}

/// Best-found subgraph G' of the triad maximizing |e(H on G') - d3 * triangles(G')|,
/// normalized by d2^3 |V1||V2||V3|.
pub fn disc23_witness_search(t: &Triad, opts: &Disc23Options) -> DeviationReport {
    let d3 = opts.d3.unwrap_or_else(|| t.d3());
    let s = Search::new(t, d3);
    let (a, b) = (s.zx.len(), s.zy.len());
    let exact = t.g.cross_edge_count() <= opts.exact_edges;
    let (mut on_zx, mut on_zy) = (vec![true; a], vec![true; b]);
    let (mut best_val, mut best_pos) = s.evaluate(&on_zx, &on_zy);
    let mut best_state = (on_zx.clone(), on_zy.clone());
    if exact {
        for mask in 0u64..(1u64 << (a + b)) {
            let zx: Vec<bool> = (0..a).map(|i| mask >> i & 1 == 1).collect();
            let zy: Vec<bool> = (0..b).map(|i| mask >> (a + i) & 1 == 1).collect();
            let (v, p) = s.evaluate(&zx, &zy);
            if v > best_val {
                best_val = v;
                best_pos = p;
                best_state = (zx, zy);
            }
        }
    } else {
        let mut rng = crate::num::stream(opts.seed, "disc23-search");
        let (mut cur, _) = (best_val, best_pos);
        let restart_every = (opts.budget / 8).max(1);
        for step in 0..opts.budget {
            if step > 0 && step % restart_every == 0 {
                on_zx = (0..a).map(|_| rng.gen_bool(0.5)).collect();
                on_zy = (0..b).map(|_| rng.gen_bool(0.5)).collect();
                cur = s.evaluate(&on_zx, &on_zy).0;
            }
            let (mut nzx, mut nzy) = (on_zx.clone(), on_zy.clone());
            if a + b > 0 && rng.gen_bool(0.8) {
                let i = rng.gen_range(0..a + b);
                if i < a {
                    nzx[i] = !nzx[i];
                } else {
                    nzy[i - a] = !nzy[i - a];
                }
            } else {
                // drop one vertex from the enumerated pairs
                let role = rng.gen_range(0..3);
                let part = [s.z, s.x, s.y][role];
                let v = rng.gen_range(0..t.sizes[part].max(1));
                for (k, &(zz, xx)) in s.zx.iter().enumerate() {
                    if (role == 0 && zz == v) || (role == 1 && xx == v) {
                        nzx[k] = false;
                    }
                }
                for (k, &(zz, yy)) in s.zy.iter().enumerate() {
                    if (role == 0 && zz == v) || (role == 2 && yy == v) {
                        nzy[k] = false;
                    }
                }
            }
            let (v, p) = s.evaluate(&nzx, &nzy);
            if v >= cur {
                cur = v;
                on_zx = nzx;
                on_zy = nzy;
                if v > best_val {
                    best_val = v;
                    best_pos = p;
                    best_state = (on_zx.clone(), on_zy.clone());
                }
            }
        }
    }
    let d2 = t.d2();
    let deviation = if d2 == q(0, 1) || t.volume() == 0 {
        q(0, 1)
    } else {
        q(best_val, s.den) / (d2 * d2 * d2 * Q::from_integer(t.volume()))
    };
    DeviationReport {
        deviation,
        density_used: d3,
        witness: s.witness(&best_state.0, &best_state.1, best_pos),
        exact,
    }
}

/// Full enumeration over all subgraphs; the oracle for small triads.
pub fn disc23_bruteforce(t: &Triad, d3: Q) -> Q {
    let sets = [
        Search::pairs(t, 0, 1),
        Search::pairs(t, 0, 2),
        Search::pairs(t, 1, 2),
    ];
    let total = sets.iter().map(Vec::len).sum::<usize>();
    assert!(total <= 20, "brute force limited to 20 cross edges");
    let (num, den) = (*d3.numer(), *d3.denom());
    let mut best = 0i128;
    for mask in 0u64..(1 << total) {
        let mut on = [vec![], vec![], vec![]];
        let mut off = 0;
        for (s, set) in sets.iter().enumerate() {
            on[s] = set.iter().enumerate().filter(|(i, _)| mask >> (off + i) & 1 == 1).map(|(_, &e)| e).collect();
            off += set.len();
        }
        let mut v = 0i128;
        for &(a, b) in &on[0] {
            for &(a2, c) in &on[1] {
                if a2 == a && on[2].contains(&(b, c)) {
                    v += if t.edge(a, b, c) { den - num } else { -num };
                }
            }
        }
        best = best.max(v.abs());
    }
    let d2 = t.d2();
    if d2 == q(0, 1) {
        return q(0, 1);
    }
    q(best, den) / (d2 * d2 * d2 * Q::from_integer(t.volume()))
}

/// Aggregate measurements of a triad.
#[derive(Clone, Debug, Serialize)]
pub struct TriadMeasure {
    #[serde(with = "crate::num::qvec")]
    pub d2: Vec<Q>,
    #[serde(with = "crate::num::qser")]
    pub d3: Q,
    pub dev23: Dev23,
    pub oct23_count: u128,
    pub disc23: DeviationReport,
}

pub fn measure_triad(t: &Triad, opts: &Disc23Options) -> TriadMeasure {
    TriadMeasure {
        d2: t.g.pair_densities().to_vec(),
        d3: opts.d3.unwrap_or_else(|| t.d3()),
        dev23: dev23_sum(t, opts.d3),
        oct23_count: oct23_count(t),
        disc23: disc23_witness_search(t, opts),
    }
}

/// Tuples (one vertex of `parts[i]` per pattern vertex i) realizing every
/// edge and non-edge of `pattern` on its transversal triples.
pub fn induced_pattern_count(h: &ThreeGraph, parts: &[Vec<usize>], pattern: &ThreeGraph) -> Result<u128> {
    if parts.len() != pattern.n() {
        return Err(Error::Arity { expected: pattern.n(), got: parts.len() });
    }
    let mut seen = std::collections::HashSet::new();
    for p in parts {
        for &v in p {
            if v >= h.n() {
                return Err(Error::OutOfRange { index: v, n: h.n() });
            }
            if !seen.insert(v) {
                return Err(Error::OverlappingParts(v));
            }
        }
    }
    let constraints = pattern_constraints(pattern)?;
    // constraints grouped by their largest pattern vertex
    let k = pattern.n();
    let mut by_last: Vec<Vec<([usize; 3], bool)>> = vec![Vec::new(); k];
    for (tri, e) in constraints {
        by_last[tri[2]].push((tri, e));
    }
    let mut assign = vec![0usize; k];
    Ok(count_rec(h, parts, &by_last, &mut assign, 0))
}

fn pattern_constraints(pattern: &ThreeGraph) -> Result<Vec<([usize; 3], bool)>> {
    let pm = pattern.part_map();
    if pattern.partition().is_none() {
        return Err(Error::Precondition("pattern carries no 3-partition".into()));
    }
    let k = pattern.n();
    let mut out = Vec::new();
    for a in 0..k {
        for b in a + 1..k {
            for c in b + 1..k {
                let (pa, pb, pc) = (pm[a], pm[b], pm[c]);
                if let (Some(x), Some(y), Some(z)) = (pa, pb, pc) {
                    if x != y && y != z && x != z {
                        out.push(([a, b, c], pattern.contains(a, b, c)));
                    }
                }
            }
        }
    }
    Ok(out)
}

fn count_rec(
    h: &ThreeGraph,
    parts: &[Vec<usize>],
    by_last: &[Vec<([usize; 3], bool)>],
    assign: &mut Vec<usize>,
    i: usize,
) -> u128 {
    if i == parts.len() {
        return 1;
    }
    let mut total = 0;
    for &v in &parts[i] {
        assign[i] = v;
        if by_last[i].iter().all(|&([a, b, _], e)| h.contains(assign[a], assign[b], v) == e) {
            total += count_rec(h, parts, by_last, assign, i + 1);
        }
    }
    total
}

/// Product enumeration without pruning; the oracle for [`induced_pattern_count`].
pub fn induced_pattern_bruteforce(h: &ThreeGraph, parts: &[Vec<usize>], pattern: &ThreeGraph) -> Result<u128> {
    let constraints = pattern_constraints(pattern)?;
    let mut total = 0u128;
    let mut idx = vec![0usize; parts.len()];
    if parts.iter().any(Vec::is_empty) {
        return Ok(0);
    }
    loop {
        let tuple: Vec<usize> = idx.iter().zip(parts).map(|(&i, p)| p[i]).collect();
        if constraints.iter().all(|&([a, b, c], e)| h.contains(tuple[a], tuple[b], tuple[c]) == e) {
            total += 1;
        }
        let mut pos = 0;
        loop {
            if pos == idx.len() {
                return Ok(total);
            }
            idx[pos] += 1;
            if idx[pos] < parts[pos].len() {
                break;
            }
            idx[pos] = 0;
            pos += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::qi;
    use proptest::prelude::*;
    use rand::Rng;

    fn parts(s: [usize; 3]) -> [Vec<usize>; 3] {
        [(0..s[0]).collect(), (s[0]..s[0] + s[1]).collect(), (s[0] + s[1]..s[0] + s[1] + s[2]).collect()]
    }

    fn random_triad(s: [usize; 3], p: f64, seed: u64) -> Triad {
        let mut rng = crate::num::stream(seed, "triad");
        let mut r = |l, m| BipartiteGraph::from_fn(l, m, |_, _| rng.gen_bool(p));
        let g = TripartiteGraph::new(parts(s), r(s[0], s[1]), r(s[0], s[2]), r(s[1], s[2])).unwrap();
        let mut rng2 = crate::num::stream(seed, "triad-h");
        Triad::from_fn(&g, |_, _, _| rng2.gen_bool(0.5))
    }

    #[test]
    fn all_triangles_is_flat() {
        let g = TripartiteGraph::complete(parts([2, 3, 2]));
        let t = Triad::from_fn(&g, |_, _, _| true);
        assert_eq!(dev23_sum(&t, Some(qi(1))).sum.exact, Some(qi(0)));
        let e = Triad::from_fn(&g, |_, _, _| false);
        assert_eq!(dev23_sum(&e, Some(qi(0))).sum.exact, Some(qi(0)));
    }

    #[test]
    fn octahedra_in_complete() {
        let g = TripartiteGraph::complete(parts([2, 2, 2]));
        assert_eq!(oct23_count(&Triad::from_fn(&g, |_, _, _| true)), 64);
        assert_eq!(oct23_count(&Triad::from_fn(&g, |_, _, _| false)), 0);
        let t = Triad::from_fn(&g, |a, b, c| (a, b, c) != (0, 0, 0));
        assert_eq!(oct23_count(&t), oct23_bruteforce(&t));
    }

    #[test]
    fn rejects_non_underlying() {
        let g = TripartiteGraph::new(
            parts([1, 1, 1]),
            BipartiteGraph::empty(1, 1),
            BipartiteGraph::complete(1, 1),
            BipartiteGraph::complete(1, 1),
        )
        .unwrap();
        let h = ThreeGraph::new(3, [[0, 1, 2]]).unwrap();
        assert!(matches!(Triad::new(&h, &g), Err(Error::Precondition(_))));
    }

    #[test]
    fn identity_subgraph_is_a_lower_bound() {
        let t = random_triad([4, 4, 4], 0.7, 3);
        let d3 = q(1, 3);
        let r = disc23_witness_search(&t, &Disc23Options { d3: Some(d3), budget: 500, ..Default::default() });
        let base = crate::num::abs(&(Q::from_integer(t.edge_count() as i128) - d3 * Q::from_integer(t.triangle_count() as i128)));
        let d2 = t.d2();
        assert!(r.deviation >= base / (d2 * d2 * d2 * Q::from_integer(64)));
    }

    #[test]
    fn single_edge_pattern() {
        let h = ThreeGraph::new(3, [[0, 1, 2]]).unwrap();
        let pattern = ThreeGraph::tripartite_from_fn([1, 1, 1], |_, _, _| true);
        assert_eq!(induced_pattern_count(&h, &[vec![0], vec![1], vec![2]], &pattern).unwrap(), 1);
        assert!(matches!(induced_pattern_count(&h, &[vec![0]], &pattern), Err(Error::Arity { .. })));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(30))]
        #[test]
        fn dev23_matches_sixfold_sum(seed in any::<u64>()) {
            let t = random_triad([3, 3, 3], 0.7, seed);
            let d3 = t.d3();
            prop_assert_eq!(dev23_sum(&t, Some(d3)).sum.exact, Some(dev23_bruteforce(&t, d3)));
            prop_assert_eq!(oct23_count(&t), oct23_bruteforce(&t));
        }

        #[test]
        fn disc23_exact_matches_bruteforce(seed in any::<u64>()) {
            let t = random_triad([2, 2, 3], 0.6, seed);
            prop_assume!(t.g.cross_edge_count() <= 16);
            let r = disc23_witness_search(&t, &Disc23Options::default());
            prop_assert!(r.exact);
            prop_assert_eq!(r.deviation, disc23_bruteforce(&t, r.density_used));
        }

        #[test]
        fn pattern_count_matches_bruteforce(seed in any::<u64>()) {
            let mut rng = crate::num::stream(seed, "pattern");
            let edges: Vec<[usize; 3]> = (0..9).flat_map(|a| (a + 1..9).flat_map(move |b| (b + 1..9).map(move |c| [a, b, c]))).collect();
            let chosen: Vec<[usize; 3]> = edges.into_iter().filter(|_| rng.gen_bool(0.4)).collect();
            let h = ThreeGraph::new(9, chosen).unwrap();
            let pattern = ThreeGraph::tripartite_from_fn([1, 2, 1], |a, b, c| (a + b + c) % 2 == 0);
            let host_parts = vec![vec![0, 1], vec![2, 3], vec![4, 5, 6], vec![7, 8]];
            prop_assert_eq!(
                induced_pattern_count(&h, &host_parts, &pattern).unwrap(),
                induced_pattern_bruteforce(&h, &host_parts, &pattern).unwrap()
            );
        }
    }
}
