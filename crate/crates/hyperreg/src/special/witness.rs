//! Explicit splitting witnesses for GS_p(n) and HP(N), and the intersection balls.

use num_traits::{One, Zero};
use serde::Serialize;

use super::metric::{gs_metric, hp_metric, Ball, MetricPart};
use crate::construct::{Fpn, GsOracle, HpOracle};
use crate::core::TripartiteOracle;
use crate::error::{Error, Result};
use crate::num::{self, q, Q};

/// Roles (X, Y, Z) as part indices.
pub type Perm = [usize; 3];

pub const PERMS: [Perm; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];

/// Edge test with x in part perm[0], y in perm[1], z in perm[2].
pub fn edge(o: &dyn TripartiteOracle, perm: Perm, x: usize, y: usize, z: usize) -> bool {
    let mut t = [0; 3];
    t[perm[0]] = x;
    t[perm[1]] = y;
    t[perm[2]] = z;
    o.has(t[0], t[1], t[2])
}

/// First triple of xs * ys * zs whose edge status differs from `want`.
pub fn block_violation(
    o: &dyn TripartiteOracle,
    perm: Perm,
    xs: &[usize],
    ys: &[usize],
    zs: &[usize],
    want: bool,
) -> Option<[usize; 3]> {
    for &x in xs {
        for &y in ys {
            for &z in zs {
                if edge(o, perm, x, y, z) != want {
                    return Some([x, y, z]);
                }
            }
        }
    }
    None
}

/// The two concrete families with explicit witnesses.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum SpecialFamily {
    Gs {
        p: usize,
        n: usize,
    },
    Hp {
        n: usize,
        #[serde(with = "num::qser")]
        tau: Q,
        #[serde(with = "num::qser")]
        mu: Q,
    },
}

impl SpecialFamily {
    pub fn metrics(&self) -> Result<[MetricPart; 3]> {
        match *self {
            SpecialFamily::Gs { p, n } => gs_metric(p, n),
            SpecialFamily::Hp { n, tau, mu } => hp_metric(n, tau, mu),
        }
    }

    pub fn oracle(&self) -> Result<Box<dyn TripartiteOracle + Send>> {
        Ok(match *self {
            SpecialFamily::Gs { p, n } => Box::new(GsOracle::new(p, n)?),
            SpecialFamily::Hp { n, .. } => Box::new(HpOracle { n }),
        })
    }

    /// Multiplier c in d(f0, f1) <= c r proved for the family.
    pub fn split_constant(&self) -> Q {
        match self {
            SpecialFamily::Gs { .. } => q(3, 1),
            SpecialFamily::Hp { .. } => q(7, 1),
        }
    }
}

/// Largest m with p^-m >= r, so that B_r = B_{p^-m}; r in (0, 1].
pub fn log_level(p: usize, r: Q) -> usize {
    let mut m = 0;
    let mut pw = Q::one() / Q::from_integer(p as i128);
    while pw >= r {
        pw /= Q::from_integer(p as i128);
        m += 1;
    }
    m
}

/// GS witnesses f0, f1 for (r, g, h): with s = min(m, n-1),
/// f_u = -(g + h) + c e^{s+1} where c = 1 for f1 and c = 2 for f0.
pub fn gs_split(field: &Fpn, r: Q, g: usize, h: usize) -> (usize, usize) {
    let s = log_level(field.p, r).min(field.n - 1);
    let base = field.neg(field.add(g, h));
    let unit = field.p.pow((field.n - 1 - s) as u32);
    let f1 = field.add(base, unit);
    let f0 = field.add(f1, unit);
    (f0, f1)
}

/// HP witnesses (0-based) for a_i, b_j and r: with d1 = ceil(rN), the
/// non-edge side N+2-i-j-3d1 and the edge side N+2-i-j+3d1 (1-based).
/// `None` when either index falls outside [1, N].
pub fn hp_split(n: usize, i: usize, j: usize, r: Q) -> Option<(usize, usize)> {
    let d1 = num::ceil(&(r * Q::from_integer(n as i128)));
    let base = n as i128 + 2 - (i as i128 + 1) - (j as i128 + 1);
    let (f0, f1) = (base - 3 * d1, base + 3 * d1);
    let ok = |k: i128| (1..=n as i128).contains(&k);
    (ok(f0) && ok(f1)).then(|| ((f0 - 1) as usize, (f1 - 1) as usize))
}

/// The table f(a, b) on distinct a, b of F_p: {a + f, b + f} = {1, u} with u not in {0, 1}.
pub fn gs_pair_table(p: usize, a: usize, b: usize) -> usize {
    let (lo, hi) = (a.min(b), a.max(b));
    if lo == 0 {
        if hi == p - 1 {
            2 % p
        } else {
            1
        }
    } else {
        (p + 1 - lo) % p
    }
}

/// GS pair-splitting vertex h for a_g, a_g2 (distinct) and b_y, with m = lambda(g, g2).
pub fn gs_pair_split(field: &Fpn, g: usize, g2: usize, y: usize) -> usize {
    let p = field.p;
    let m = field.lambda(g, g2);
    let (dg, dg2, dy) = (field.digits(g), field.digits(g2), field.digits(y));
    let mut h = vec![0; field.n];
    for i in 0..m {
        h[i] = (2 * p - dg[i] - dy[i]) % p;
    }
    h[m] = gs_pair_table(p, (dg[m] + dy[m]) % p, (dg2[m] + dy[m]) % p);
    field.encode(&h)
}

/// Which of the two balls around x and x' carries the edge block.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EdgeSide {
    X,
    XPrime,
}

/// HP pair-splitting vertex (0-based) for a_i in A_lg+, a_i2, b_j, from the
/// three-case index arithmetic. `None` when the index falls outside [1, N].
#[allow(clippy::too_many_arguments)]
pub fn hp_pair_split(n: usize, tau: Q, mu: Q, i: usize, i2: usize, j: usize, r: Q, r2: Q) -> Option<(usize, EdgeSide)> {
    let big = Q::from_integer(n as i128);
    let r2_ = (num::abs(&(Q::from_integer(i as i128) - Q::from_integer(i2 as i128))) / big) - r - r2;
    let r0 = r.min(r2).min(r2_) / q(3, 1);
    let c = |x: Q| num::ceil(&(x * big));
    let (i1, ip1, j1) = (i as i128 + 1, i2 as i128 + 1, j as i128 + 1);
    let ip = Q::from_integer(ip1);
    let mu2 = mu * mu;
    let lo = (tau - mu2) * big;
    let hi = (Q::one() - tau + mu2) * big;
    let base = n as i128 + 2 - j1;
    let (k, side) = if ip > lo && ip < hi {
        if i1 <= ip1 {
            (base - ip1 + c(r2) + c(r0), EdgeSide::XPrime)
        } else {
            (base - i1 + c(r) + c(r0), EdgeSide::X)
        }
    } else if ip <= lo {
        (base - i1 + c(r) + c(r0), EdgeSide::X)
    } else {
        (base - i1 - c(r) - c(r0), EdgeSide::XPrime)
    };
    (1..=n as i128).contains(&k).then(|| ((k - 1) as usize, side))
}

/// f0, f1 with exhaustive block certificates.
#[derive(Clone, Debug, Serialize)]
pub struct SplitWitness {
    pub f0: usize,
    pub f1: usize,
    #[serde(with = "num::qser")]
    pub distance: Q,
    #[serde(with = "num::qser")]
    pub bound: Q,
    pub edge_block_ok: bool,
    pub non_edge_block_ok: bool,
    pub checked_triples: usize,
}

impl SplitWitness {
    pub fn verified(&self) -> bool {
        self.edge_block_ok && self.non_edge_block_ok && self.distance <= self.bound
    }
}

/// Witnesses for x in A, y in B, radius r, with f0, f1 in C.
pub fn split_witness(family: &SpecialFamily, r: Q, x: usize, y: usize) -> Result<SplitWitness> {
    let metrics = family.metrics()?;
    let oracle = family.oracle()?;
    let (f0, f1) = match *family {
        SpecialFamily::Gs { p, n } => {
            if !(r > Q::zero() && r <= Q::one()) {
                return Err(Error::Precondition(format!("radius {r} must lie in (0, 1]")));
            }
            gs_split(&Fpn::new(p, n)?, r, x, y)
        }
        SpecialFamily::Hp { n, mu, .. } => {
            if !metrics[0].lg_plus().contains(&x) {
                return Err(Error::Precondition(format!("a_{} is not in A_lg+", x + 1)));
            }
            if !metrics[1].sm_plus().contains(&y) {
                return Err(Error::Precondition(format!("b_{} is not in B_sm+", y + 1)));
            }
            if !(r > Q::zero() && r < mu * mu) {
                return Err(Error::Precondition(format!("radius {r} must lie in (0, mu^2)")));
            }
            hp_split(n, x, y, r).ok_or_else(|| Error::Precondition("witness index outside [1, N]".into()))?
        }
    };
    Ok(certify_split(oracle.as_ref(), &metrics, family.split_constant(), r, x, y, f0, f1))
}

#[allow(clippy::too_many_arguments)]
pub(crate) fn certify_split(
    o: &dyn TripartiteOracle,
    metrics: &[MetricPart; 3],
    constant: Q,
    r: Q,
    x: usize,
    y: usize,
    f0: usize,
    f1: usize,
) -> SplitWitness {
    let perm = [0, 1, 2];
    let xs = metrics[0].ball(x, r);
    let ys = metrics[1].ball(y, r);
    let z1 = metrics[2].ball(f1, r / q(2, 1));
    let z0 = metrics[2].ball(f0, r / q(2, 1));
    SplitWitness {
        f0,
        f1,
        distance: metrics[2].d(f0, f1),
        bound: constant * r,
        edge_block_ok: block_violation(o, perm, &xs, &ys, &z1, true).is_none(),
        non_edge_block_ok: block_violation(o, perm, &xs, &ys, &z0, false).is_none(),
        checked_triples: xs.len() * ys.len() * (z0.len() + z1.len()),
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct PairSplitWitness {
    pub z: usize,
    pub edge_side: EdgeSide,
    #[serde(with = "num::qser")]
    pub r0: Q,
    pub verified: bool,
    pub checked_triples: usize,
}

/// Split the balls around x, x2 in A by a pair (y, z) of B x C.
///
/// GS: d(x, x2) = r > 0 and all balls have radius r. HP: `radii` = (r, r'),
/// d(x, x2) = r'' + r' + r with r'' > 2 max(r, r'), balls B_r(x), B_r'(x2) and
/// B_{r0/2} around y and z.
pub fn pair_split_witness(family: &SpecialFamily, x: usize, x2: usize, y: usize, radii: (Q, Q)) -> Result<PairSplitWitness> {
    let metrics = family.metrics()?;
    let oracle = family.oracle()?;
    let d = metrics[0].d(x, x2);
    match *family {
        SpecialFamily::Gs { p, n } => {
            if d.is_zero() {
                return Err(Error::Precondition("d(x, x') = r must be positive".into()));
            }
            let z = gs_pair_split(&Fpn::new(p, n)?, x, x2, y);
            Ok(certify_pair(oracle.as_ref(), &metrics, x, x2, y, z, (d, d), d, d))
        }
        SpecialFamily::Hp { n, tau, mu } => {
            let (r, r2) = radii;
            let r3 = d - r - r2;
            if !(r > Q::zero() && r2 > Q::zero() && r < mu * mu && r2 < mu * mu) {
                return Err(Error::Precondition("need 0 < r, r' < mu^2".into()));
            }
            if r3 <= q(2, 1) * r.max(r2) {
                return Err(Error::Precondition(format!("r'' = d(x,x') - r - r' = {r3} is not > 2 max(r, r')")));
            }
            if !metrics[0].lg_plus().contains(&x) {
                return Err(Error::Precondition(format!("a_{} is not in A_lg+", x + 1)));
            }
            if !metrics[1].sm().contains(&y) {
                return Err(Error::Precondition(format!("b_{} is not in B_sm", y + 1)));
            }
            let (z, _) = hp_pair_split(n, tau, mu, x, x2, y, r, r2)
                .ok_or_else(|| Error::Precondition("witness index outside [1, N]".into()))?;
            let r0 = r.min(r2).min(r3) / q(3, 1);
            Ok(certify_pair(oracle.as_ref(), &metrics, x, x2, y, z, (r, r2), r0 / q(2, 1), r0))
        }
    }
}

/// Checks both orientations; `edge_side` names the orientation that holds.
#[allow(clippy::too_many_arguments)]
pub(crate) fn certify_pair(
    o: &dyn TripartiteOracle,
    metrics: &[MetricPart; 3],
    x: usize,
    x2: usize,
    y: usize,
    z: usize,
    radii: (Q, Q),
    small: Q,
    r0: Q,
) -> PairSplitWitness {
    let perm = [0, 1, 2];
    let s0 = metrics[0].ball(x, radii.0);
    let s1 = metrics[0].ball(x2, radii.1);
    let ys = metrics[1].ball(y, small);
    let zs = metrics[2].ball(z, small);
    let checked_triples = (s0.len() + s1.len()) * ys.len() * zs.len();
    let holds = |e: &[usize], ne: &[usize]| {
        block_violation(o, perm, e, &ys, &zs, true).is_none() && block_violation(o, perm, ne, &ys, &zs, false).is_none()
    };
    let (edge_side, verified) = if holds(&s1, &s0) {
        (EdgeSide::XPrime, true)
    } else if holds(&s0, &s1) {
        (EdgeSide::X, true)
    } else {
        (EdgeSide::X, false)
    };
    PairSplitWitness { z, edge_side, r0, verified, checked_triples }
}

/// N(y,z) minus N(y,z') inside X, with its smallest enclosing closed ball.
#[derive(Clone, Debug, Serialize)]
pub struct IntersectionBall {
    pub set: Vec<usize>,
    pub ball: Ball,
    #[serde(with = "num::qser")]
    pub bound: Q,
    pub within_bound: bool,
}

pub fn neighborhood_intersection_ball(
    o: &dyn TripartiteOracle,
    metrics: &[MetricPart; 3],
    perm: Perm,
    y: usize,
    z: usize,
    z2: usize,
) -> IntersectionBall {
    let mx = &metrics[perm[0]];
    let set: Vec<usize> =
        (0..mx.size).filter(|&x| edge(o, perm, x, y, z) && !edge(o, perm, x, y, z2)).collect();
    let ball = mx.enclosing_ball(&set);
    let bound = metrics[perm[2]].d(z, z2);
    IntersectionBall { within_bound: ball.radius <= bound, set, ball, bound }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gs32() -> SpecialFamily {
        SpecialFamily::Gs { p: 3, n: 2 }
    }

    #[test]
    fn gs_split_example() {
        let w = split_witness(&gs32(), q(1, 3), 0, 0).unwrap();
        // f1 = (0,1), f0 = (0,2)
        assert_eq!((w.f1, w.f0), (1, 2));
        assert!(w.verified());
    }

    #[test]
    fn gs_move_claims_exhaustive() {
        let f = Fpn::new(3, 2).unwrap();
        let m = gs_metric(3, 2).unwrap();
        let radii = [Q::one(), q(1, 3), q(1, 9)];
        for &r in &radii {
            for g in 0..9 {
                for g1 in 0..9 {
                    for g2 in 0..9 {
                        if g1 == g2 {
                            continue;
                        }
                        let (a, b) = (gs_split(&f, r, g, g1), gs_split(&f, r, g, g2));
                        assert_eq!(m[2].d(a.0, b.0), m[1].d(g1, g2));
                        assert_eq!(m[2].d(a.1, b.1), m[1].d(g1, g2));
                    }
                }
            }
        }
    }

    #[test]
    fn gs_cross_witnesses_can_meet() {
        // r = r' = 1, g = g' = 0, h = (0,0), h' = (1,0): f1(h) = f0(h') = (1,0),
        // so the mixed pairs are not kept d(h,h') apart
        let f = Fpn::new(3, 2).unwrap();
        let (a, b) = (gs_split(&f, Q::one(), 0, 0), gs_split(&f, Q::one(), 0, 3));
        assert_eq!(a.1, b.0);
        assert_eq!(a.1, 3);
    }

    #[test]
    fn gs_split_blocks_exhaustive() {
        let fam = gs32();
        for r in [Q::one(), q(1, 2), q(1, 3), q(1, 9)] {
            for x in 0..9 {
                for y in 0..9 {
                    let w = split_witness(&fam, r, x, y).unwrap();
                    assert!(w.edge_block_ok && w.non_edge_block_ok, "r={r} x={x} y={y}");
                }
            }
        }
    }

    #[test]
    fn hp_split_example() {
        // N = 100, i = 50, j = 10, r = 0.01 (1-based): f0 = 39, f1 = 45
        let (f0, f1) = hp_split(100, 49, 9, q(1, 100)).unwrap();
        assert_eq!((f0 + 1, f1 + 1), (39, 45));
        let o = HpOracle { n: 100 };
        let m = hp_metric(100, q(1, 5), q(1, 20)).unwrap();
        let w = certify_split(&o, &m, q(7, 1), q(1, 100), 49, 9, f0, f1);
        assert!(w.verified());
        assert_eq!(w.distance, q(6, 100));
    }

    #[test]
    fn hp_split_precondition() {
        let fam = SpecialFamily::Hp { n: 200, tau: q(6, 25), mu: q(1, 20) };
        // a_1 is far below A_lg+
        assert!(matches!(split_witness(&fam, q(1, 1000), 0, 14), Err(Error::Precondition(_))));
        let w = split_witness(&fam, q(1, 1000), 99, 14).unwrap();
        assert!(w.edge_block_ok && w.non_edge_block_ok);
    }

    #[test]
    fn pair_table_property() {
        for p in [3usize, 5, 7] {
            for a in 0..p {
                for b in 0..p {
                    if a == b {
                        continue;
                    }
                    let f = gs_pair_table(p, a, b);
                    let (u, v) = ((a + f) % p, (b + f) % p);
                    let ok = (u == 1 && v > 1) || (v == 1 && u > 1);
                    assert!(ok, "p={p} a={a} b={b} f={f}");
                }
            }
        }
    }

    #[test]
    fn gs_pair_split_exhaustive() {
        let fam = gs32();
        // g = (1,0), g' = (2,0)
        for y in 0..9 {
            let w = pair_split_witness(&fam, 3, 6, y, (Q::one(), Q::one())).unwrap();
            assert!(w.verified, "y={y}");
        }
        for g in 0..9 {
            for g2 in 0..9 {
                if g == g2 {
                    continue;
                }
                for y in 0..9 {
                    assert!(pair_split_witness(&fam, g, g2, y, (Q::one(), Q::one())).unwrap().verified);
                }
            }
        }
        assert!(pair_split_witness(&fam, 4, 4, 0, (Q::one(), Q::one())).is_err());
    }

    #[test]
    fn hp_pair_split_cases() {
        let fam = SpecialFamily::Hp { n: 2000, tau: q(6, 25), mu: q(1, 20) };
        let (r, r2) = (q(1, 1000), q(2, 1000));
        // middle range, i <= i'
        let w = pair_split_witness(&fam, 700, 900, 149, (r, r2)).unwrap();
        assert!(w.verified);
        assert_eq!(w.edge_side, EdgeSide::XPrime);
        // i' below the large range
        let w = pair_split_witness(&fam, 700, 100, 149, (r, r2)).unwrap();
        assert!(w.verified);
        assert_eq!(w.edge_side, EdgeSide::X);
        // i' above the large range
        let w = pair_split_witness(&fam, 1200, 1900, 149, (r, r2)).unwrap();
        assert!(w.verified);
    }

    #[test]
    fn hp_pair_split_spacing_error() {
        let fam = SpecialFamily::Hp { n: 2000, tau: q(6, 25), mu: q(1, 20) };
        let err = pair_split_witness(&fam, 700, 705, 149, (q(1, 1000), q(2, 1000))).unwrap_err();
        assert!(matches!(err, Error::Precondition(ref m) if m.contains("r''")));
    }

    #[test]
    fn hp_intersection_example() {
        // N = 10, y = a_2, z = b_6, z' = b_4: the set is {c_4, c_5}
        let o = HpOracle { n: 10 };
        let m = hp_metric(10, q(6, 25), q(7, 100)).unwrap();
        let ib = neighborhood_intersection_ball(&o, &m, [2, 0, 1], 1, 5, 3);
        assert_eq!(ib.set, vec![3, 4]);
        assert_eq!(ib.ball.radius, q(1, 10));
        assert_eq!(ib.bound, q(1, 5));
        assert!(ib.within_bound);
        let same = neighborhood_intersection_ball(&o, &m, [2, 0, 1], 1, 5, 5);
        assert!(same.set.is_empty());
        assert_eq!(same.ball.radius, Q::zero());
    }

    #[test]
    fn gs_intersection_exhaustive() {
        let o = GsOracle::new(3, 2).unwrap();
        let m = gs_metric(3, 2).unwrap();
        let mut n = 0;
        for y in 0..9 {
            for z in 0..9 {
                for z2 in 0..9 {
                    assert!(neighborhood_intersection_ball(&o, &m, [2, 0, 1], y, z, z2).within_bound);
                    n += 1;
                }
            }
        }
        assert_eq!(n, 729);
    }
}
