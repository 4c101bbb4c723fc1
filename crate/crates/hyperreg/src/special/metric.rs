//! Metrics on the parts of a 3-partite graph, with the distinguished balls
//! X_sm, X_sm+, X_lg, X_lg+.

use num_traits::{One, Zero};
use serde::Serialize;

use crate::construct::gs::is_prime;
use crate::error::{Error, Result};
use crate::num::{self, q, Q};

/// How distances are computed.
#[derive(Clone, Debug)]
pub enum Distance {
    /// d(x,y) = p^-lambda(x,y) on F_p^n, lambda the common prefix length.
    Prefix { p: usize, n: usize },
    /// d(x_i,x_j) = |i-j| / N.
    Line { n: usize },
    /// Explicit table, checked to be a metric when loaded.
    Table(Vec<Vec<Q>>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MetricKind {
    Prefix,
    Line,
    Table,
}

/// A metric on one part together with the centres and radii of the
/// distinguished balls.
#[derive(Clone, Debug, Serialize)]
pub struct MetricPart {
    pub part: usize,
    pub size: usize,
    pub kind: MetricKind,
    #[serde(skip)]
    dist: Distance,
    pub x_sm: usize,
    #[serde(with = "num::qser")]
    pub r_sm: Q,
    pub x_lg: usize,
    #[serde(with = "num::qser")]
    pub r_lg: Q,
    #[serde(with = "num::qser")]
    pub mu: Q,
}

/// An open ball B_r(centre).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Ball {
    pub centre: usize,
    #[serde(with = "num::qser")]
    pub radius: Q,
}

fn prefix_len(p: usize, n: usize, x: usize, y: usize) -> usize {
    let mut k = 0;
    let mut scale = p.pow(n as u32);
    while k < n {
        scale /= p;
        if x / scale != y / scale {
            break;
        }
        k += 1;
    }
    k
}

impl MetricPart {
    /// Load a table after checking symmetry, identity, range and the triangle inequality.
    #[allow(clippy::too_many_arguments)]
    pub fn from_table(
        part: usize,
        rows: Vec<Vec<Q>>,
        x_sm: usize,
        r_sm: Q,
        x_lg: usize,
        r_lg: Q,
        mu: Q,
    ) -> Result<Self> {
        let size = rows.len();
        if let Some(i) = rows.iter().position(|r| r.len() != size) {
            return Err(Error::Metric(format!("row {i} has {} entries, expected {size}", rows[i].len())));
        }
        let m = MetricPart { part, size, kind: MetricKind::Table, dist: Distance::Table(rows), x_sm, r_sm, x_lg, r_lg, mu };
        m.check()?;
        m.check_centres()?;
        Ok(m)
    }

    fn check_centres(&self) -> Result<()> {
        for c in [self.x_sm, self.x_lg] {
            if c >= self.size {
                return Err(Error::OutOfRange { index: c, n: self.size });
            }
        }
        Ok(())
    }

    pub fn d(&self, x: usize, y: usize) -> Q {
        match &self.dist {
            Distance::Prefix { p, n } => {
                if x == y {
                    Q::zero()
                } else {
                    Q::new(1, (*p as i128).pow(prefix_len(*p, *n, x, y) as u32))
                }
            }
            Distance::Line { n } => Q::new((x as i128 - y as i128).abs(), *n as i128),
            Distance::Table(rows) => rows[x][y],
        }
    }

    /// Exhaustive metric check; the error names the first offending pair or triple.
    pub fn check(&self) -> Result<()> {
        let n = self.size;
        for x in 0..n {
            if !self.d(x, x).is_zero() {
                return Err(Error::Metric(format!("part {}: d({x},{x}) = {} is not 0", self.part, self.d(x, x))));
            }
            for y in 0..n {
                let v = self.d(x, y);
                if v < Q::zero() || v > Q::one() {
                    return Err(Error::Metric(format!("part {}: d({x},{y}) = {v} outside [0,1]", self.part)));
                }
                if v != self.d(y, x) {
                    return Err(Error::Metric(format!(
                        "part {}: asymmetric entry ({x},{y}): {v} vs {}",
                        self.part,
                        self.d(y, x)
                    )));
                }
                if x != y && v.is_zero() {
                    return Err(Error::Metric(format!("part {}: d({x},{y}) = 0 for distinct points", self.part)));
                }
            }
        }
        for x in 0..n {
            for y in 0..n {
                for z in 0..n {
                    if self.d(x, y) > self.d(x, z) + self.d(z, y) {
                        return Err(Error::Metric(format!("part {}: triangle inequality fails at ({x},{y},{z})", self.part)));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn is_ultrametric(&self) -> bool {
        let n = self.size;
        (0..n).all(|x| (0..n).all(|y| (0..n).all(|z| self.d(x, y) <= self.d(x, z).max(self.d(y, z)))))
    }

    /// B_r(x) = {y : d(x,y) < r}.
    pub fn ball(&self, x: usize, r: Q) -> Vec<usize> {
        if let Distance::Line { n } = self.dist {
            let k = (num::ceil(&(r * Q::from_integer(n as i128))) - 1).max(-1);
            if k < 0 {
                return Vec::new();
            }
            let k = k as usize;
            return (x.saturating_sub(k)..=(x + k).min(n - 1)).collect();
        }
        (0..self.size).filter(|&y| self.d(x, y) < r).collect()
    }

    pub fn closed_ball(&self, x: usize, r: Q) -> Vec<usize> {
        (0..self.size).filter(|&y| self.d(x, y) <= r).collect()
    }

    pub fn sm(&self) -> Vec<usize> {
        self.ball(self.x_sm, self.r_sm)
    }

    pub fn sm_plus(&self) -> Vec<usize> {
        self.ball(self.x_sm, self.r_sm + self.mu * self.mu)
    }

    pub fn lg(&self) -> Vec<usize> {
        self.ball(self.x_lg, self.r_lg)
    }

    pub fn lg_plus(&self) -> Vec<usize> {
        self.ball(self.x_lg, self.r_lg + self.mu * self.mu)
    }

    /// Radii at which the balls of this metric change, smallest first.
    pub fn realizable_radii(&self) -> Vec<Q> {
        let mut out: Vec<Q> = match &self.dist {
            Distance::Prefix { p, n } => (0..=*n).map(|i| Q::new(1, (*p as i128).pow(i as u32))).collect(),
            Distance::Line { n } => (1..=*n).map(|k| Q::new(k as i128, *n as i128)).collect(),
            Distance::Table(rows) => {
                let mut v: Vec<Q> = rows.iter().flatten().copied().filter(|d| !d.is_zero()).collect();
                v.sort();
                v.dedup();
                if let Some(&m) = v.first() {
                    v.insert(0, m / q(2, 1));
                }
                v
            }
        };
        out.sort();
        out.dedup();
        out
    }

    /// Smallest closed ball (centre among the points of the part) containing `set`.
    pub fn enclosing_ball(&self, set: &[usize]) -> Ball {
        let Some(&first) = set.first() else {
            return Ball { centre: 0, radius: Q::zero() };
        };
        match self.dist {
            Distance::Line { n } => {
                let lo = *set.iter().min().expect("nonempty");
                let hi = *set.iter().max().expect("nonempty");
                let half = (hi - lo).div_ceil(2);
                Ball { centre: hi - half, radius: Q::new(half as i128, n as i128) }
            }
            // in an ultrametric every point of the set is a centre of a smallest ball
            Distance::Prefix { .. } => {
                let radius = set.iter().map(|&y| self.d(first, y)).max().unwrap_or_else(Q::zero);
                Ball { centre: first, radius }
            }
            Distance::Table(_) => (0..self.size)
                .map(|c| Ball { centre: c, radius: set.iter().map(|&y| self.d(c, y)).max().unwrap_or_else(Q::zero) })
                .min_by(|a, b| a.radius.cmp(&b.radius).then(a.centre.cmp(&b.centre)))
                .expect("part is nonempty"),
        }
    }

    pub(crate) fn distance(&self) -> &Distance {
        &self.dist
    }
}

/// The ultrametric p^-lambda on F_p^n for each of the three parts, with
/// X_lg = X_lg+ the coset of H_1 through e_1 and X_sm = X_sm+ the coset of H_1 through e_2.
pub fn gs_metric(p: usize, n: usize) -> Result<[MetricPart; 3]> {
    if p < 3 || !is_prime(p) {
        return Err(Error::InvalidParameter(format!("p = {p} must be a prime at least 3")));
    }
    if n < 2 {
        return Err(Error::InvalidParameter("n must be at least 2 so that e_2 exists".into()));
    }
    let e1 = p.pow(n as u32 - 1);
    let e2 = p.pow(n as u32 - 2);
    let mu = q(1, (p * p) as i128);
    Ok([0, 1, 2].map(|part| MetricPart {
        part,
        size: p.pow(n as u32),
        kind: MetricKind::Prefix,
        dist: Distance::Prefix { p, n },
        x_sm: e2,
        r_sm: q(1, 2),
        x_lg: e1,
        r_lg: q(1, 2),
        mu,
    }))
}

/// The line metric |i-j|/N on each part of HP(N). Centres are x_floor(N/2) and
/// x_floor(3 mu N/2) (1-based), radii (1-tau)/2 and mu/2.
pub fn hp_metric(n: usize, tau: Q, mu: Q) -> Result<[MetricPart; 3]> {
    if !(tau > Q::zero() && tau < q(1, 4)) {
        return Err(Error::InvalidParameter(format!("tau = {tau} must lie in (0, 1/4)")));
    }
    if !(mu > Q::zero() && mu * q(3, 1) < tau) {
        return Err(Error::InvalidParameter(format!("mu = {mu} must lie in (0, tau/3)")));
    }
    let big = Q::from_integer(n as i128);
    let lg = n / 2;
    let sm = num::floor(&(q(3, 2) * mu * big)) as usize;
    if lg == 0 || sm == 0 {
        return Err(Error::InvalidParameter(format!("N = {n} too small for the centres")));
    }
    Ok([0, 1, 2].map(|part| MetricPart {
        part,
        size: n,
        kind: MetricKind::Line,
        dist: Distance::Line { n },
        x_sm: sm - 1,
        r_sm: mu / q(2, 1),
        x_lg: lg - 1,
        r_lg: (Q::one() - tau) / q(2, 1),
        mu,
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gs_distances() {
        let [a, _, _] = gs_metric(3, 2).unwrap();
        // (0,1) = 1, (0,2) = 2
        assert_eq!(a.d(1, 1), Q::zero());
        assert_eq!(a.d(1, 2), q(1, 3));
        assert_eq!(a.d(0, 3), Q::one());
        assert!(a.is_ultrametric());
        a.check().unwrap();
    }

    #[test]
    fn gs_ultrametric_exhaustive_p3_n2() {
        let [a, _, _] = gs_metric(3, 2).unwrap();
        let mut count = 0;
        for x in 0..9 {
            for y in 0..9 {
                for z in 0..9 {
                    assert!(a.d(x, y) <= a.d(x, z).max(a.d(y, z)));
                    count += 1;
                }
            }
        }
        assert_eq!(count, 729);
    }

    #[test]
    fn gs_balls_are_cosets() {
        let [a, _, _] = gs_metric(3, 3).unwrap();
        for x in 0..27 {
            assert_eq!(a.ball(x, Q::one()).len(), 9);
            assert_eq!(a.ball(x, q(1, 3)).len(), 3);
            assert_eq!(a.ball(x, q(1, 9)).len(), 1);
            assert_eq!(a.ball(x, q(1, 2)).len(), 9);
        }
        assert_eq!(a.lg(), (9..18).collect::<Vec<_>>());
        assert_eq!(a.sm(), (0..9).collect::<Vec<_>>());
        assert_eq!(a.lg(), a.lg_plus());
    }

    #[test]
    fn gs_rejects_bad_p() {
        assert!(gs_metric(2, 2).is_err());
        assert!(gs_metric(9, 2).is_err());
    }

    #[test]
    fn hp_examples() {
        let [a, _, _] = hp_metric(100, q(1, 5), q(1, 20)).unwrap();
        assert_eq!(a.d(0, 0), Q::zero());
        assert_eq!(a.d(9, 29), q(1, 5));
        // x_7 (1-based) with radius 0.025: indices 5..9 (1-based)
        assert_eq!(a.x_sm, 6);
        assert_eq!(a.r_sm, q(1, 40));
        assert_eq!(a.sm(), vec![4, 5, 6, 7, 8]);
        assert_eq!(a.x_lg, 49);
        assert!(hp_metric(100, q(1, 4), q(1, 20)).is_err());
        assert!(hp_metric(100, q(1, 5), q(1, 10)).is_err());
    }

    #[test]
    fn line_ball_matches_filter() {
        let [a, _, _] = hp_metric(50, q(1, 5), q(1, 20)).unwrap();
        for x in [0, 7, 25, 49] {
            for r in [q(1, 100), q(1, 50), q(3, 100), q(1, 3), Q::one()] {
                let slow: Vec<usize> = (0..50).filter(|&y| a.d(x, y) < r).collect();
                assert_eq!(a.ball(x, r), slow);
            }
        }
    }

    #[test]
    fn broken_table_names_pair() {
        let mut rows = vec![vec![q(1, 2); 3]; 3];
        for (i, row) in rows.iter_mut().enumerate() {
            row[i] = Q::zero();
        }
        rows[0][2] = q(1, 3);
        let err = MetricPart::from_table(0, rows, 0, q(1, 2), 1, q(1, 2), q(1, 10)).unwrap_err();
        assert_eq!(err, Error::Metric("part 0: asymmetric entry (0,2): 1/3 vs 1/2".into()));
    }

    #[test]
    fn enclosing_balls() {
        let [a, _, _] = hp_metric(10, q(6, 25), q(7, 100)).unwrap();
        let b = a.enclosing_ball(&[3, 4]);
        assert_eq!(b.radius, q(1, 10));
        let b = a.enclosing_ball(&[3, 5]);
        assert_eq!((b.centre, b.radius), (4, q(1, 10)));
        assert_eq!(a.enclosing_ball(&[]).radius, Q::zero());
    }
}
