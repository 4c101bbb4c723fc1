//! Near-partitions of an integer interval into open sub-balls.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::num::{ceil, floor, q, Q};

/// The open ball (centre - radius, centre + radius) of integers.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct IntBall {
    pub centre: i64,
    pub radius: i64,
}

impl IntBall {
    pub fn new(centre: i64, radius: i64) -> Self {
        IntBall { centre, radius }
    }

    pub fn lo(&self) -> i64 {
        self.centre - self.radius + 1
    }

    pub fn hi(&self) -> i64 {
        self.centre + self.radius - 1
    }

    pub fn contains(&self, x: i64) -> bool {
        (x - self.centre).abs() < self.radius
    }

    pub fn points(&self) -> std::ops::RangeInclusive<i64> {
        self.lo()..=self.hi()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IntervalSlicing {
    pub balls: Vec<IntBall>,
    /// Points of the interval outside every ball.
    pub uncovered: Vec<i64>,
    /// Whether the last two midpoint balls were replaced to reach the end.
    pub merged: bool,
}

/// Cover the open interval (alpha, beta) of [1, n] by disjoint open balls of
/// radius between r_small*n/3 and r_small*n, missing at most two points per ball.
///
/// Balls of radius d1 = ceil(r_small*n/3) sit at alpha + (2j-1)d1. The last two
/// (or the only one) are then replaced by one ball reaching up to beta, unless that ball would be
/// too wide, in which case the tail is cut into two balls instead.
pub fn slice_interval(n: i64, r_big: Q, r_small: Q, alpha: i64, beta: i64) -> Result<IntervalSlicing> {
    if r_small <= q(0, 1) || r_small >= r_big {
        return Err(Error::InvalidParameter("need 0 < r_small < r_big".into()));
    }
    if alpha >= beta - 1 || alpha < 0 || beta > n + 1 {
        return Err(Error::InvalidParameter(format!("({alpha},{beta}) is not an interval of [1,{n}]")));
    }
    let scale = Q::from_integer(n as i128);
    if r_small * scale < q(1, 1) {
        return Err(Error::InvalidParameter("r_small * n must be at least 1".into()));
    }
    let max_r = floor(&(r_small * scale)) as i64;
    let d1 = ceil(&(r_small * scale / q(3, 1))) as i64;
    let finish = |balls: Vec<IntBall>, merged| {
        let uncovered = (alpha + 1..beta).filter(|&x| !balls.iter().any(|b| b.contains(x))).collect();
        IntervalSlicing { balls, uncovered, merged }
    };

    // the interval is itself an admissible ball
    if (beta - alpha) % 2 == 0 {
        let r = (beta - alpha) / 2;
        if r <= max_r && r >= d1 {
            return Ok(finish(vec![IntBall::new(alpha + r, r)], false));
        }
    }
    let s = (beta - alpha) / (2 * d1);
    if s == 0 {
        return Err(Error::Infeasible(format!("interval ({alpha},{beta}) cannot host a ball of radius {d1}")));
    }
    let mut balls: Vec<IntBall> = (1..=s).map(|j| IntBall::new(alpha + (2 * j - 1) * d1, d1)).collect();
    let keep = (s as usize).saturating_sub(2);
    let start = if keep == 0 { alpha } else { balls[keep].centre - d1 };
    let d1p = (beta - start) / 2;
    balls.truncate(keep);
    if d1p <= max_r {
        balls.push(IntBall::new(start + d1p, d1p));
    } else {
        let len = beta - start;
        let a = len / 4;
        let b = (len - 2 * a) / 2;
        balls.push(IntBall::new(start + a, a));
        balls.push(IntBall::new(start + 2 * a + b, b));
    }
    let merged = s >= 2;
    Ok(finish(balls, merged))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn check(n: i64, r_big: Q, r_small: Q, alpha: i64, beta: i64, out: &IntervalSlicing) {
        let scale = Q::from_integer(n as i128);
        let m = out.balls.len();
        for (i, b) in out.balls.iter().enumerate() {
            assert!(b.lo() > alpha && b.hi() < beta);
            let r = Q::from_integer(b.radius as i128);
            assert!(r <= r_small * scale && r * q(3, 1) >= r_small * scale);
            for c in &out.balls[i + 1..] {
                assert!(b.hi() < c.lo() || c.hi() < b.lo());
            }
        }
        assert!(out.uncovered.len() <= 2 * m);
        assert!(Q::from_integer(m as i128) <= q(4, 1) * r_big / r_small);
    }

    #[test]
    fn hundred_example() {
        let out = slice_interval(100, q(1, 5), q(6, 100), 10, 50).unwrap();
        check(100, q(1, 5), q(6, 100), 10, 50, &out);
        assert_eq!(out.balls.len(), 9);
        assert_eq!(*out.balls.last().unwrap(), IntBall::new(46, 4));
        assert!(out.merged);
    }

    #[test]
    fn interval_is_one_ball() {
        let out = slice_interval(100, q(1, 10), q(1, 10) - q(1, 1000), 40, 60).unwrap();
        assert!(out.balls.len() <= 2 && out.uncovered.len() <= 2 * out.balls.len());
    }

    #[test]
    fn too_small() {
        assert!(matches!(slice_interval(100, q(1, 2), q(3, 10), 10, 14), Err(Error::Infeasible(_))));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]
        #[test]
        fn leftover_bound(n in 30i64..400, a in 1i64..30, b in 1i64..30, lo in 0i64..100) {
            let (a, b) = if a < b { (a, b) } else if a > b { (b, a) } else { return Ok(()) };
            let r_small = q(a as i128, 60);
            let r_big = q(b as i128, 60);
            let rad = ceil(&(r_big * Q::from_integer(n as i128))) as i64;
            prop_assume!(rad >= 3 && r_small * Q::from_integer(n as i128) >= q(1, 1));
            let beta = (lo + 2 * rad).min(n + 1);
            prop_assume!(lo < beta - 1);
            if let Ok(out) = slice_interval(n, r_big, r_small, lo, beta) {
                check(n, r_big, r_small, lo, beta, &out);
            }
        }
    }
}
