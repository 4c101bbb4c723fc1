//! Exact rationals, seeded random streams and small numeric helpers.

use num_rational::Ratio;
use num_traits::{Signed, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

/// Exact rational used for every reported density and deviation.
pub type Q = Ratio<i128>;

pub fn q(n: i128, d: i128) -> Q {
    Q::new(n, d)
}

pub fn qi(n: i128) -> Q {
    Q::from_integer(n)
}

pub fn to_f64(x: &Q) -> f64 {
    *x.numer() as f64 / *x.denom() as f64
}

pub fn abs(x: &Q) -> Q {
    x.abs()
}

/// Best rational approximation with denominator at most `max_den`, used to
/// read decimal command line parameters.
pub fn from_f64(x: f64, max_den: i128) -> Q {
    if x == 0.0 {
        return Q::zero();
    }
    let mut best = Q::from_integer(x.round() as i128);
    let mut best_err = (x - to_f64(&best)).abs();
    for d in 1..=max_den {
        let n = (x * d as f64).round() as i128;
        let c = Q::new(n, d);
        let err = (x - to_f64(&c)).abs();
        if err < best_err {
            best = c;
            best_err = err;
            if err == 0.0 {
                break;
            }
        }
    }
    best
}

/// Parse "a/b", an integer, or a decimal into an exact rational.
pub fn parse_q(s: &str) -> Option<Q> {
    let s = s.trim();
    if let Some((a, b)) = s.split_once('/') {
        let a: i128 = a.trim().parse().ok()?;
        let b: i128 = b.trim().parse().ok()?;
        if b == 0 {
            return None;
        }
        return Some(Q::new(a, b));
    }
    if let Ok(i) = s.parse::<i128>() {
        return Some(Q::from_integer(i));
    }
    if let Some((ip, fp)) = s.split_once('.') {
        let neg = ip.starts_with('-');
        let ipv: i128 = if ip.is_empty() || ip == "-" { 0 } else { ip.parse().ok()? };
        if fp.is_empty() || !fp.chars().all(|c| c.is_ascii_digit()) || fp.len() > 30 {
            return None;
        }
        let den = 10i128.checked_pow(fp.len() as u32)?;
        let fpv: i128 = fp.parse().ok()?;
        let mag = ipv.abs() * den + fpv;
        return Some(Q::new(if neg { -mag } else { mag }, den));
    }
    let x: f64 = s.parse().ok()?;
    Some(from_f64(x, 1_000_000))
}

pub fn ceil(x: &Q) -> i128 {
    x.ceil().to_integer()
}

pub fn floor(x: &Q) -> i128 {
    x.floor().to_integer()
}

/// Deterministic generator for a named sub-stream of a seed.
pub fn stream(seed: u64, label: &str) -> ChaCha8Rng {
    let mut h = Sha256::new();
    h.update(seed.to_le_bytes());
    h.update(label.as_bytes());
    let out = h.finalize();
    let mut key = [0u8; 32];
    key.copy_from_slice(&out[..32]);
    ChaCha8Rng::from_seed(key)
}

/// A derived 64-bit seed for a named sub-task.
pub fn sub_seed(seed: u64, label: &str) -> u64 {
    use rand::RngCore;
    stream(seed, label).next_u64()
}

/// Serialize a rational as the string "n/d" (or "n" when integral).
pub mod qser {
    use super::Q;
    use serde::Serializer;

    pub fn serialize<S: Serializer>(x: &Q, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&x.to_string())
    }
}

pub mod qvec {
    use super::Q;
    use serde::ser::SerializeSeq;
    use serde::Serializer;

    pub fn serialize<S: Serializer>(xs: &[Q], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(xs.len()))?;
        for x in xs {
            seq.serialize_element(&x.to_string())?;
        }
        seq.end()
    }
}

pub mod qopt {
    use super::Q;
    use serde::Serializer;

    pub fn serialize<S: Serializer>(x: &Option<Q>, s: S) -> Result<S::Ok, S::Error> {
        match x {
            Some(v) => s.serialize_str(&v.to_string()),
            None => s.serialize_none(),
        }
    }
}

pub fn is_zero(x: &Q) -> bool {
    x.is_zero()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fractions_and_decimals() {
        assert_eq!(parse_q("3/4"), Some(q(3, 4)));
        assert_eq!(parse_q("0.05"), Some(q(1, 20)));
        assert_eq!(parse_q("-1.5"), Some(q(-3, 2)));
        assert_eq!(parse_q("7"), Some(qi(7)));
        assert_eq!(parse_q("1/0"), None);
    }

    #[test]
    fn streams_are_reproducible_and_distinct() {
        use rand::RngCore;
        let a = stream(7, "x").next_u64();
        assert_eq!(a, stream(7, "x").next_u64());
        assert_ne!(a, stream(7, "y").next_u64());
    }

    #[test]
    fn ceil_floor() {
        assert_eq!(ceil(&q(7, 3)), 3);
        assert_eq!(floor(&q(7, 3)), 2);
        assert_eq!(ceil(&qi(2)), 2);
    }
}
