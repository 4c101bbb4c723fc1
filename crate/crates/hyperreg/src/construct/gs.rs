//! Vectors over F_p^n encoded as base-p integers, most significant coordinate first.

use crate::error::{Error, Result};

pub fn is_prime(p: usize) -> bool {
    p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| p % d != 0)
}

/// Arithmetic on F_p^n with the encoding above.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Fpn {
    pub p: usize,
    pub n: usize,
}

impl Fpn {
    pub fn new(p: usize, n: usize) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::InvalidParameter(format!("{p} is not prime")));
        }
        if n == 0 {
            return Err(Error::InvalidParameter("dimension must be positive".into()));
        }
        Ok(Fpn { p, n })
    }

    pub fn size(&self) -> usize {
        self.p.pow(self.n as u32)
    }

    /// Coordinates 1..n (index 0 is the first coordinate).
    pub fn digits(&self, mut x: usize) -> Vec<usize> {
        let mut d = vec![0; self.n];
        for i in (0..self.n).rev() {
            d[i] = x % self.p;
            x /= self.p;
        }
        d
    }

    pub fn encode(&self, d: &[usize]) -> usize {
        d.iter().fold(0, |acc, &c| acc * self.p + c % self.p)
    }

    pub fn add(&self, x: usize, y: usize) -> usize {
        let (a, b) = (self.digits(x), self.digits(y));
        self.encode(&a.iter().zip(&b).map(|(u, v)| (u + v) % self.p).collect::<Vec<_>>())
    }

    pub fn neg(&self, x: usize) -> usize {
        self.encode(&self.digits(x).iter().map(|&u| (self.p - u) % self.p).collect::<Vec<_>>())
    }

    /// Membership in A(p,n): the first nonzero coordinate equals 1.
    pub fn in_a(&self, x: usize) -> bool {
        self.digits(x).into_iter().find(|&c| c != 0) == Some(1)
    }

    /// Length of the longest common prefix of coordinates.
    pub fn lambda(&self, x: usize, y: usize) -> usize {
        let (a, b) = (self.digits(x), self.digits(y));
        a.iter().zip(&b).take_while(|(u, v)| u == v).count()
    }

    /// The set A(p,n), enumerated by scanning every vector.
    pub fn a_set(&self) -> Vec<usize> {
        (0..self.size()).filter(|&x| self.in_a(x)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn a_set_sizes_match_closed_form() {
        for n in 1..=3 {
            let f = Fpn::new(3, n).unwrap();
            assert_eq!(f.a_set().len(), (3usize.pow(n as u32) - 1) / 2);
        }
        assert_eq!(Fpn::new(5, 2).unwrap().a_set().len(), 6);
    }

    #[test]
    fn encoding_is_msb_first() {
        let f = Fpn::new(3, 2).unwrap();
        assert_eq!(f.digits(5), vec![1, 2]);
        assert_eq!(f.encode(&[1, 2]), 5);
        assert_eq!(f.add(5, 4), f.encode(&[2, 0]));
        assert_eq!(f.add(5, f.neg(5)), 0);
        assert_eq!(f.lambda(f.encode(&[0, 1]), f.encode(&[0, 2])), 1);
    }

    #[test]
    fn rejects_composite() {
        assert!(Fpn::new(4, 2).is_err());
    }
}
