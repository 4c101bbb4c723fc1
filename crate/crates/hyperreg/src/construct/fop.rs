//! Witnesses for the functional order property and the negation transform.

use serde::Serialize;

use crate::construct::families::{f_index, f_value};
use crate::core::ThreeGraph;
use crate::error::{Error, Result};

/// An l-FOP2 witness: vertices a_i, c_k and, for every f: [l]^2 -> [l]
/// (numbered as in F(l)), vertices b_j^f with R(a_i, b_j^f, c_k) iff k <= f(i,j).
/// R is the edge relation of the host, or its negation when `negated` is set.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Fop2Witness {
    pub l: usize,
    pub a: Vec<usize>,
    pub c: Vec<usize>,
    /// `b[idx][j]` is b_j^f for the function numbered `idx`.
    pub b: Vec<Vec<usize>>,
    pub negated: bool,
}

pub fn function_count(l: usize) -> Result<usize> {
    let mut out = 1usize;
    for _ in 0..l * l {
        out = out.checked_mul(l).ok_or_else(|| Error::InvalidParameter(format!("{l}^({l}^2) overflows")))?;
    }
    Ok(out)
}

impl Fop2Witness {
    /// The witness sitting on the vertices of F(l) as laid out by the builder.
    pub fn canonical(l: usize) -> Result<Self> {
        let count = function_count(l)?;
        let nb = count * l;
        Ok(Fop2Witness {
            l,
            a: (0..l).collect(),
            b: (0..count).map(|idx| (0..l).map(|j| l + idx * l + j).collect()).collect(),
            c: (0..l).map(|k| l + nb + k).collect(),
            negated: false,
        })
    }

    fn relation(&self, host: &ThreeGraph, x: usize, y: usize, z: usize) -> bool {
        host.contains(x, y, z) != self.negated
    }

    pub fn verify(&self, host: &ThreeGraph) -> Result<()> {
        let l = self.l;
        let count = function_count(l)?;
        if self.a.len() != l || self.c.len() != l || self.b.len() != count || self.b.iter().any(|v| v.len() != l) {
            return Err(Error::InvalidWitness("witness has the wrong shape".into()));
        }
        for (idx, bs) in self.b.iter().enumerate() {
            for (i, &a) in self.a.iter().enumerate() {
                for (j, &b) in bs.iter().enumerate() {
                    let f = f_value(l, idx, i, j);
                    for (k, &c) in self.c.iter().enumerate() {
                        if self.relation(host, a, b, c) != (k <= f) {
                            return Err(Error::InvalidWitness(format!(
                                "function {idx}: a_{i} b_{j} c_{k} disagrees with f = {f}"
                            )));
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

/// Turn an l-FOP2 witness into an (l-1)-FOP2 witness for the negated relation.
///
/// With 0-based indices: u_k = c_{l-1-k}, v_i = a_i and w_j^f = b_j^g where
/// g(i,j) = l-2-f(i,j) on [l-1]^2 and 0 elsewhere.
pub fn fop2_negation_transform(w: &Fop2Witness, host: &ThreeGraph) -> Result<Fop2Witness> {
    w.verify(host)?;
    let l = w.l;
    if l == 0 {
        return Err(Error::InvalidWitness("a 0-witness has no negation".into()));
    }
    let lp = l - 1;
    let count = function_count(lp)?;
    let b = (0..count)
        .map(|idx| {
            let table: Vec<usize> = (0..l * l)
                .map(|t| {
                    let (i, j) = (t / l, t % l);
                    if i < lp && j < lp {
                        l - 2 - f_value(lp, idx, i, j)
                    } else {
                        0
                    }
                })
                .collect();
            w.b[f_index(l, &table)][..lp].to_vec()
        })
        .collect();
    let out = Fop2Witness {
        l: lp,
        a: w.a[..lp].to_vec(),
        c: (0..lp).map(|k| w.c[l - 1 - k]).collect(),
        b,
        negated: !w.negated,
    };
    out.verify(host)?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construct::{build_canonical, Family, FamilySpec};

    fn f(l: usize) -> ThreeGraph {
        build_canonical(&FamilySpec::new(Family::F, l), 1 << 16).unwrap().three().unwrap()
    }

    #[test]
    fn canonical_witness_verifies() {
        for l in 1..=2 {
            Fop2Witness::canonical(l).unwrap().verify(&f(l)).unwrap();
        }
    }

    #[test]
    fn transform_from_two() {
        let h = f(2);
        let w = fop2_negation_transform(&Fop2Witness::canonical(2).unwrap(), &h).unwrap();
        assert_eq!(w.l, 1);
        assert!(w.negated);
        let w0 = fop2_negation_transform(&w, &h).unwrap();
        assert_eq!(w0.l, 0);
        assert!(!w0.negated);
        w0.verify(&h).unwrap();
    }

    #[test]
    fn twice_from_three() {
        let h = f(3);
        let w = Fop2Witness::canonical(3).unwrap();
        let w1 = fop2_negation_transform(&w, &h).unwrap();
        let w2 = fop2_negation_transform(&w1, &h).unwrap();
        assert_eq!(w2.l, 1);
        assert!(!w2.negated);
    }

    #[test]
    fn rejects_bad_witness() {
        let h = f(2);
        let mut w = Fop2Witness::canonical(2).unwrap();
        w.c.swap(0, 1);
        assert!(matches!(fop2_negation_transform(&w, &h), Err(Error::InvalidWitness(_))));
    }
}
