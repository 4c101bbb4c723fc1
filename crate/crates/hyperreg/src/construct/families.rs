//! The canonical families. All 3-partite families lay out their parts
//! consecutively (part A first, then B, then C) and carry that partition.
//!
//! Index conventions (0-based throughout):
//! - `HALF_GRAPH(k)`: a_i b_j for i <= j.
//! - `POWERSET(k)`: right vertex b_S is the bitmask S of [k]; a_i b_S iff i in S.
//! - `V(k)`: a_S with S a bitmask over [k]x[k] (bit v*k+w), a_S b_v c_w iff (v,w) in S.
//! - `HBAR(k)`: a_i b_j c_l iff j <= l.
//! - `UBAR(k)`: a_i b_S c_j iff j in S.  `USTAR(k)`: one a, a b_S c_j iff j in S.
//! - `HSTAR(k)`: one a, a b_i c_j iff i <= j.
//! - `F(l)`: functions f:[l]^2 -> [l] are numbered by their value table read in
//!   lexicographic order of (i,j), most significant first; b_j^f sits at B-offset
//!   `index(f)*l + j`; a_i b_j^f c_k iff k <= f(i,j).
//! - `HP(N)`: a_u b_v c_w iff u+v+w >= N+2 in 1-based labels, i.e. u+v+w >= N-1 here.
//! - `GS(p,n)`: a_g b_g' c_g'' iff g+g'+g'' lies in A(p,n).
//! - `W(n)`: a_i b_j c_S iff j in S.  `W1(n)`: a_S b_j c_k iff j = k in S.
//!   `W2(n)`: a_i b_j c_k iff i <= j and j = k.
//! - `TENSOR(n, G)`: parts U, W (the sides of G) and c_1..c_n; u w c_i iff uw in E(G).
//! - `VCFOP_EXAMPLE(k, n)`: parts U, W (size n) and Z = Z_1..Z_k (size n each);
//!   K2[U,W] is randomly sliced into P^1..P^k and u w z (z in Z_i) is an edge iff uw lies in some P^a with a <= i.

use serde::{Deserialize, Serialize};

use crate::construct::gs::Fpn;
use crate::construct::slicing::slice_bipartite;
use crate::core::{BipartiteGraph, ThreeGraph, TripartiteOracle};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Family {
    HalfGraph,
    PowersetGraph,
    V,
    Hbar,
    Ubar,
    Ustar,
    Hstar,
    F,
    Hp,
    Gs,
    W,
    W1,
    W2,
    Tensor,
    VcfopExample,
}

impl std::str::FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.to_ascii_uppercase().replace('-', "_").as_str() {
            "HALF_GRAPH" | "H" => Family::HalfGraph,
            "POWERSET_GRAPH" | "POWERSET" | "U" => Family::PowersetGraph,
            "V" => Family::V,
            "HBAR" => Family::Hbar,
            "UBAR" => Family::Ubar,
            "USTAR" => Family::Ustar,
            "HSTAR" => Family::Hstar,
            "F" => Family::F,
            "HP" => Family::Hp,
            "GS" => Family::Gs,
            "W" => Family::W,
            "W1" => Family::W1,
            "W2" => Family::W2,
            "TENSOR" => Family::Tensor,
            "VCFOP_EXAMPLE" | "VCFOP" => Family::VcfopExample,
            other => return Err(Error::InvalidParameter(format!("unknown family {other}"))),
        })
    }
}

/// A family name with its integer parameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FamilySpec {
    pub family: Family,
    pub k: usize,
    pub n: usize,
    pub p: usize,
    #[serde(skip)]
    pub graph: Option<BipartiteGraph>,
    pub seed: u64,
}

impl FamilySpec {
    pub fn new(family: Family, k: usize) -> Self {
        FamilySpec { family, k, n: 0, p: 0, graph: None, seed: 0 }
    }

    pub fn gs(p: usize, n: usize) -> Self {
        FamilySpec { family: Family::Gs, k: 0, n, p, graph: None, seed: 0 }
    }

    pub fn tensor(n: usize, g: BipartiteGraph) -> Self {
        FamilySpec { family: Family::Tensor, k: 0, n, p: 0, graph: Some(g), seed: 0 }
    }

    pub fn vcfop(k: usize, n: usize, seed: u64) -> Self {
        FamilySpec { family: Family::VcfopExample, k, n, p: 0, graph: None, seed }
    }

    /// Number of vertices the construction would produce.
    pub fn vertex_count(&self) -> Result<usize> {
        let k = self.k;
        let pow2 = |e: usize| -> Result<usize> {
            1usize
                .checked_shl(e as u32)
                .filter(|_| e < usize::BITS as usize)
                .ok_or_else(|| Error::VertexCap { needed: usize::MAX, cap: 0 })
        };
        Ok(match self.family {
            Family::HalfGraph => 2 * k,
            Family::PowersetGraph => k + pow2(k)?,
            Family::V => pow2(k * k)? + 2 * k,
            Family::Hbar | Family::Hp => 3 * k,
            Family::Ubar => 2 * k + pow2(k)?,
            Family::Ustar => 1 + k + pow2(k)?,
            Family::Hstar => 1 + 2 * k,
            Family::F => {
                let funcs = (k as u128).checked_pow((k * k) as u32).unwrap_or(u128::MAX);
                let b = funcs.saturating_mul(k as u128);
                usize::try_from(b.saturating_add(2 * k as u128)).unwrap_or(usize::MAX)
            }
            Family::Gs => 3 * self.p.checked_pow(self.n as u32).unwrap_or(usize::MAX / 4),
            Family::W => 2 * self.n + pow2(self.n)?,
            Family::W1 => pow2(self.n)? + 2 * self.n,
            Family::W2 => 3 * self.n,
            Family::Tensor => {
                let g = self.graph.as_ref().ok_or_else(|| {
                    Error::InvalidParameter("TENSOR needs an attached bipartite graph".into())
                })?;
                g.left() + g.right() + self.n
            }
            Family::VcfopExample => 2 * self.n + k * self.n,
        })
    }

    fn validate(&self) -> Result<()> {
        let positive = |x: usize, what: &str| {
            if x == 0 {
                Err(Error::InvalidParameter(format!("{what} must be positive")))
            } else {
                Ok(())
            }
        };
        match self.family {
            Family::Gs => {
                if self.p < 3 {
                    return Err(Error::InvalidParameter("GS needs a prime p >= 3".into()));
                }
                Fpn::new(self.p, self.n).map(|_| ())
            }
            Family::W | Family::W1 | Family::W2 | Family::Tensor => positive(self.n, "n"),
            Family::VcfopExample => positive(self.k, "k").and(positive(self.n, "n")),
            _ => positive(self.k, "k"),
        }
    }
}

/// Output of [`build_canonical`].
#[derive(Clone, Debug, PartialEq)]
pub enum Built {
    Three(ThreeGraph),
    Bip(BipartiteGraph),
}

impl Built {
    pub fn three(self) -> Option<ThreeGraph> {
        match self {
            Built::Three(g) => Some(g),
            Built::Bip(_) => None,
        }
    }

    pub fn bip(self) -> Option<BipartiteGraph> {
        match self {
            Built::Bip(g) => Some(g),
            Built::Three(_) => None,
        }
    }
}

pub const DEFAULT_VERTEX_CAP: usize = 1 << 16;

/// Value f(i,j) (0-based) of the function numbered `idx` on [l]^2 -> [l].
pub fn f_value(l: usize, idx: usize, i: usize, j: usize) -> usize {
    let pos = i * l + j;
    let shift = l * l - 1 - pos;
    (idx / l.pow(shift as u32)) % l
}

/// Index of a function given by its value table in lexicographic (i,j) order.
pub fn f_index(l: usize, table: &[usize]) -> usize {
    table.iter().fold(0, |acc, &v| acc * l + v)
}

pub fn build_canonical(spec: &FamilySpec, vertex_cap: usize) -> Result<Built> {
    spec.validate()?;
    let nv = spec.vertex_count()?;
    if nv > vertex_cap {
        return Err(Error::VertexCap { needed: nv, cap: vertex_cap });
    }
    let k = spec.k;
    let n = spec.n;
    let g = match spec.family {
        Family::HalfGraph => return Ok(Built::Bip(BipartiteGraph::from_fn(k, k, |i, j| i <= j))),
        Family::PowersetGraph => {
            return Ok(Built::Bip(BipartiteGraph::from_fn(k, 1 << k, |i, s| s >> i & 1 == 1)))
        }
        Family::V => ThreeGraph::tripartite_from_fn([1 << (k * k), k, k], |s, v, w| {
            s >> (v * k + w) & 1 == 1
        }),
        Family::Hbar => ThreeGraph::tripartite_from_fn([k, k, k], |_, j, l| j <= l),
        Family::Ubar => ThreeGraph::tripartite_from_fn([k, 1 << k, k], |_, s, j| s >> j & 1 == 1),
        Family::Ustar => ThreeGraph::tripartite_from_fn([1, 1 << k, k], |_, s, j| s >> j & 1 == 1),
        Family::Hstar => ThreeGraph::tripartite_from_fn([1, k, k], |_, i, j| i <= j),
        Family::F => {
            let funcs = k.pow((k * k) as u32);
            ThreeGraph::tripartite_from_fn([k, funcs * k, k], |i, b, c| {
                let (idx, j) = (b / k, b % k);
                c <= f_value(k, idx, i, j)
            })
        }
        Family::Hp => ThreeGraph::tripartite_from_fn([k, k, k], |u, v, w| u + v + w + 1 >= k),
        Family::Gs => {
            let o = GsOracle::new(spec.p, n)?;
            crate::core::materialize(&o)
        }
        Family::W => ThreeGraph::tripartite_from_fn([n, n, 1 << n], |_, j, s| s >> j & 1 == 1),
        Family::W1 => {
            ThreeGraph::tripartite_from_fn([1 << n, n, n], |s, j, l| j == l && s >> j & 1 == 1)
        }
        Family::W2 => ThreeGraph::tripartite_from_fn([n, n, n], |i, j, l| i <= j && j == l),
        Family::Tensor => {
            let gr = spec.graph.as_ref().expect("validated by vertex_count");
            ThreeGraph::tripartite_from_fn([gr.left(), gr.right(), n], |u, w, _| gr.has(u, w))
        }
        Family::VcfopExample => {
            let colour = vcfop_colouring(k, n, spec.seed);
            ThreeGraph::tripartite_from_fn([n, n, k * n], |u, w, z| colour[u * n + w] <= z / n)
        }
    };
    Ok(Built::Three(g))
}

/// Colour (0-based part index) of each pair u*n+w of K2[U,W] in the VCFOP example.
pub fn vcfop_colouring(k: usize, n: usize, seed: u64) -> Vec<usize> {
    let slices = slice_bipartite(&BipartiteGraph::complete(n, n), k, seed, None)
        .expect("k is positive");
    let mut colour = vec![0; n * n];
    for (a, part) in slices.parts.iter().enumerate() {
        for &(u, w) in part {
            colour[u * n + w] = a;
        }
    }
    colour
}

/// HP(N) as an edge predicate on local indices.
#[derive(Clone, Copy, Debug)]
pub struct HpOracle {
    pub n: usize,
}

impl TripartiteOracle for HpOracle {
    fn part_sizes(&self) -> [usize; 3] {
        [self.n; 3]
    }

    fn has(&self, a: usize, b: usize, c: usize) -> bool {
        a + b + c + 1 >= self.n
    }
}

/// GS_p(n) as an edge predicate on local indices.
#[derive(Clone, Debug)]
pub struct GsOracle {
    pub field: Fpn,
    digits: Vec<Vec<usize>>,
    in_a: Vec<bool>,
}

impl GsOracle {
    pub fn new(p: usize, n: usize) -> Result<Self> {
        let field = Fpn::new(p, n)?;
        let size = field.size();
        let digits = (0..size).map(|x| field.digits(x)).collect();
        let in_a = (0..size).map(|x| field.in_a(x)).collect();
        Ok(GsOracle { field, digits, in_a })
    }

    pub fn sum3(&self, a: usize, b: usize, c: usize) -> usize {
        let p = self.field.p;
        let (x, y, z) = (&self.digits[a], &self.digits[b], &self.digits[c]);
        (0..self.field.n).fold(0, |acc, i| acc * p + (x[i] + y[i] + z[i]) % p)
    }

    pub fn in_a(&self, x: usize) -> bool {
        self.in_a[x]
    }
}

impl TripartiteOracle for GsOracle {
    fn part_sizes(&self) -> [usize; 3] {
        [self.field.size(); 3]
    }

    fn has(&self, a: usize, b: usize, c: usize) -> bool {
        self.in_a[self.sum3(a, b, c)]
    }
}

/// H-bar(k) as an edge predicate on local indices.
#[derive(Clone, Copy, Debug)]
pub struct HbarOracle {
    pub k: usize,
}

impl TripartiteOracle for HbarOracle {
    fn part_sizes(&self) -> [usize; 3] {
        [self.k; 3]
    }

    fn has(&self, _a: usize, b: usize, c: usize) -> bool {
        b <= c
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn three(spec: FamilySpec) -> ThreeGraph {
        build_canonical(&spec, DEFAULT_VERTEX_CAP).unwrap().three().unwrap()
    }

    #[test]
    fn hp5_threshold() {
        let g = three(FamilySpec::new(Family::Hp, 5));
        // a_1 b_1 c_5 and a_1 b_1 c_4 in 1-based labels
        assert!(g.contains(0, 5, 10 + 4));
        assert!(!g.contains(0, 5, 10 + 3));
    }

    #[test]
    fn hbar2_edges() {
        let g = three(FamilySpec::new(Family::Hbar, 2));
        assert_eq!(g.edge_count(), 6);
        for k in 1..6 {
            assert_eq!(three(FamilySpec::new(Family::Hbar, k)).edge_count(), k * k * (k + 1) / 2);
        }
    }

    #[test]
    fn gs_predicate_matches_direct_sum() {
        for n in 1..=2 {
            let g = three(FamilySpec::gs(3, n));
            let f = Fpn::new(3, n).unwrap();
            let s = f.size();
            for a in 0..s {
                for b in 0..s {
                    for c in 0..s {
                        let direct = f.in_a(f.add(f.add(a, b), c));
                        assert_eq!(g.contains(a, s + b, 2 * s + c), direct);
                    }
                }
            }
        }
    }

    #[test]
    fn f_function_numbering() {
        assert_eq!(f_value(2, f_index(2, &[1, 0, 0, 1]), 0, 0), 1);
        assert_eq!(f_value(2, f_index(2, &[1, 0, 0, 1]), 0, 1), 0);
        assert_eq!(f_value(2, f_index(2, &[1, 0, 0, 1]), 1, 1), 1);
        let g = three(FamilySpec::new(Family::F, 2));
        assert_eq!(g.n(), 2 + 32 + 2);
    }

    #[test]
    fn tensor_and_vcfop() {
        let h = BipartiteGraph::from_fn(2, 2, |i, j| i <= j);
        let g = three(FamilySpec::tensor(3, h));
        assert_eq!(g.edge_count(), 9);
        let v = three(FamilySpec::vcfop(2, 3, 5));
        assert_eq!(v.n(), 12);
        // pairs coloured 0 see all of Z, pairs coloured 1 only Z_2
        assert_eq!(v.edge_count() % 3, 0);
    }

    #[test]
    fn invalid_specs() {
        assert!(build_canonical(&FamilySpec::gs(4, 2), 100).is_err());
        assert!(matches!(
            build_canonical(&FamilySpec::new(Family::F, 3), 1000),
            Err(Error::VertexCap { .. })
        ));
    }

    #[test]
    fn every_family_respects_partition() {
        let specs = vec![
            FamilySpec::new(Family::V, 2),
            FamilySpec::new(Family::Ubar, 3),
            FamilySpec::new(Family::Ustar, 3),
            FamilySpec::new(Family::Hstar, 3),
            FamilySpec { n: 3, ..FamilySpec::new(Family::W, 0) },
            FamilySpec { n: 3, ..FamilySpec::new(Family::W1, 0) },
            FamilySpec { n: 3, ..FamilySpec::new(Family::W2, 0) },
        ];
        for s in specs {
            let g = three(s);
            assert!(g.partition().is_some());
        }
    }
}
