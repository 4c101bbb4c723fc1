//! Exact cross densities of class triples.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::core::{ThreeGraph, VertexPartition};
use crate::error::{Error, Result};
use crate::num::{self, Q};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MixedTriple {
    /// Class indices i < j < k.
    pub classes: [usize; 3],
    pub edges: u64,
    pub total: u64,
    #[serde(with = "num::qser")]
    pub density: Q,
}

/// Density of every class triple over the triples of A x B x C whose three
/// vertices lie in three distinct classes.
pub fn class_triple_densities(g: &ThreeGraph, partition: &VertexPartition) -> Result<Vec<MixedTriple>> {
    let parts = g.partition().ok_or_else(|| Error::Precondition("graph has no 3-partition".into()))?;
    if partition.n() != g.n() {
        return Err(Error::Precondition(format!("partition covers {} vertices, graph has {}", partition.n(), g.n())));
    }
    let mut acc: BTreeMap<[usize; 3], (u64, u64)> = BTreeMap::new();
    for &a in &parts[0] {
        for &b in &parts[1] {
            for &c in &parts[2] {
                let mut key = [partition.class_of(a), partition.class_of(b), partition.class_of(c)];
                if key[0] == key[1] || key[1] == key[2] || key[0] == key[2] {
                    continue;
                }
                key.sort_unstable();
                let e = acc.entry(key).or_default();
                e.1 += 1;
                if g.contains(a, b, c) {
                    e.0 += 1;
                }
            }
        }
    }
    Ok(acc
        .into_iter()
        .map(|(classes, (edges, total))| MixedTriple { classes, edges, total, density: Q::new(edges as i128, total as i128) })
        .collect())
}

/// Class triples whose density lies strictly between eps and 1 - eps.
pub fn mixed_density_scan(g: &ThreeGraph, partition: &VertexPartition, eps: Q) -> Result<Vec<MixedTriple>> {
    let one = Q::from_integer(1);
    Ok(class_triple_densities(g, partition)?.into_iter().filter(|m| m.density > eps && m.density < one - eps).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construct::{GsOracle, HpOracle};
    use crate::core::materialize;
    use crate::num::q;
    use rand::SeedableRng;

    #[test]
    fn gs33_natural() {
        let g = materialize(&GsOracle::new(3, 3).unwrap());
        let p = VertexPartition::new(3, (0..81).map(|v| v / 27).collect()).unwrap();
        let out = mixed_density_scan(&g, &p, q(1, 10)).unwrap();
        assert_eq!(out.len(), 1);
        assert_eq!(out[0].density, q(13, 27));
    }

    #[test]
    fn edgeless() {
        let g = ThreeGraph::tripartite_from_fn([4, 4, 4], |_, _, _| false);
        let p = VertexPartition::new(3, (0..12).map(|v| v % 3).collect()).unwrap();
        assert!(mixed_density_scan(&g, &p, q(99, 100)).unwrap().is_empty());
        assert!(mixed_density_scan(&g, &p, Q::from_integer(0)).unwrap().is_empty());
    }

    #[test]
    fn hp60_random() {
        let g = materialize(&HpOracle { n: 60 });
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        let p = VertexPartition::random_equipartition(180, 6, &mut rng).unwrap();
        assert!(!mixed_density_scan(&g, &p, q(1, 20)).unwrap().is_empty());
    }
}
