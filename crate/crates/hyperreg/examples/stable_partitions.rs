//! Good-set partitions of a half graph and the removal-style partition.

use hyperreg::core::BipartiteGraph;
use hyperreg::num::q;
use hyperreg::stable::{goodsets1_partition, tree_removal_partition, RemovalCaps, Schedule};

fn main() -> hyperreg::Result<()> {
    let g = BipartiteGraph::from_fn(16, 16, |i, j| i <= j);
    let all: Vec<usize> = (0..16).collect();
    let gp = goodsets1_partition(&g, &all, 6, &Schedule::Geometric(q(1, 2)))?;
    println!("goodsets1 on H(16): {} stages, verified {}", gp.t(), gp.verified());
    for s in gp.carved() {
        println!("  stage {} piece {:?} level {}", s.stage, s.members, s.level);
    }
    println!("  residue {:?} level {}", gp.residue, gp.residue_level);

    let rp = tree_removal_partition(&g, &all, &all, 5, q(1, 4), q(1, 4), RemovalCaps::default())?;
    println!("removal partition: {} parts, U' fraction {}, W0 fraction {}", rp.parts.len(), rp.u_prime_fraction, rp.w0_fraction);
    Ok(())
}
