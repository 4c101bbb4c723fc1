//! Exact disc2, vdisc3 and dev23 on small instances.

use hyperreg::construct::{random_disc2_bipartite, HbarOracle};
use hyperreg::core::{BipartiteGraph, TripartiteGraph};
use hyperreg::num::q;
use hyperreg::quasi::{dev23_sum, disc2_deviation, vdisc3_deviation, Disc2Options, Triad, Vdisc3Options};

fn main() -> hyperreg::Result<()> {
    let g = random_disc2_bipartite(10, 12, q(1, 2), 7)?;
    let r = disc2_deviation(&g, &Disc2Options::default())?;
    println!("disc2 of a random 10x12 graph: {} at density {} (exact {})", r.deviation, r.density_used, r.exact);

    let r = vdisc3_deviation(&HbarOracle { k: 4 }, &Vdisc3Options::default())?;
    println!("vdisc3 of H-bar(4): {} with witness {:?}", r.deviation, r.witness);

    let parts = [vec![0, 1, 2], vec![3, 4, 5], vec![6, 7, 8]];
    let half = BipartiteGraph::from_fn(3, 3, |i, j| i <= j);
    let tg = TripartiteGraph::new(parts, half.clone(), half.clone(), half)?;
    let t = Triad::from_fn(&tg, |a, b, c| (a + b + c) % 2 == 0);
    println!("dev23 of a parity triad: {:?}", dev23_sum(&t, None).sum.exact);
    Ok(())
}
