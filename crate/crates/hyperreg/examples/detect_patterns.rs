//! VC dimensions, pattern search and tree rank.

use hyperreg::construct::{build_canonical, Family, FamilySpec, GsOracle, HpOracle};
use hyperreg::core::materialize;
use hyperreg::detect::{find_family, graph_vc, tree_rank, Host};

fn main() -> hyperreg::Result<()> {
    let (a, b) = graph_vc(&materialize(&HpOracle { n: 6 }), 5, 10_000_000);
    println!("Graph(HP(6)): VC {} / {} (certified {} / {})", a.value, b.value, a.certified, b.certified);
    let (_, b) = graph_vc(&materialize(&GsOracle::new(3, 3)?), 4, 10_000_000);
    println!("Graph(GS_3(3)) pair side: VC {} witness {:?} (certified {})", b.value, b.witness, b.certified);

    let h8 = build_canonical(&FamilySpec::new(Family::HalfGraph, 8), 1 << 16)?.bip().expect("bipartite");
    for k in [3, 9] {
        let w = find_family(Host::Bip(&h8), &FamilySpec::new(Family::HalfGraph, k), 1_000_000)?;
        println!("H({k}) in H(8): {:?}", w.status);
    }
    let leaves: Vec<usize> = (0..8).collect();
    let (rank, w) = tree_rank(&h8, &leaves, 6);
    println!("tree rank of H(8): {rank}, witness verifies: {}", w.verify(&h8).is_ok());
    Ok(())
}
