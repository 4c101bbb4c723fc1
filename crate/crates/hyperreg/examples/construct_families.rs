//! Build a few canonical families and print their sizes and the first lines of the 3G text.

use hyperreg::construct::{build_canonical, Built, Family, FamilySpec};
use hyperreg::core::io::emit_3g;

fn main() -> hyperreg::Result<()> {
    let specs = [
        FamilySpec::new(Family::HalfGraph, 4),
        FamilySpec::new(Family::Hbar, 3),
        FamilySpec::new(Family::Hp, 5),
        FamilySpec::gs(3, 2),
        FamilySpec::new(Family::F, 2),
    ];
    for spec in &specs {
        match build_canonical(spec, 1 << 16)? {
            Built::Three(h) => {
                println!("{:?}: 3-graph, {} vertices, {} edges", spec.family, h.n(), h.edge_count());
                for line in emit_3g(&h).lines().take(3) {
                    println!("    {line}");
                }
            }
            Built::Bip(g) => println!("{:?}: bipartite {}x{}, {} edges", spec.family, g.left(), g.right(), g.edge_count()),
        }
    }
    Ok(())
}
