//! Splitting, pair-splitting, irregularity and mixed-density witnesses.

use hyperreg::construct::HpOracle;
use hyperreg::core::{materialize, VertexPartition};
use hyperreg::num::{q, stream};
use hyperreg::special::{hbark_irregular_witness, mixed_density_scan, pair_split_witness, split_witness, SpecialFamily};

fn main() -> hyperreg::Result<()> {
    let gs = SpecialFamily::Gs { p: 3, n: 2 };
    let w = split_witness(&gs, q(1, 9), 0, 0)?;
    println!("GS_3(2) split at r=1/9: f0={} f1={} verified {}", w.f0, w.f1, w.verified());
    let w = pair_split_witness(&gs, 0, 1, 0, (q(1, 27), q(1, 27)))?;
    println!("GS_3(2) pair split: z={} side {:?} verified {}", w.z, w.edge_side, w.verified);

    let p = VertexPartition::random_equipartition(300, 4, &mut stream(1, "example"))?;
    let w = hbark_irregular_witness(100, &p, q(1, 1 << 18))?;
    println!(
        "H-bar(100), t=4: classes {:?}, split {}, smallest set {} (bound {:.1}), containments ok {}",
        w.classes,
        w.split,
        w.min_size,
        w.size_bound,
        w.containments_ok()
    );

    let h = materialize(&HpOracle { n: 60 });
    let p = VertexPartition::random_equipartition(180, 6, &mut stream(2, "example"))?;
    let m = mixed_density_scan(&h, &p, q(1, 20))?;
    println!("HP(60), t=6: {} mixed class triples, first {:?}", m.len(), m.first().map(|x| (x.classes, x.density.to_string())));
    Ok(())
}
