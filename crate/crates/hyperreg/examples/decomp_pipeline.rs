//! Classify a sliced decomposition, read off its error shape and extract an FOP2 witness.

use hyperreg::decomp::{
    classify_triads, error_shape, extract_fop2_witness, find_encoding, half_graph, otherway_instance,
    reduced_encoding, ClassifyOptions, ErrorBudgets, TriadClass,
};
use hyperreg::num::q;

fn main() -> hyperreg::Result<()> {
    let (h, d) = otherway_instance(48, 2, 3)?;
    println!("instance: {} vertices, {} edges, t={}, l={}", h.n(), h.edge_count(), d.t(), d.l());

    let o = ClassifyOptions::new(q(1, 10), q(1, 5));
    let reports = classify_triads(&h, &d, &o)?;
    for c in [TriadClass::Regular, TriadClass::Disc2Irregular, TriadClass::Disc3Irregular] {
        println!("  {c:?}: {}", reports.iter().filter(|r| r.class == c).count());
    }
    let shape = error_shape(&reports, d.t(), ErrorBudgets::from_eps(o.eps1, d.t()));
    println!("error shape: {:?}", shape.kind);

    let enc = reduced_encoding(&h, &d, q(1, 10), q(1, 5), 1)?;
    let w = find_encoding(&enc, &half_graph(2), "H(2)", 1_000_000);
    println!("H(2) encoding: {:?} at base {:?}", w.status, w.base);
    let f = extract_fop2_witness(&h, &d, &w, 2, 5_000_000)?;
    println!("F(2) witness: {:?}", f.status);
    Ok(())
}
