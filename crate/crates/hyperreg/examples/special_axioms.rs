//! Verify the nine axioms on GS_3(2) and HP(200).

use std::time::Instant;

use hyperreg::construct::{GsOracle, HpOracle};
use hyperreg::num::q;
use hyperreg::special::{gs_metric, hp_metric, verify_all, SpecialFamily, SpecialInstance, SpecialParams};

fn main() -> hyperreg::Result<()> {
    let gs = GsOracle::new(3, 2)?;
    let inst = SpecialInstance::new(&gs, gs_metric(3, 2)?, SpecialParams::gs(3, q(1, 27)), Some(SpecialFamily::Gs { p: 3, n: 2 }))?;
    println!("GS_3(2)");
    for r in verify_all(&inst, 1 << 20) {
        println!("  axiom {}: passed={} mode={:?} radii={:?} checked={}", r.axiom, r.passed, r.mode, r.radii, r.checked);
    }

    let (tau, mu) = (q(6, 25), q(1, 20));
    let hp = HpOracle { n: 200 };
    let inst = SpecialInstance::new(
        &hp,
        hp_metric(200, tau, mu)?,
        SpecialParams::hp(2, tau, mu, q(1, 1000)),
        Some(SpecialFamily::Hp { n: 200, tau, mu }),
    )?;
    println!("HP(200)");
    let start = Instant::now();
    for r in verify_all(&inst, 200_000) {
        println!(
            "  axiom {}: passed={} mode={:?} checked={} claim={} search={} failing={:?}",
            r.axiom, r.passed, r.mode, r.checked, r.claim_witnesses, r.search_witnesses, r.failing
        );
    }
    println!("  {:.1}s", start.elapsed().as_secs_f64());
    Ok(())
}
