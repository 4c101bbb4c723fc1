//! Aggregated dimension and order-property searches for one 3-graph.

use serde::Serialize;

use crate::construct::{Family, FamilySpec};
use crate::core::ThreeGraph;
use crate::detect::pattern::{find_family, Host, SearchStatus};
use crate::detect::vc::{graph_vc, wvc_dimension};
use crate::error::Result;

/// Largest parameter found, and whether the next one was certified absent.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DimEntry {
    pub value: usize,
    pub certified: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct DimensionReport {
    pub vc: DimEntry,
    pub wvc: DimEntry,
    /// Largest k with an induced V(k) in Trip(h).
    pub vc2_lower: DimEntry,
    /// Largest k with an induced H(k) in Graph(h).
    pub order_property: DimEntry,
    /// Largest k with an induced H*(k) in Trip(h).
    pub weak_stability: DimEntry,
    /// Largest l with an induced F(l) in Trip(h).
    pub fop2: DimEntry,
    /// Largest k with an induced HP(k) in Trip(h).
    pub hop2: DimEntry,
}

#[derive(Clone, Copy, Debug)]
pub struct DimensionCaps {
    pub vc: usize,
    pub order: usize,
    pub vc2: usize,
    pub fop: usize,
    pub hop: usize,
    pub budget: u64,
}

impl Default for DimensionCaps {
    fn default() -> Self {
        DimensionCaps { vc: 6, order: 8, vc2: 2, fop: 2, hop: 6, budget: 200_000 }
    }
}

/// Search k = 1, 2, .. up to `cap` for `family(k)`.
fn ladder(h: &ThreeGraph, family: Family, cap: usize, budget: u64) -> Result<DimEntry> {
    let mut value = 0;
    for k in 1..=cap {
        let w = find_family(Host::Three(h), &FamilySpec::new(family, k), budget)?;
        match w.status {
            SearchStatus::Found => value = k,
            SearchStatus::AbsentCertified => return Ok(DimEntry { value, certified: true }),
            SearchStatus::Inconclusive => return Ok(DimEntry { value, certified: false }),
        }
    }
    Ok(DimEntry { value, certified: false })
}

pub fn dimension_report(h: &ThreeGraph, caps: &DimensionCaps) -> Result<DimensionReport> {
    let (a, b) = graph_vc(h, caps.vc, caps.budget.saturating_mul(50));
    let vc = if a.value >= b.value { &a } else { &b };
    let (w, _) = wvc_dimension(h, caps.vc, caps.budget.saturating_mul(50));
    Ok(DimensionReport {
        vc: DimEntry { value: vc.value, certified: a.certified && b.certified },
        wvc: DimEntry { value: w.value, certified: w.certified },
        vc2_lower: ladder(h, Family::V, caps.vc2, caps.budget)?,
        order_property: ladder(h, Family::HalfGraph, caps.order, caps.budget)?,
        weak_stability: ladder(h, Family::Hstar, caps.order, caps.budget)?,
        fop2: ladder(h, Family::F, caps.fop, caps.budget)?,
        hop2: ladder(h, Family::Hp, caps.hop, caps.budget)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construct::build_canonical;

    #[test]
    fn edgeless_is_all_zero() {
        let r = dimension_report(&ThreeGraph::empty(6), &DimensionCaps::default()).unwrap();
        for e in [&r.vc, &r.wvc, &r.vc2_lower, &r.order_property, &r.weak_stability, &r.fop2, &r.hop2] {
            assert_eq!(e.value, 0);
        }
    }

    #[test]
    fn hbar_four_has_order_four() {
        let h = build_canonical(&FamilySpec::new(Family::Hbar, 4), 1 << 16).unwrap().three().unwrap();
        let caps = DimensionCaps { order: 5, ..Default::default() };
        assert!(dimension_report(&h, &caps).unwrap().order_property.value >= 4);
    }

    #[test]
    fn vcfop_example() {
        let h = build_canonical(&FamilySpec::vcfop(2, 48, 7), 1 << 16).unwrap().three().unwrap();
        let f2 = find_family(Host::Three(&h), &FamilySpec::new(Family::F, 2), 5_000_000).unwrap();
        assert_eq!(f2.status, SearchStatus::Found);
        let v2 = find_family(Host::Three(&h), &FamilySpec::new(Family::V, 2), 200_000).unwrap();
        assert_ne!(v2.status, SearchStatus::Found);
    }
}
