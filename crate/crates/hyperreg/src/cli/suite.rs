//! The fifteen acceptance pipelines, shared by `hyperreg suite` and the
//! acceptance test.

use std::collections::BTreeMap;
use std::time::Instant;

use rand::Rng;
use serde::Serialize;

use crate::construct::families::DEFAULT_VERTEX_CAP;
use crate::construct::{build_canonical, Family, FamilySpec, GsOracle, HpOracle};
use crate::core::{graph_of, materialize, BipartiteGraph, ThreeGraph, TripartiteGraph, VertexPartition};
use crate::decomp::{
    classify_triads, error_shape, extract_fop2_witness, find_encoding, half_graph, otherway_instance,
    reduced_encoding, sliced_decomposition, split_sigma_pairs, triad_census, verify_encoding, ClassifyOptions,
    Decomposition, ErrorBudgets, ShapeKind, TriadClass, TriadReport,
};
use crate::detect::{tree_rank, vc_dimension, verify_embedding, Host, Pattern, SearchStatus, SetSystem};
use crate::error::{Error, Result};
use crate::num::{self, q, qi, Q};
use crate::quasi::triad::dev23_bruteforce;
use crate::quasi::{dev23_sum, disc2_bruteforce, disc2_deviation, edge_density, vdisc3_graph, Disc2Options, Triad, Vdisc3Options};
use crate::special::{
    gs_metric, hbark_irregular_witness, hp_metric, mixed_density_scan, verify_all, SpecialFamily, SpecialInstance,
    SpecialParams,
};
use crate::stable::{good_level_against, goodsets1_partition_with, Rounding, Schedule};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Tier {
    /// Criteria that finish in seconds.
    Fast,
    Full,
}

/// One acceptance criterion.
pub struct Criterion {
    pub id: u8,
    pub name: &'static str,
    pub fast: bool,
    run: fn() -> Result<Verdict>,
}

struct Verdict {
    passed: bool,
    detail: String,
}

fn verdict(passed: bool, detail: impl Into<String>) -> Result<Verdict> {
    Ok(Verdict { passed, detail: detail.into() })
}

#[derive(Clone, Debug, Serialize)]
pub struct Outcome {
    pub id: u8,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    /// Wall time; kept out of the JSON report so reruns stay byte-identical.
    #[serde(skip)]
    pub seconds: f64,
}

impl Outcome {
    pub fn line(&self) -> String {
        format!(
            "[{}] criterion {:>2} {:<28} {:>7.2}s  {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.seconds,
            self.detail
        )
    }
}

pub const CRITERIA: [Criterion; 15] = [
    Criterion { id: 1, name: "gs-arithmetic", fast: true, run: c1 },
    Criterion { id: 2, name: "gs-ultrametric", fast: true, run: c2 },
    Criterion { id: 3, name: "hp-vc", fast: true, run: c3 },
    Criterion { id: 4, name: "gs-vc-lower-bound", fast: true, run: c4 },
    Criterion { id: 5, name: "disc2-oracle", fast: true, run: c5 },
    Criterion { id: 6, name: "dev23-identity", fast: true, run: c6 },
    Criterion { id: 7, name: "homogeneous-quasirandom", fast: true, run: c7 },
    Criterion { id: 8, name: "good-pair-homogeneity", fast: true, run: c8 },
    Criterion { id: 9, name: "tree-rank", fast: true, run: c9 },
    Criterion { id: 10, name: "hbar-irregularity-witness", fast: false, run: c10 },
    Criterion { id: 11, name: "mixed-density", fast: true, run: c11 },
    Criterion { id: 12, name: "special-axioms", fast: false, run: c12 },
    Criterion { id: 13, name: "fop2-pipeline", fast: true, run: c13 },
    Criterion { id: 14, name: "error-shape-coherence", fast: true, run: c14 },
    Criterion { id: 15, name: "binary-homogeneity", fast: true, run: c15 },
];

pub fn run_criterion(c: &Criterion) -> Outcome {
    let start = Instant::now();
    let (passed, detail) = match (c.run)() {
        Ok(v) => (v.passed, v.detail),
        Err(e) => (false, format!("error: {e}")),
    };
    Outcome { id: c.id, name: c.name, passed, detail, seconds: start.elapsed().as_secs_f64() }
}

pub fn criterion(id: u8) -> Option<&'static Criterion> {
    CRITERIA.iter().find(|c| c.id == id)
}

pub fn run_suite(tier: Tier) -> Vec<Outcome> {
    CRITERIA.iter().filter(|c| tier == Tier::Full || c.fast).map(run_criterion).collect()
}

fn three(spec: FamilySpec) -> Result<ThreeGraph> {
    build_canonical(&spec, DEFAULT_VERTEX_CAP)?
        .three()
        .ok_or_else(|| Error::Precondition("expected a 3-graph".into()))
}

fn bip(spec: FamilySpec) -> Result<BipartiteGraph> {
    build_canonical(&spec, DEFAULT_VERTEX_CAP)?
        .bip()
        .ok_or_else(|| Error::Precondition("expected a bipartite graph".into()))
}

fn c1() -> Result<Verdict> {
    let mut ok = true;
    let mut parts = Vec::new();
    for n in 1..=3u32 {
        let o = GsOracle::new(3, n as usize)?;
        let count = (0..3usize.pow(n)).filter(|&x| o.in_a(x)).count();
        let closed = (3usize.pow(n) - 1) / 2;
        ok &= count == closed;
        parts.push(format!("n={n}: {count}/{closed}"));
    }
    verdict(ok, parts.join(", "))
}

fn c2() -> Result<Verdict> {
    let m = &gs_metric(3, 2)?[0];
    let mut bad = 0;
    for x in 0..9 {
        for y in 0..9 {
            for z in 0..9 {
                if m.d(x, y) > m.d(x, z).max(m.d(y, z)) {
                    bad += 1;
                }
            }
        }
    }
    verdict(bad == 0, format!("729 triples, {bad} violations"))
}

fn c3() -> Result<Verdict> {
    let g = graph_of(&three(FamilySpec::new(Family::Hp, 6))?);
    let a = vc_dimension(&SetSystem::cols(&g), 5, 10_000_000);
    let b = vc_dimension(&SetSystem::rows(&g), 5, 10_000_000);
    verdict(
        a.value == 1 && b.value == 1 && a.certified && b.certified,
        format!("cols {} (certified {}), rows {} (certified {})", a.value, a.certified, b.value, b.certified),
    )
}

fn c4() -> Result<Verdict> {
    let g = graph_of(&materialize(&GsOracle::new(3, 3)?));
    let sys = SetSystem::rows(&g);
    let cap = 4;
    let r = vc_dimension(&sys, cap, 200_000_000);
    let shattered = r.witness.len() >= 3 && sys.shatters(&r.witness[..3]);
    verdict(
        shattered,
        format!(
            "shattered set of {} pairs {:?}; search cap {cap}, upper bound certified: {}, nodes {}",
            r.value, r.witness, r.certified, r.nodes_explored
        ),
    )
}

fn c5() -> Result<Verdict> {
    let mut mismatches = 0;
    for seed in 0..100u64 {
        let mut rng = num::stream(seed, "criterion-5");
        let (m, n) = (rng.gen_range(1..=10), rng.gen_range(1..=10));
        let p = rng.gen_range(0.1..0.9);
        let g = BipartiteGraph::from_fn(m, n, |_, _| rng.gen_bool(p));
        let d = edge_density(&g);
        if disc2_deviation(&g, &Disc2Options::at(d))?.deviation != disc2_bruteforce(&g, d) {
            mismatches += 1;
        }
    }
    verdict(mismatches == 0, format!("100 graphs, {mismatches} mismatches"))
}

fn parts3(s: usize) -> [Vec<usize>; 3] {
    [(0..s).collect(), (s..2 * s).collect(), (2 * s..3 * s).collect()]
}

fn c6() -> Result<Verdict> {
    let mut mismatches = 0;
    for seed in 0..50u64 {
        let mut rng = num::stream(seed, "criterion-6");
        let p = rng.gen_range(0.4..1.0);
        let mut r = || BipartiteGraph::from_fn(3, 3, |_, _| rng.gen_bool(p));
        let g = TripartiteGraph::new(parts3(3), r(), r(), r())?;
        let t = Triad::from_fn(&g, |_, _, _| rng.gen_bool(0.5));
        let d3 = t.d3();
        if dev23_sum(&t, Some(d3)).sum.exact != Some(dev23_bruteforce(&t, d3)) {
            mismatches += 1;
        }
    }
    verdict(mismatches == 0, format!("50 triads, {mismatches} mismatches"))
}

fn c7() -> Result<Verdict> {
    let mut ok = true;
    let mut parts = Vec::new();
    for (k, eps) in [q(1, 100), q(1, 20), q(1, 10)].into_iter().enumerate() {
        for s in [4usize, 6] {
            let total = s * s * s;
            let target = num::floor(&(eps * qi(total as i128))) as usize;
            let mut rng = num::stream(k as u64 * 10 + s as u64, "criterion-7");
            let mut cells: Vec<usize> = (0..total).collect();
            rand::seq::SliceRandom::shuffle(cells.as_mut_slice(), &mut rng);
            let on: std::collections::BTreeSet<usize> = cells.into_iter().take(target).collect();
            let h = ThreeGraph::tripartite_from_fn([s; 3], |a, b, c| on.contains(&((a * s + b) * s + c)));
            let r = vdisc3_graph(&h, &Vdisc3Options::default())?;
            ok &= r.exact && r.deviation <= eps;
            parts.push(format!("eps={eps} s={s}: {}", r.deviation));
        }
    }
    verdict(ok, parts.join(", "))
}

/// Sets certified eps-good by goodsets1 (carved pieces and residues) on the
/// right side of `g`, over a coarse and a fine schedule.
fn good_sets(g: &BipartiteGraph, eps: Q) -> Result<Vec<Vec<usize>>> {
    let all: Vec<usize> = (0..g.right()).collect();
    let left: Vec<usize> = (0..g.left()).collect();
    let mut out: Vec<Vec<usize>> = Vec::new();
    for (f, rounding) in [(q(1, 2), Rounding::Floor), (q(1, 16), Rounding::Ceil)] {
        let gp = goodsets1_partition_with(g, &all, 6, &Schedule::Geometric(f), rounding)?;
        if !gp.verified() {
            return Err(Error::InvalidWitness("goodsets1 output failed re-verification".into()));
        }
        out.extend(gp.carved().map(|s| s.members.clone()));
        if !gp.residue.is_empty() {
            out.push(gp.residue.clone());
        }
    }
    out.sort();
    out.dedup();
    out.retain(|x| good_level_against(g, x, &left) <= eps);
    Ok(out)
}

fn c8() -> Result<Verdict> {
    let g = bip(FamilySpec::new(Family::HalfGraph, 16))?;
    let eps = q(1, 100);
    let ys = good_sets(&g, eps)?;
    let xs = good_sets(&g.transpose(), eps)?;
    let (lo, hi) = (q(1, 5), q(4, 5));
    let mut bad = 0;
    for x in &xs {
        for y in &ys {
            let e: usize = x.iter().map(|&u| y.iter().filter(|&&w| g.has(u, w)).count()).sum();
            let d = q(e as i128, (x.len() * y.len()) as i128);
            if d >= lo && d <= hi {
                bad += 1;
            }
        }
    }
    let pairs = xs.len() * ys.len();
    verdict(bad == 0 && pairs > 0, format!("{} x {} good sets, {pairs} pairs, {bad} with density in [1/5, 4/5]", xs.len(), ys.len()))
}

fn c9() -> Result<Verdict> {
    let mut ok = true;
    let mut parts = Vec::new();
    for d in 1..=3usize {
        let g = bip(FamilySpec::new(Family::HalfGraph, 1 << d))?;
        let leaves: Vec<usize> = (0..g.right()).collect();
        let (rank, w) = tree_rank(&g, &leaves, d + 2);
        let checked = w.verify(&g).is_ok() && w.depth == rank;
        ok &= rank >= d && checked;
        parts.push(format!("H({}): rank {rank}, witness ok {checked}", 1 << d));
    }
    verdict(ok, parts.join(", "))
}

fn c10() -> Result<Verdict> {
    let n = 500;
    let eps1 = q(1, 1 << 18);
    let mut failures = Vec::new();
    for run in 0..20u64 {
        let t = 3 + (run % 8) as usize;
        let mut rng = num::stream(run, "criterion-10");
        let p = VertexPartition::random_equipartition(3 * n, t, &mut rng)?;
        match hbark_irregular_witness(n, &p, eps1) {
            Ok(w) if w.verified() => {}
            Ok(w) => failures.push(format!(
                "run {run} t={t}: min set {} < {:.1} (containments ok {})",
                w.min_size,
                w.size_bound,
                w.containments_ok()
            )),
            Err(e) => failures.push(format!("run {run} t={t}: {e}")),
        }
    }
    verdict(failures.is_empty(), format!("{}/20 runs verified; {}", 20 - failures.len(), failures.join("; ")))
}

fn c11() -> Result<Verdict> {
    let g = materialize(&HpOracle { n: 60 });
    let mut empty = Vec::new();
    for seed in 0..20u64 {
        let mut rng = num::stream(seed, "criterion-11");
        let p = VertexPartition::random_equipartition(180, 6, &mut rng)?;
        if mixed_density_scan(&g, &p, q(1, 20))?.is_empty() {
            empty.push(seed);
        }
    }
    verdict(empty.is_empty(), format!("20 partitions, empty scans at seeds {empty:?}"))
}

fn c12() -> Result<Verdict> {
    let mut parts = Vec::new();
    let mut ok = true;
    let gs = GsOracle::new(3, 2)?;
    let inst = SpecialInstance::new(&gs, gs_metric(3, 2)?, SpecialParams::gs(3, q(1, 27)), Some(SpecialFamily::Gs { p: 3, n: 2 }))?;
    let reports = verify_all(&inst, 1 << 20);
    ok &= reports.iter().all(|r| r.passed);
    parts.push(format!(
        "GS_3(2) passed {:?}",
        reports.iter().filter(|r| r.passed).map(|r| r.axiom).collect::<Vec<_>>()
    ));

    let (tau, mu) = (q(6, 25), q(1, 20));
    let hp = HpOracle { n: 200 };
    let inst = SpecialInstance::new(
        &hp,
        hp_metric(200, tau, mu)?,
        SpecialParams::hp(2, tau, mu, q(1, 1000)),
        Some(SpecialFamily::Hp { n: 200, tau, mu }),
    )?;
    let reports = verify_all(&inst, 200_000);
    ok &= reports.iter().all(|r| r.passed);
    parts.push(format!(
        "HP(200) passed {:?}",
        reports.iter().filter(|r| r.passed).map(|r| r.axiom).collect::<Vec<_>>()
    ));
    verdict(ok, parts.join("; "))
}

fn c13() -> Result<Verdict> {
    let (h, d) = otherway_instance(48, 2, 3)?;
    let enc = reduced_encoding(&h, &d, q(1, 10), q(1, 5), 1)?;
    let r = half_graph(2);
    let w = find_encoding(&enc, &r, "H(2)", 1_000_000);
    if w.status != SearchStatus::Found {
        return verdict(false, format!("find_encoding returned {:?}", w.status));
    }
    verify_encoding(&enc, &r, &w)?;
    let f = extract_fop2_witness(&h, &d, &w, 2, 5_000_000)?;
    let Some(emb) = f.embedding.as_ref().filter(|_| f.status == SearchStatus::Found) else {
        return verdict(false, format!("extract_fop2_witness returned {:?}", f.status));
    };
    let p = Pattern::build(&FamilySpec::new(Family::F, 2), DEFAULT_VERTEX_CAP)?;
    verify_embedding(Host::Three(&h), &p, emb)?;
    verdict(true, format!("encoding base {:?}, F(2) embedding {emb:?} re-verified", w.base))
}

/// Checks one classification: LINEAR whenever BINARY, and a BINARY shape is
/// split away by the sigma-pair refinement.
fn coherent(h: &ThreeGraph, d: &Decomposition, o: &ClassifyOptions, reports: &[TriadReport]) -> Result<(bool, String)> {
    let shape = error_shape(reports, d.t(), ErrorBudgets::from_eps(o.eps1, d.t()));
    let mut ok = !shape.binary_fits() || shape.linear_fits();
    let mut note = format!("{:?}", shape.kind);
    if shape.kind == ShapeKind::Binary {
        let split = split_sigma_pairs(d, &shape.gamma, 5)?;
        let left = classify_triads(h, &split, o)?.iter().filter(|r| r.class == TriadClass::Disc3Irregular).count();
        ok &= left == 0;
        note += &format!(" ({left} disc3-irregular after split)");
    }
    Ok((ok, note))
}

fn c14() -> Result<Verdict> {
    let o = ClassifyOptions::new(q(1, 10), q(1, 5));
    let mut cases: Vec<(String, ThreeGraph, Decomposition)> = Vec::new();

    let classes: Vec<Vec<usize>> = (0..4).map(|c| (c * 8..c * 8 + 8).collect()).collect();
    let mut e = Vec::new();
    for x in 0..4 {
        for y in 8..16 {
            for z in 16..32 {
                e.push([x, y, z]);
            }
        }
    }
    cases.push(("half-class block".into(), ThreeGraph::new(32, e)?, sliced_decomposition(classes.clone(), 2, 21)?));
    cases.push(("empty".into(), ThreeGraph::empty(32), sliced_decomposition(classes.clone(), 2, 21)?));
    for seed in 0..3u64 {
        let mut rng = num::stream(seed, "criterion-14");
        let mut e = Vec::new();
        for a in 0..24 {
            for b in a + 1..24 {
                for c in b + 1..24 {
                    if rng.gen_bool(0.5) {
                        e.push([a, b, c]);
                    }
                }
            }
        }
        let cls: Vec<Vec<usize>> = (0..4).map(|c| (c * 6..c * 6 + 6).collect()).collect();
        cases.push((format!("random seed {seed}"), ThreeGraph::new(24, e)?, sliced_decomposition(cls, 2, seed)?));
    }
    let (h, d) = otherway_instance(48, 2, 3)?;
    cases.push(("otherway".into(), h, d));

    let mut ok = true;
    let mut notes = Vec::new();
    for (name, h, d) in &cases {
        let reports = classify_triads(h, d, &o)?;
        let (good, note) = coherent(h, d, &o, &reports)?;
        ok &= good;
        notes.push(format!("{name}: {note}"));
    }
    verdict(ok, notes.join(", "))
}

fn c15() -> Result<Verdict> {
    // W(4): a_i b_j c_S iff j in S; classes A, B and C cut into four classes of 4.
    let n = 4;
    let mut spec = FamilySpec::new(Family::W, 0);
    spec.n = n;
    let h = three(spec)?;
    let mut classes: Vec<Vec<usize>> = vec![(0..n).collect(), (n..2 * n).collect()];
    classes.extend((0..4).map(|k| (2 * n + 4 * k..2 * n + 4 * k + 4).collect()));
    // B x C coloured by membership, every other pair by 0.
    let mut colours = BTreeMap::new();
    for i in 0..6 {
        for j in i + 1..6 {
            let cols = classes[i]
                .iter()
                .flat_map(|&x| {
                    let row = &classes[j];
                    row.iter().map(move |&y| if i == 1 { usize::from((y - 2 * n) >> (x - n) & 1 == 1) } else { 0 })
                })
                .collect::<Vec<_>>();
            colours.insert((i, j), cols);
        }
    }
    let d = Decomposition::new(2, classes, colours)?;
    let census = triad_census(&h, &d)?;
    let supported: Vec<_> = census.iter().filter(|c| c.triangles > 0).collect();
    let mixed = supported.iter().filter(|c| c.edges != 0 && c.edges != c.triangles).count();
    let full = supported.iter().filter(|c| c.edges == c.triangles).count();
    verdict(
        mixed == 0 && h.edge_count() > 0,
        format!("{} triangle-supported triads, {full} at density 1, {mixed} mixed", supported.len()),
    )
}
