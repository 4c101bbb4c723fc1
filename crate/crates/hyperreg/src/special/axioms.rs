//! Verifier for the nine axioms of a special 3-graph.

use std::collections::BTreeSet;

use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;

use super::metric::{Ball, Distance, MetricPart};
use super::witness::{
    block_violation, edge, gs_pair_split, gs_split, hp_pair_split, hp_split, EdgeSide, Perm, SpecialFamily, PERMS,
};
use crate::construct::Fpn;
use crate::core::TripartiteOracle;
use crate::error::{Error, Result};
use crate::num::{self, q, Q};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpecialParams {
    pub p: usize,
    #[serde(with = "num::qser")]
    pub mu: Q,
    #[serde(with = "num::qser")]
    pub tau: Q,
    #[serde(with = "num::qser")]
    pub alpha: Q,
    #[serde(with = "num::qser")]
    pub rho: Q,
}

impl SpecialParams {
    /// GS_p(n): mu = tau = 1/p^2, alpha = 1/(2(p-1)).
    pub fn gs(p: usize, rho: Q) -> Self {
        let pp = Q::from_integer((p * p) as i128);
        SpecialParams { p, mu: pp.recip(), tau: pp.recip(), alpha: q(1, 2 * (p as i128 - 1)), rho }
    }

    /// HP(N) with interval parameter tau_hp: the axiom tau is 1 - tau_hp, alpha = mu^2.
    pub fn hp(p: usize, tau_hp: Q, mu: Q, rho: Q) -> Self {
        SpecialParams { p, mu, tau: Q::one() - tau_hp, alpha: mu * mu, rho }
    }
}

/// A tripartite oracle with a metric on each part.
pub struct SpecialInstance<'a> {
    pub oracle: &'a dyn TripartiteOracle,
    pub metrics: [MetricPart; 3],
    pub params: SpecialParams,
    /// Family whose explicit witnesses are tried first; `None` means search only.
    pub family: Option<SpecialFamily>,
}

impl<'a> SpecialInstance<'a> {
    pub fn new(
        oracle: &'a dyn TripartiteOracle,
        metrics: [MetricPart; 3],
        params: SpecialParams,
        family: Option<SpecialFamily>,
    ) -> Result<Self> {
        let sizes = oracle.part_sizes();
        for (k, m) in metrics.iter().enumerate() {
            if m.size != sizes[k] {
                return Err(Error::Metric(format!("part {k}: metric on {} points, part has {}", m.size, sizes[k])));
            }
        }
        if sizes[0] != sizes[1] || sizes[1] != sizes[2] {
            return Err(Error::InvalidParameter(format!("parts must have equal sizes, got {sizes:?}")));
        }
        if params.p < 2 {
            return Err(Error::InvalidParameter("p must be at least 2".into()));
        }
        if params.rho <= Q::zero() || params.mu <= Q::zero() || params.alpha <= Q::zero() {
            return Err(Error::InvalidParameter("rho, mu, alpha must be positive".into()));
        }
        Ok(SpecialInstance { oracle, metrics, params, family })
    }

    pub fn n(&self) -> usize {
        self.metrics[0].size
    }

    fn edge(&self, perm: Perm, x: usize, y: usize, z: usize) -> bool {
        edge(self.oracle, perm, x, y, z)
    }

    /// Constant c in d(f0, f1) <= c r.
    pub fn split_constant(&self) -> Q {
        self.family.as_ref().map_or(q(7, 1), |f| f.split_constant())
    }

    fn geometric(&self) -> Vec<Q> {
        let mut v = Vec::new();
        let mut g = self.params.rho;
        while g <= Q::one() {
            v.push(g);
            g *= q(2, 1);
        }
        v
    }

    fn realizable(&self) -> Vec<Q> {
        let set: BTreeSet<Q> = self.metrics.iter().flat_map(|m| m.realizable_radii()).collect();
        set.into_iter().collect()
    }

    /// All grid radii in (0, 1].
    pub fn full_grid(&self) -> Vec<Q> {
        let set: BTreeSet<Q> = self.geometric().into_iter().chain(self.realizable()).collect();
        set.into_iter().collect()
    }

    /// Grid radii in the window (rho, mu^2), or [rho, mu^2) when `closed_below`;
    /// the realizable radii when the window holds none.
    pub fn window(&self, closed_below: bool) -> (Vec<Q>, RadiusDomain) {
        let mu2 = self.params.mu * self.params.mu;
        let rho = self.params.rho;
        let v: Vec<Q> = self
            .full_grid()
            .into_iter()
            .filter(|&r| r < mu2 && (r > rho || (closed_below && r == rho)))
            .collect();
        if v.is_empty() {
            (self.realizable(), RadiusDomain::Realizable)
        } else {
            (v, RadiusDomain::Window)
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckMode {
    Exhaustive,
    Sampled,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RadiusDomain {
    None,
    Window,
    Realizable,
}

/// A failing instance; `points` and `radii` are the quantified values in the
/// order of the axiom statement.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Violation {
    pub part: Option<usize>,
    pub perm: Option<Perm>,
    pub points: Vec<usize>,
    #[serde(with = "num::qvec")]
    pub radii: Vec<Q>,
    pub clause: String,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct AxiomReport {
    pub axiom: u8,
    pub passed: bool,
    pub mode: CheckMode,
    pub radii: RadiusDomain,
    pub checked: usize,
    pub claim_witnesses: usize,
    pub search_witnesses: usize,
    #[serde(with = "num::qopt")]
    pub constant: Option<Q>,
    pub failing: Option<Violation>,
}

impl AxiomReport {
    fn new(axiom: u8, radii: RadiusDomain) -> Self {
        AxiomReport {
            axiom,
            passed: true,
            mode: CheckMode::Exhaustive,
            radii,
            checked: 0,
            claim_witnesses: 0,
            search_witnesses: 0,
            constant: None,
            failing: None,
        }
    }

    fn fail(&mut self, v: Violation) {
        self.passed = false;
        self.failing.get_or_insert(v);
    }
}

fn viol(part: Option<usize>, perm: Option<Perm>, points: Vec<usize>, radii: Vec<Q>, clause: &str, detail: String) -> Violation {
    Violation { part, perm, points, radii, clause: clause.into(), detail }
}

/// Deterministic stride sample of at most `budget` items.
fn sample<T: Clone>(items: Vec<T>, budget: usize, mode: &mut CheckMode) -> Vec<T> {
    if items.len() <= budget.max(1) {
        return items;
    }
    *mode = CheckMode::Sampled;
    let step = items.len().div_ceil(budget.max(1));
    items.into_iter().step_by(step).collect()
}

fn first_failure<T: Sync, F>(items: &[T], f: F) -> Option<Violation>
where
    F: Fn(&T) -> Option<Violation> + Sync + Send,
{
    items.par_iter().find_map_first(f)
}

fn qz(k: usize) -> Q {
    Q::from_integer(k as i128)
}

// ---------- axiom 1 ----------

fn ax1(inst: &SpecialInstance, part: usize) -> Option<Violation> {
    let m = &inst.metrics[part];
    let (mu, tau) = (inst.params.mu, inst.params.tau);
    let v = |clause: &str, detail: String| Some(viol(Some(part), None, vec![], vec![], clause, detail));
    if m.r_sm < mu / q(2, 1) {
        return v("sm radius", format!("r_sm = {} < mu/2", m.r_sm));
    }
    if m.r_lg < tau / q(2, 1) {
        return v("lg radius", format!("r_lg = {} < tau/2", m.r_lg));
    }
    if !m.sm().contains(&m.x_sm) || !m.lg().contains(&m.x_lg) {
        return v("centres", "a centre lies outside its ball".into());
    }
    None
}

// ---------- axiom 2 ----------

fn ax2(inst: &SpecialInstance, part: usize, x: usize, r: Q) -> Option<Violation> {
    let m = &inst.metrics[part];
    let p = qz(inst.params.p);
    let size = qz(m.ball(x, r).len());
    let n = qz(m.size);
    let lo = r * n / (q(2, 1) * p);
    let hi = p * r * n;
    (size < lo || size > hi).then(|| {
        viol(Some(part), None, vec![x], vec![r], "ball size", format!("|B_r(x)| = {size} outside [{lo}, {hi}]"))
    })
}

// ---------- axiom 3 ----------

fn ax3(inst: &SpecialInstance, perm: Perm, x: usize) -> Option<Violation> {
    let n = inst.n();
    let deg = (0..n).map(|y| (0..n).filter(|&z| inst.edge(perm, x, y, z)).count()).sum::<usize>();
    let low = deg.min(n * n - deg);
    let need = inst.params.alpha * qz(n * n);
    (qz(low) < need).then(|| {
        viol(None, Some(perm), vec![x], vec![], "degree", format!("min(|N(x)|, |not N(x)|) = {low} < alpha n^2 = {need}"))
    })
}

// ---------- axiom 4 ----------

fn ax4(inst: &SpecialInstance, perm: Perm, y: usize, z: usize, z2: usize) -> Option<Violation> {
    let mx = &inst.metrics[perm[0]];
    let set: Vec<usize> =
        (0..mx.size).filter(|&x| inst.edge(perm, x, y, z) && !inst.edge(perm, x, y, z2)).collect();
    let ball = mx.enclosing_ball(&set);
    let bound = inst.metrics[perm[2]].d(z, z2);
    (ball.radius > bound).then(|| {
        viol(
            None,
            Some(perm),
            vec![y, z, z2],
            vec![],
            "enclosing ball",
            format!("{} points need radius {} > d(z,z') = {bound}", set.len(), ball.radius),
        )
    })
}

// ---------- ball partitions for axioms 5 and 6 ----------

/// Balls of radius in [r/3, r] tiling the interval [lo, hi] of a line metric.
fn fill_line(lo: usize, hi: usize, r: Q, n: usize) -> Vec<Ball> {
    if hi < lo {
        return Vec::new();
    }
    let rn = r * qz(n);
    let kmin = (num::ceil(&(rn / q(3, 1))) - 1).max(0) as usize;
    let kmax = (num::ceil(&rn) - 1).max(0) as usize;
    let (smin, smax) = (2 * kmin + 1, 2 * kmax + 1);
    let len = hi - lo + 1;
    if len < smin {
        // a ball clipped at an end of the line
        let k = kmin.max((len - 1).div_ceil(2));
        if k > kmax || k > len - 1 {
            return Vec::new();
        }
        let radius = r.min(qz(k + 1) / qz(n));
        return if lo == 0 {
            vec![Ball { centre: len - 1 - k, radius }]
        } else if hi == n - 1 {
            vec![Ball { centre: lo + k, radius }]
        } else {
            Vec::new()
        };
    }
    let parts = len.div_ceil(smax);
    let mut out = Vec::with_capacity(parts);
    let mut start = lo;
    for i in 0..parts {
        let l = len / parts + usize::from(i < len % parts);
        let s = if l % 2 == 1 { l } else { l - 1 };
        if s >= smin {
            let k = (s - 1) / 2;
            out.push(Ball { centre: start + k, radius: r.min(qz(k + 1) / qz(n)) });
        }
        start += l;
    }
    out
}

/// Greedy cover of `region` (minus `fixed`) by balls of radius in [r/3, r] lying inside it.
fn greedy_cover(m: &MetricPart, region: &[usize], fixed: Option<&Ball>, r: Q) -> Vec<Ball> {
    let inside: BTreeSet<usize> = region.iter().copied().collect();
    let mut free = inside.clone();
    if let Some(b) = fixed {
        for y in m.ball(b.centre, b.radius) {
            free.remove(&y);
        }
    }
    let mut radii: Vec<Q> = m.realizable_radii().into_iter().filter(|&s| s >= r / q(3, 1) && s <= r).collect();
    radii.extend([r, r / q(3, 1)]);
    radii.sort();
    radii.dedup();
    let mut out = Vec::new();
    let order: Vec<usize> = free.iter().copied().collect();
    for u in order {
        if !free.contains(&u) {
            continue;
        }
        let mut best: Option<(usize, Ball, Vec<usize>)> = None;
        for c in 0..m.size {
            for &s in &radii {
                let b = m.ball(c, s);
                if b.contains(&u) && b.iter().all(|y| free.contains(y)) && best.as_ref().is_none_or(|t| b.len() > t.0) {
                    best = Some((b.len(), Ball { centre: c, radius: s }, b));
                }
            }
        }
        if let Some((_, ball, members)) = best {
            for y in members {
                free.remove(&y);
            }
            out.push(ball);
        }
    }
    out
}

/// A family of disjoint balls of radius in [r/3, r] inside `region`, containing `fixed`.
fn ball_partition(m: &MetricPart, region: &[usize], fixed: Option<Ball>, r: Q) -> Vec<Ball> {
    let mut out: Vec<Ball> = fixed.iter().cloned().collect();
    match m.distance() {
        Distance::Prefix { .. } => {
            let mut taken: BTreeSet<usize> = fixed.iter().flat_map(|b| m.ball(b.centre, b.radius)).collect();
            for &y in region {
                if !taken.contains(&y) {
                    taken.extend(m.ball(y, r));
                    out.push(Ball { centre: y, radius: r });
                }
            }
        }
        Distance::Line { n } => {
            let (lo, hi) = (region[0], *region.last().expect("nonempty"));
            match &fixed {
                Some(b) => {
                    let members = m.ball(b.centre, b.radius);
                    let (blo, bhi) = (members[0], *members.last().expect("nonempty"));
                    if blo > lo {
                        out.extend(fill_line(lo, blo - 1, r, *n));
                    }
                    out.extend(fill_line(bhi + 1, hi, r, *n));
                }
                None => out.extend(fill_line(lo, hi, r, *n)),
            }
        }
        Distance::Table(_) => out.extend(greedy_cover(m, region, fixed.as_ref(), r)),
    }
    out
}

struct PartitionCheck {
    members: Vec<Vec<usize>>,
    leftover: usize,
    problem: Option<String>,
}

/// Disjointness, containment in `region` and radius range of `balls`.
fn check_partition(m: &MetricPart, region: &[usize], balls: &[Ball], r: Q) -> PartitionCheck {
    let inside: BTreeSet<usize> = region.iter().copied().collect();
    let mut seen = BTreeSet::new();
    let mut members = Vec::with_capacity(balls.len());
    let mut problem = None;
    for b in balls {
        if b.radius < r / q(3, 1) || b.radius > r {
            problem.get_or_insert(format!("ball at {} has radius {} outside [r/3, r]", b.centre, b.radius));
        }
        let mem = m.ball(b.centre, b.radius);
        for &y in &mem {
            if !inside.contains(&y) {
                problem.get_or_insert(format!("ball at {} leaves the region", b.centre));
            }
            if !seen.insert(y) {
                problem.get_or_insert(format!("balls overlap at {y}"));
            }
        }
        members.push(mem);
    }
    PartitionCheck { leftover: inside.len() - seen.intersection(&inside).count(), members, problem }
}

// ---------- axiom 5 ----------

fn ax5(inst: &SpecialInstance, part: usize, x: usize, r: Q) -> Option<Violation> {
    let m = &inst.metrics[part];
    let all: Vec<usize> = (0..m.size).collect();
    let fixed = Ball { centre: x, radius: r };
    let balls = ball_partition(m, &all, Some(fixed.clone()), r);
    let pc = check_partition(m, &all, &balls, r);
    let v = |clause: &str, detail: String| Some(viol(Some(part), None, vec![x], vec![r], clause, detail));
    if let Some(p) = pc.problem {
        return v("partition", p);
    }
    let count = balls.len();
    let cap = q(4, 1) * qz(inst.params.p) / r;
    if qz(count) > cap {
        return v("count", format!("{count} balls > 4p/r = {cap}"));
    }
    if pc.leftover > 2 * count {
        return v("leftover", format!("{} uncovered > 2m = {}", pc.leftover, 2 * count));
    }
    None
}

// ---------- axiom 6 ----------

fn ax6(inst: &SpecialInstance, part: usize, c: usize, r1: Q, r2: Q) -> Option<Violation> {
    let m = &inst.metrics[part];
    let region = m.ball(c, r2);
    if region.is_empty() {
        return None;
    }
    let balls = ball_partition(m, &region, None, r1);
    let pc = check_partition(m, &region, &balls, r1);
    let v = |clause: &str, detail: String| Some(viol(Some(part), None, vec![c], vec![r1, r2], clause, detail));
    if let Some(p) = pc.problem {
        return v("partition", p);
    }
    let count = balls.len();
    let cap = q(2, 1) * qz(inst.params.p) * r2 / r1;
    if qz(count) > cap {
        return v("count", format!("{count} balls > 2p r2/r1 = {cap}"));
    }
    if pc.leftover > 2 * count {
        return v("leftover", format!("{} uncovered > 2m = {}", pc.leftover, 2 * count));
    }
    for (clause, special) in [("lg", m.lg_plus()), ("sm", m.sm_plus())] {
        let special: BTreeSet<usize> = special.into_iter().collect();
        let covered: BTreeSet<usize> = balls
            .iter()
            .zip(&pc.members)
            .filter(|(b, _)| special.contains(&b.centre))
            .flat_map(|(_, mem)| mem.iter().copied())
            .collect();
        let target = match clause {
            "lg" => m.lg(),
            _ => m.sm(),
        };
        let missed = region.iter().filter(|y| target.contains(y) && !covered.contains(y)).count();
        if missed > 2 * count {
            return v(clause, format!("{missed} points of the {clause} ball uncovered by balls centred in it > 2m"));
        }
    }
    None
}

// ---------- axiom 7 ----------

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Source {
    Claim,
    Search,
}

struct SplitTable {
    r: Q,
    source: Source,
    /// (f0, f1) indexed by xi * |ys| + yi.
    f: Vec<(usize, usize)>,
}

fn check_split(inst: &SpecialInstance, perm: Perm, r: Q, x: usize, y: usize, f0: usize, f1: usize) -> Option<String> {
    let [mx, my, mz] = [&inst.metrics[perm[0]], &inst.metrics[perm[1]], &inst.metrics[perm[2]]];
    let (xs, ys) = (mx.ball(x, r), my.ball(y, r));
    let half = r / q(2, 1);
    if let Some(t) = block_violation(inst.oracle, perm, &xs, &ys, &mz.ball(f1, half), true) {
        return Some(format!("non-edge {t:?} in the f1 block"));
    }
    if let Some(t) = block_violation(inst.oracle, perm, &xs, &ys, &mz.ball(f0, half), false) {
        return Some(format!("edge {t:?} in the f0 block"));
    }
    let bound = inst.split_constant() * r;
    let d = mz.d(f0, f1);
    (d > bound).then(|| format!("d(f0,f1) = {d} > {bound}"))
}

fn claim_split(inst: &SpecialInstance, r: Q, x: usize, y: usize) -> Option<(usize, usize)> {
    match inst.family.as_ref()? {
        SpecialFamily::Gs { p, n } => Some(gs_split(&Fpn::new(*p, *n).ok()?, r, x, y)),
        SpecialFamily::Hp { n, .. } => hp_split(*n, x, y, r),
    }
}

/// Closest pair (f0, f1) of block vertices, lexicographically smallest among ties.
fn search_split(inst: &SpecialInstance, perm: Perm, r: Q, x: usize, y: usize) -> Option<(usize, usize)> {
    let [mx, my, mz] = [&inst.metrics[perm[0]], &inst.metrics[perm[1]], &inst.metrics[perm[2]]];
    let (xs, ys) = (mx.ball(x, r), my.ball(y, r));
    let half = r / q(2, 1);
    let mut ones = Vec::new();
    let mut zeros = Vec::new();
    for z in 0..mz.size {
        let zb = mz.ball(z, half);
        if block_violation(inst.oracle, perm, &xs, &ys, &zb, true).is_none() {
            ones.push(z);
        }
        if block_violation(inst.oracle, perm, &xs, &ys, &zb, false).is_none() {
            zeros.push(z);
        }
    }
    let mut best: Option<(Q, usize, usize)> = None;
    for &f1 in &ones {
        for &f0 in &zeros {
            let d = mz.d(f0, f1);
            if best.is_none_or(|(bd, b1, b0)| (d, f1, f0) < (bd, b1, b0)) {
                best = Some((d, f1, f0));
            }
        }
    }
    best.map(|(_, f1, f0)| (f0, f1))
}

fn split_table(
    inst: &SpecialInstance,
    perm: Perm,
    r: Q,
    xs: &[usize],
    ys: &[usize],
) -> std::result::Result<SplitTable, Violation> {
    let pairs: Vec<(usize, usize)> = xs.iter().flat_map(|&x| ys.iter().map(move |&y| (x, y))).collect();
    let claims: Option<Vec<(usize, usize)>> = pairs
        .par_iter()
        .map(|&(x, y)| {
            let (f0, f1) = claim_split(inst, r, x, y)?;
            check_split(inst, perm, r, x, y, f0, f1).is_none().then_some((f0, f1))
        })
        .collect();
    if let Some(f) = claims {
        return Ok(SplitTable { r, source: Source::Claim, f });
    }
    let found: Vec<std::result::Result<(usize, usize), Violation>> = pairs
        .par_iter()
        .map(|&(x, y)| {
            let none = || viol(None, Some(perm), vec![x, y], vec![r], "witness", "no pair of split blocks".into());
            let (f0, f1) = search_split(inst, perm, r, x, y).ok_or_else(none)?;
            match check_split(inst, perm, r, x, y, f0, f1) {
                None => Ok((f0, f1)),
                Some(d) => Err(viol(None, Some(perm), vec![x, y], vec![r], "bound", d)),
            }
        })
        .collect();
    let f = found.into_iter().collect::<std::result::Result<Vec<_>, _>>()?;
    Ok(SplitTable { r, source: Source::Search, f })
}

fn ax7_roles(inst: &SpecialInstance, perm: Perm) -> (Vec<usize>, Vec<usize>) {
    (inst.metrics[perm[0]].lg_plus(), inst.metrics[perm[1]].sm_plus())
}

/// Clause (a) at a fixed x and radius.
fn ax7_a(inst: &SpecialInstance, perm: Perm, t: &SplitTable, xi: usize, ys: &[usize], x: usize) -> Option<Violation> {
    let (my, mz) = (&inst.metrics[perm[1]], &inst.metrics[perm[2]]);
    let k = ys.len();
    for a in 0..k {
        for b in a + 1..k {
            let (fa, fb) = (t.f[xi * k + a], t.f[xi * k + b]);
            let dy = my.d(ys[a], ys[b]);
            for (u, (ga, gb)) in [(0, (fa.0, fb.0)), (1, (fa.1, fb.1))] {
                let dz = mz.d(ga, gb);
                if dz < dy {
                    return Some(viol(
                        None,
                        Some(perm),
                        vec![x, ys[a], x, ys[b]],
                        vec![t.r, t.r],
                        "a",
                        format!("d(f{u}(y), f{u}(y')) = {dz} < d(y,y') = {dy}"),
                    ));
                }
            }
        }
    }
    None
}

/// Clauses (b) and (c) for one pair of items.
#[allow(clippy::too_many_arguments)]
fn ax7_bc(
    inst: &SpecialInstance,
    perm: Perm,
    (x, y, r, f): (usize, usize, Q, (usize, usize)),
    (x2, y2, r2, f2): (usize, usize, Q, (usize, usize)),
) -> Option<Violation> {
    let [mx, my, mz] = [&inst.metrics[perm[0]], &inst.metrics[perm[1]], &inst.metrics[perm[2]]];
    let (dx, dy) = (mx.d(x, x2), my.d(y, y2));
    let six = q(6, 1) * r2;
    let seven = q(7, 1) * r2;
    let dmin = [(f.0, f2.0), (f.0, f2.1), (f.1, f2.0), (f.1, f2.1)].iter().map(|&(a, b)| mz.d(a, b)).min().expect("four pairs");
    let v = |clause: &str, need: Q| {
        Some(viol(
            None,
            Some(perm),
            vec![x, y, x2, y2],
            vec![r, r2],
            clause,
            format!("min d(f_u, f'_v) = {dmin} < {need}"),
        ))
    };
    if dy >= dx + six && dmin < dy - dx - seven {
        return v("b", dy - dx - seven);
    }
    if dx >= dy + six && dmin < dx - dy - seven {
        return v("c", dx - dy - seven);
    }
    None
}

fn verify7(inst: &SpecialInstance, budget: usize) -> AxiomReport {
    let (radii, dom) = inst.window(false);
    let mut rep = AxiomReport::new(7, dom);
    rep.constant = Some(inst.split_constant());
    for perm in PERMS {
        let (xs, ys) = ax7_roles(inst, perm);
        let mut tables = Vec::with_capacity(radii.len());
        for &r in &radii {
            match split_table(inst, perm, r, &xs, &ys) {
                Ok(t) => {
                    rep.checked += t.f.len();
                    match t.source {
                        Source::Claim => rep.claim_witnesses += t.f.len(),
                        Source::Search => rep.search_witnesses += t.f.len(),
                    }
                    tables.push(t);
                }
                Err(v) => {
                    rep.fail(v);
                    return rep;
                }
            }
        }
        for t in &tables {
            let found = first_failure(&(0..xs.len()).collect::<Vec<_>>(), |&xi| ax7_a(inst, perm, t, xi, &ys, xs[xi]));
            rep.checked += xs.len() * ys.len() * ys.len().saturating_sub(1) / 2;
            if let Some(v) = found {
                rep.fail(v);
                return rep;
            }
        }
        let mut items: Vec<(usize, usize, Q, (usize, usize))> = Vec::new();
        for t in &tables {
            for (xi, &x) in xs.iter().enumerate() {
                for (yi, &y) in ys.iter().enumerate() {
                    items.push((x, y, t.r, t.f[xi * ys.len() + yi]));
                }
            }
        }
        let total = items.len() * items.len();
        let step = if total > budget.max(1) {
            rep.mode = CheckMode::Sampled;
            total.div_ceil(budget.max(1))
        } else {
            1
        };
        let idx: Vec<usize> = (0..total).step_by(step).collect();
        rep.checked += idx.len();
        let k = items.len();
        if let Some(v) = first_failure(&idx, |&i| ax7_bc(inst, perm, items[i / k], items[i % k])) {
            rep.fail(v);
            return rep;
        }
    }
    rep
}

fn recheck7(inst: &SpecialInstance, v: &Violation) -> bool {
    let Some(perm) = v.perm else { return false };
    let (xs, ys) = ax7_roles(inst, perm);
    let table = |r: Q| split_table(inst, perm, r, &xs, &ys);
    let lookup = |t: &SplitTable, x: usize, y: usize| {
        let xi = xs.iter().position(|&a| a == x)?;
        let yi = ys.iter().position(|&b| b == y)?;
        Some(t.f[xi * ys.len() + yi])
    };
    match v.clause.as_str() {
        "witness" | "bound" => table(v.radii[0]).is_err(),
        "a" => match table(v.radii[0]) {
            Ok(t) => {
                let xi = xs.iter().position(|&a| a == v.points[0]);
                xi.is_some_and(|xi| ax7_a(inst, perm, &t, xi, &ys, v.points[0]).is_some())
            }
            Err(_) => true,
        },
        _ => match (table(v.radii[0]), table(v.radii[1])) {
            (Ok(t1), Ok(t2)) => {
                let (x, y, x2, y2) = (v.points[0], v.points[1], v.points[2], v.points[3]);
                match (lookup(&t1, x, y), lookup(&t2, x2, y2)) {
                    (Some(f), Some(f2)) => ax7_bc(inst, perm, (x, y, v.radii[0], f), (x2, y2, v.radii[1], f2)).is_some(),
                    _ => false,
                }
            }
            _ => true,
        },
    }
}

// ---------- axiom 8 ----------

fn claim_pair(inst: &SpecialInstance, x: usize, x2: usize, y: usize, r: Q, r2: Q) -> Option<usize> {
    match inst.family.as_ref()? {
        SpecialFamily::Gs { p, n } => (x != x2).then(|| Fpn::new(*p, *n).ok().map(|f| gs_pair_split(&f, x, x2, y))).flatten(),
        SpecialFamily::Hp { n, tau, mu } => hp_pair_split(*n, *tau, *mu, x, x2, y, r, r2).map(|t| t.0),
    }
}

/// Which side carries the edge block at z, if either.
#[allow(clippy::too_many_arguments)]
fn pair_blocks(inst: &SpecialInstance, perm: Perm, s0: &[usize], s1: &[usize], ys: &[usize], z: usize, small: Q) -> Option<EdgeSide> {
    let mz = &inst.metrics[perm[2]];
    let zs = mz.ball(z, small);
    // block order (y, z, x) is handled through a role permutation
    let rp = [perm[1], perm[2], perm[0]];
    let holds = |e: &[usize], ne: &[usize]| {
        block_violation(inst.oracle, rp, ys, &zs, e, true).is_none()
            && block_violation(inst.oracle, rp, ys, &zs, ne, false).is_none()
    };
    if holds(s1, s0) {
        Some(EdgeSide::XPrime)
    } else if holds(s0, s1) {
        Some(EdgeSide::X)
    } else {
        None
    }
}

/// Axiom 8 at one instance; `Ok` carries whether the claim witness was used.
fn ax8(inst: &SpecialInstance, perm: Perm, x: usize, x2: usize, y: usize, r: Q, r2: Q) -> std::result::Result<bool, Violation> {
    let [mx, my, mz] = [&inst.metrics[perm[0]], &inst.metrics[perm[1]], &inst.metrics[perm[2]]];
    let r3 = mx.d(x, x2) - r - r2;
    let r0 = r.min(r2).min(r3) / q(3, 1);
    let small = r0 / q(2, 1);
    let s0 = mx.ball(x, r);
    let s1 = mx.ball(x2, r2);
    let ys = my.ball(y, small);
    if let Some(z) = claim_pair(inst, x, x2, y, r, r2) {
        if z < mz.size && pair_blocks(inst, perm, &s0, &s1, &ys, z, small).is_some() {
            return Ok(true);
        }
    }
    if (0..mz.size).any(|z| pair_blocks(inst, perm, &s0, &s1, &ys, z, small).is_some()) {
        return Ok(false);
    }
    Err(viol(None, Some(perm), vec![x, x2, y], vec![r, r2], "split", format!("no z splits the balls (r'' = {r3})")))
}

fn ax8_domain(inst: &SpecialInstance, perm: Perm, radii: &[Q]) -> Vec<(usize, usize, usize, Q, Q)> {
    let mx = &inst.metrics[perm[0]];
    let ys = inst.metrics[perm[1]].sm();
    let mut out = Vec::new();
    for x in mx.lg_plus() {
        for x2 in 0..mx.size {
            let d = mx.d(x, x2);
            for &r in radii {
                for &r2 in radii {
                    let r3 = d - r - r2;
                    if r3 > q(2, 1) * r.max(r2) {
                        out.extend(ys.iter().map(|&y| (x, x2, y, r, r2)));
                    }
                }
            }
        }
    }
    out
}

fn verify8(inst: &SpecialInstance, budget: usize) -> AxiomReport {
    let mu2 = inst.params.mu * inst.params.mu;
    let (mut radii, dom) = inst.window(true);
    if dom == RadiusDomain::Window {
        radii.retain(|&r| r >= inst.params.rho && r < mu2);
    }
    let mut rep = AxiomReport::new(8, dom);
    for perm in PERMS {
        let dom = sample(ax8_domain(inst, perm, &radii), budget, &mut rep.mode);
        rep.checked += dom.len();
        let res: Vec<std::result::Result<bool, Violation>> =
            dom.par_iter().map(|&(x, x2, y, r, r2)| ax8(inst, perm, x, x2, y, r, r2)).collect();
        for r in res {
            match r {
                Ok(true) => rep.claim_witnesses += 1,
                Ok(false) => rep.search_witnesses += 1,
                Err(v) => {
                    rep.fail(v);
                    return rep;
                }
            }
        }
    }
    rep
}

// ---------- axiom 9 ----------

fn ax9(inst: &SpecialInstance, part: usize) -> Option<Violation> {
    let m = &inst.metrics[part];
    let lg: BTreeSet<usize> = m.lg_plus().into_iter().collect();
    let common: Vec<usize> = m.sm_plus().into_iter().filter(|y| lg.contains(y)).collect();
    (!common.is_empty()).then(|| {
        viol(Some(part), None, common.clone(), vec![], "disjoint", format!("{} common points", common.len()))
    })
}

// ---------- driver ----------

fn run<T: Sync + Clone>(rep: &mut AxiomReport, dom: Vec<T>, budget: usize, f: impl Fn(&T) -> Option<Violation> + Sync + Send) {
    let dom = sample(dom, budget, &mut rep.mode);
    rep.checked += dom.len();
    if let Some(v) = first_failure(&dom, f) {
        rep.fail(v);
    }
}

/// Check one axiom (1..=9); at most about `budget` instances per quantifier block.
pub fn verify_axiom(inst: &SpecialInstance, axiom: u8, budget: usize) -> Result<AxiomReport> {
    let parts = [0usize, 1, 2];
    let rep = match axiom {
        1 => {
            let mut rep = AxiomReport::new(1, RadiusDomain::None);
            run(&mut rep, parts.to_vec(), budget, |&k| ax1(inst, k));
            rep
        }
        2 => {
            let mut rep = AxiomReport::new(2, RadiusDomain::Realizable);
            let radii = inst.realizable();
            let mut dom: Vec<(usize, usize, Q)> = Vec::new();
            for k in parts {
                for x in 0..inst.metrics[k].size {
                    dom.extend(radii.iter().map(|&r| (k, x, r)));
                }
            }
            run(&mut rep, dom, budget, |&(k, x, r)| ax2(inst, k, x, r));
            rep
        }
        3 => {
            let mut rep = AxiomReport::new(3, RadiusDomain::None);
            let dom: Vec<(Perm, usize)> = PERMS
                .iter()
                .flat_map(|&perm| {
                    let m = &inst.metrics[perm[0]];
                    let xs: BTreeSet<usize> = m.lg_plus().into_iter().chain(m.sm_plus()).collect();
                    xs.into_iter().map(move |x| (perm, x))
                })
                .collect();
            run(&mut rep, dom, budget, |&(perm, x)| ax3(inst, perm, x));
            rep
        }
        4 => {
            let mut rep = AxiomReport::new(4, RadiusDomain::None);
            let n = inst.n();
            let dom: Vec<(Perm, usize, usize, usize)> = PERMS
                .iter()
                .flat_map(|&perm| (0..n).flat_map(move |y| (0..n).flat_map(move |z| (0..n).map(move |z2| (perm, y, z, z2)))))
                .collect();
            run(&mut rep, dom, budget, |&(perm, y, z, z2)| ax4(inst, perm, y, z, z2));
            rep
        }
        5 => {
            let (radii, d) = inst.window(false);
            let mut rep = AxiomReport::new(5, d);
            let mut dom: Vec<(usize, usize, Q)> = Vec::new();
            for k in parts {
                let m = &inst.metrics[k];
                let xs: BTreeSet<usize> = m.lg_plus().into_iter().chain(m.sm_plus()).collect();
                for x in xs {
                    dom.extend(radii.iter().map(|&r| (k, x, r)));
                }
            }
            run(&mut rep, dom, budget, |&(k, x, r)| ax5(inst, k, x, r));
            rep
        }
        6 => {
            let (radii, d) = inst.window(false);
            let mut rep = AxiomReport::new(6, d);
            let grid = inst.full_grid();
            let mut dom = Vec::new();
            for k in parts {
                for &r1 in &radii {
                    for &r2 in grid.iter().filter(|&&r2| r2 > r1 && r2 <= Q::one()) {
                        dom.extend((0..inst.metrics[k].size).map(|c| (k, c, r1, r2)));
                    }
                }
            }
            run(&mut rep, dom, budget, |&(k, c, r1, r2)| ax6(inst, k, c, r1, r2));
            rep
        }
        7 => verify7(inst, budget),
        8 => verify8(inst, budget),
        9 => {
            let mut rep = AxiomReport::new(9, RadiusDomain::None);
            run(&mut rep, parts.to_vec(), budget, |&k| ax9(inst, k));
            rep
        }
        _ => return Err(Error::InvalidParameter(format!("axiom {axiom} is not in 1..=9"))),
    };
    Ok(rep)
}

pub fn verify_all(inst: &SpecialInstance, budget: usize) -> Vec<AxiomReport> {
    (1..=9).map(|a| verify_axiom(inst, a, budget).expect("axiom ids are in range")).collect()
}

/// Re-run the single check named by a violation; true when it still fails.
pub fn reevaluate(inst: &SpecialInstance, axiom: u8, v: &Violation) -> bool {
    let pt = |i: usize| v.points.get(i).copied().unwrap_or(0);
    let rd = |i: usize| v.radii.get(i).copied().unwrap_or_else(Q::zero);
    match (axiom, v.part, v.perm) {
        (1, Some(k), _) => ax1(inst, k).is_some(),
        (2, Some(k), _) => ax2(inst, k, pt(0), rd(0)).is_some(),
        (3, _, Some(perm)) => ax3(inst, perm, pt(0)).is_some(),
        (4, _, Some(perm)) => ax4(inst, perm, pt(0), pt(1), pt(2)).is_some(),
        (5, Some(k), _) => ax5(inst, k, pt(0), rd(0)).is_some(),
        (6, Some(k), _) => ax6(inst, k, pt(0), rd(0), rd(1)).is_some(),
        (7, _, Some(_)) => recheck7(inst, v),
        (8, _, Some(perm)) => ax8(inst, perm, pt(0), pt(1), pt(2), rd(0), rd(1)).is_err(),
        (9, Some(k), _) => ax9(inst, k).is_some(),
        _ => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construct::{GsOracle, HpOracle};
    use crate::special::metric::{gs_metric, hp_metric};

    fn gs_inst(o: &GsOracle) -> SpecialInstance<'_> {
        SpecialInstance::new(
            o,
            gs_metric(3, 2).unwrap(),
            SpecialParams::gs(3, q(1, 27)),
            Some(SpecialFamily::Gs { p: 3, n: 2 }),
        )
        .unwrap()
    }

    #[test]
    fn gs_params() {
        let p = SpecialParams::gs(3, q(1, 100));
        assert_eq!((p.mu, p.tau, p.alpha), (q(1, 9), q(1, 9), q(1, 4)));
        let h = SpecialParams::hp(2, q(6, 25), q(1, 20), q(1, 1000));
        assert_eq!((h.tau, h.alpha), (q(19, 25), q(1, 400)));
    }

    #[test]
    fn gs_window_falls_back() {
        let o = GsOracle::new(3, 2).unwrap();
        let inst = gs_inst(&o);
        let (r, d) = inst.window(false);
        assert_eq!(d, RadiusDomain::Realizable);
        assert_eq!(r, vec![q(1, 9), q(1, 3), Q::one()]);
    }

    #[test]
    fn fill_line_tiles() {
        for n in [50usize, 200] {
            for r in [q(1, 200), q(1, 50), q(3, 40), q(1, 5)] {
                let balls = fill_line(3, 40, r, n);
                let m = &hp_metric(n, q(1, 5), q(1, 20)).unwrap()[0];
                let pc = check_partition(m, &(3..=40).collect::<Vec<_>>(), &balls, r);
                assert!(pc.problem.is_none(), "n={n} r={r}: {:?}", pc.problem);
                assert!(pc.leftover <= 2 * balls.len().max(1));
            }
        }
    }

    #[test]
    fn gs_axioms() {
        let o = GsOracle::new(3, 2).unwrap();
        let inst = gs_inst(&o);
        for rep in verify_all(&inst, 1 << 20) {
            assert!(rep.passed, "axiom {}: {:?}", rep.axiom, rep.failing);
            assert_eq!(rep.mode, CheckMode::Exhaustive);
        }
    }

    #[test]
    fn violations_reevaluate() {
        // HP(40) with alpha far too large fails axiom 3
        let o = HpOracle { n: 40 };
        let mut params = SpecialParams::hp(2, q(6, 25), q(1, 20), q(1, 1000));
        params.alpha = q(9, 10);
        let fam = SpecialFamily::Hp { n: 40, tau: q(6, 25), mu: q(1, 20) };
        let inst = SpecialInstance::new(&o, hp_metric(40, q(6, 25), q(1, 20)).unwrap(), params, Some(fam)).unwrap();
        let rep = verify_axiom(&inst, 3, 1000).unwrap();
        assert!(!rep.passed);
        assert!(reevaluate(&inst, 3, rep.failing.as_ref().unwrap()));
        assert!(verify_axiom(&inst, 10, 10).is_err());
    }
}
