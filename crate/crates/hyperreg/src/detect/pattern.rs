//! Backtracking search for induced copies of a pattern.
//!
//! A 3-partite pattern is searched in Trip(host): its parts go to the three
//! copies of the host vertex set, so a host vertex may serve in two roles but
//! each role is injective. A bipartite pattern is searched side by side in a
//! bipartite host, or in Graph(host) for a 3-graph host.

use serde::Serialize;

use crate::construct::{build_canonical, Built, FamilySpec};
use crate::core::{graph_of, BipartiteGraph, ThreeGraph};
use crate::error::{Error, Result};

pub const DEFAULT_BUDGET: u64 = 2_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum SearchStatus {
    Found,
    AbsentCertified,
    Inconclusive,
}

/// Outcome of a pattern search. `embedding[i]` is the host vertex playing
/// pattern vertex `i` (for Graph(host) right vertices, a pair index).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PatternWitness {
    pub pattern: String,
    pub status: SearchStatus,
    pub embedding: Option<Vec<usize>>,
    pub nodes_explored: u64,
}

/// Something to search in.
#[derive(Clone, Copy, Debug)]
pub enum Host<'a> {
    Three(&'a ThreeGraph),
    Bip(&'a BipartiteGraph),
}

/// A pattern ready for searching.
#[derive(Clone, Debug)]
pub enum Pattern {
    /// Parts (consecutive vertex ranges) and the edge predicate.
    Three(ThreeGraph),
    Bip(BipartiteGraph),
}

impl Pattern {
    pub fn build(spec: &FamilySpec, vertex_cap: usize) -> Result<Self> {
        Ok(match build_canonical(spec, vertex_cap)? {
            Built::Three(h) => Pattern::Three(h),
            Built::Bip(g) => Pattern::Bip(g),
        })
    }

    pub fn vertex_count(&self) -> usize {
        match self {
            Pattern::Three(h) => h.n(),
            Pattern::Bip(g) => g.left() + g.right(),
        }
    }
}

#[derive(Clone, Copy)]
enum Check {
    /// Pattern vertices (one per part) and whether they form an edge.
    Triple([usize; 3], bool),
    /// Left and right pattern vertices.
    Pair(usize, usize, bool),
}

struct Csp<'a> {
    host: Host<'a>,
    bip: Option<BipartiteGraph>,
    order: Vec<usize>,
    /// group of each pattern vertex; equal groups must get distinct values
    group: Vec<usize>,
    /// current domain of the vertex at each position
    domain: Vec<Vec<usize>>,
    /// checks to apply to later positions once this position is assigned
    forward: Vec<Vec<(usize, Vec<Check>)>>,
    /// from this position on, no check has two unassigned members
    tail: usize,
    budget: u64,
    nodes: u64,
}

impl Csp<'_> {
    fn holds(&self, c: &Check, val: &[usize]) -> bool {
        match *c {
            Check::Triple([a, b, d], want) => {
                let h = match self.host {
                    Host::Three(h) => h,
                    Host::Bip(_) => unreachable!("3-partite patterns need a 3-graph host"),
                };
                h.contains(val[a], val[b], val[d]) == want
            }
            Check::Pair(l, r, want) => {
                let g = self.bip.as_ref().expect("bipartite view prepared");
                g.has(val[l], val[r]) == want
            }
        }
    }

    fn tick(&mut self) -> bool {
        self.nodes += 1;
        self.nodes <= self.budget
    }

    /// Returns Some(true) when found, Some(false) when exhausted, None on budget.
    fn run(&mut self, pos: usize, val: &mut Vec<usize>, used: &mut Vec<Vec<bool>>) -> Option<bool> {
        if pos == self.order.len() {
            return Some(true);
        }
        if pos == self.tail {
            return self.match_tail(pos, val, used);
        }
        let v = self.order[pos];
        let g = self.group[v];
        let domain = std::mem::take(&mut self.domain[pos]);
        let forward = std::mem::take(&mut self.forward[pos]);
        let mut result = Some(false);
        for &x in &domain {
            if used[g][x] {
                continue;
            }
            if !self.tick() {
                result = None;
                break;
            }
            val[v] = x;
            used[g][x] = true;
            let mut saved = Vec::with_capacity(forward.len());
            let mut alive = true;
            for (q, checks) in &forward {
                let u = self.order[*q];
                let gu = self.group[u];
                let old = std::mem::take(&mut self.domain[*q]);
                let mut kept = Vec::with_capacity(old.len());
                let mut live = false;
                for &y in &old {
                    val[u] = y;
                    if checks.iter().all(|c| self.holds(c, val)) {
                        kept.push(y);
                        live |= !used[gu][y];
                    }
                }
                self.domain[*q] = kept;
                saved.push((*q, old));
                if !live {
                    alive = false;
                    break;
                }
            }
            let r = if alive { self.run(pos + 1, val, used) } else { Some(false) };
            for (q, old) in saved {
                self.domain[q] = old;
            }
            used[g][x] = false;
            match r {
                Some(false) => {}
                other => {
                    result = other;
                    break;
                }
            }
        }
        self.domain[pos] = domain;
        self.forward[pos] = forward;
        result
    }

    /// The remaining vertices only interact through injectivity, so each
    /// group is a bipartite matching problem.
    fn match_tail(&mut self, pos: usize, val: &mut [usize], used: &[Vec<bool>]) -> Option<bool> {
        let n = self.order.len();
        for g in 0..used.len() {
            let members: Vec<usize> = (pos..n).filter(|&q| self.group[self.order[q]] == g).collect();
            if members.is_empty() {
                continue;
            }
            let mut owner: Vec<Option<usize>> = vec![None; used[g].len()];
            for i in 0..members.len() {
                let mut seen = vec![false; used[g].len()];
                match self.augment(i, &members, &mut owner, &mut seen, &used[g]) {
                    None => return None,
                    Some(false) => return Some(false),
                    Some(true) => {}
                }
            }
            for (x, o) in owner.iter().enumerate() {
                if let Some(i) = o {
                    val[self.order[members[*i]]] = x;
                }
            }
        }
        Some(true)
    }

    fn augment(
        &mut self,
        i: usize,
        members: &[usize],
        owner: &mut [Option<usize>],
        seen: &mut [bool],
        used: &[bool],
    ) -> Option<bool> {
        for k in 0..self.domain[members[i]].len() {
            let x = self.domain[members[i]][k];
            if used[x] || seen[x] {
                continue;
            }
            if !self.tick() {
                return None;
            }
            seen[x] = true;
            let free = match owner[x] {
                None => true,
                Some(j) => self.augment(j, members, owner, seen, used)?,
            };
            if free {
                owner[x] = Some(i);
                return Some(true);
            }
        }
        Some(false)
    }
}

fn order_vertices(n: usize, checks: &[(Vec<usize>, Check)]) -> Vec<usize> {
    let mut degree = vec![0usize; n];
    for (vs, _) in checks {
        for &v in vs {
            degree[v] += 1;
        }
    }
    let mut chosen = vec![false; n];
    let mut order = Vec::with_capacity(n);
    let mut completes = vec![0usize; n];
    // number of unassigned members of each check
    let mut open: Vec<usize> = checks.iter().map(|(vs, _)| vs.len()).collect();
    let mut incident: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (i, (vs, _)) in checks.iter().enumerate() {
        for &v in vs {
            incident[v].push(i);
        }
    }
    for _ in 0..n {
        let next = (0..n)
            .filter(|&v| !chosen[v])
            .max_by_key(|&v| (completes[v], degree[v], std::cmp::Reverse(v)))
            .expect("vertices remain");
        chosen[next] = true;
        order.push(next);
        for &ci in &incident[next] {
            open[ci] -= 1;
            if open[ci] == 1 {
                if let Some(&last) = checks[ci].0.iter().find(|&&u| !chosen[u]) {
                    completes[last] += 1;
                }
            }
        }
    }
    order
}

/// Search `host` for an induced copy of `pattern` within `budget` nodes.
pub fn find_pattern(host: Host<'_>, pattern: &Pattern, name: &str, budget: u64) -> Result<PatternWitness> {
    search(host, pattern, name, budget, None)
}

/// As [`find_pattern`], with pattern vertex `v` restricted to `domains[v]`.
/// An absent result is certified only relative to these domains.
pub fn find_pattern_in(
    host: Host<'_>,
    pattern: &Pattern,
    name: &str,
    budget: u64,
    domains: &[Vec<usize>],
) -> Result<PatternWitness> {
    if domains.len() != pattern.vertex_count() {
        return Err(Error::Arity { expected: pattern.vertex_count(), got: domains.len() });
    }
    search(host, pattern, name, budget, Some(domains))
}

fn search(
    host: Host<'_>,
    pattern: &Pattern,
    name: &str,
    budget: u64,
    restrict: Option<&[Vec<usize>]>,
) -> Result<PatternWitness> {
    let (n, groups, checks, bip) = match (pattern, host) {
        (Pattern::Three(p), Host::Three(_)) => {
            let parts = p
                .partition()
                .ok_or_else(|| Error::Precondition("pattern carries no 3-partition".into()))?;
            let pm = p.part_map();
            let groups: Vec<usize> = pm.iter().map(|x| x.unwrap_or(0)).collect();
            let mut checks = Vec::new();
            for &a in &parts[0] {
                for &b in &parts[1] {
                    for &c in &parts[2] {
                        checks.push((vec![a, b, c], Check::Triple([a, b, c], p.contains(a, b, c))));
                    }
                }
            }
            (p.n(), groups, checks, None)
        }
        (Pattern::Three(_), Host::Bip(_)) => {
            return Err(Error::Precondition("a 3-partite pattern needs a 3-graph host".into()))
        }
        (Pattern::Bip(p), _) => {
            let g = match host {
                Host::Bip(g) => g.clone(),
                Host::Three(h) => graph_of(h),
            };
            let (l, r) = (p.left(), p.right());
            let groups: Vec<usize> = (0..l + r).map(|v| usize::from(v >= l)).collect();
            let mut checks = Vec::new();
            for a in 0..l {
                for b in 0..r {
                    checks.push((vec![a, l + b], Check::Pair(a, l + b, p.has(a, b))));
                }
            }
            (l + r, groups, checks, Some(g))
        }
    };

    let host_sizes = match (&bip, host) {
        (Some(g), _) => [g.left(), g.right(), 0],
        (None, Host::Three(h)) => [h.n(); 3],
        (None, Host::Bip(_)) => unreachable!("bipartite hosts are handled above"),
    };
    // degree filters
    let mut pdeg = vec![0usize; n];
    let mut pnon = vec![0usize; n];
    for (vs, c) in &checks {
        let want = match c {
            Check::Triple(_, w) | Check::Pair(_, _, w) => *w,
        };
        for &v in vs {
            if want {
                pdeg[v] += 1;
            } else {
                pnon[v] += 1;
            }
        }
    }
    let domain: Vec<Vec<usize>> = (0..n)
        .map(|v| {
            let size = host_sizes[groups[v]];
            let base: Vec<usize> = match restrict {
                Some(d) => d[v].iter().copied().filter(|&x| x < size).collect(),
                None => (0..size).collect(),
            };
            base.into_iter()
                .filter(|&x| match (&bip, host) {
                    (Some(g), _) => {
                        let (deg, other) = if groups[v] == 0 {
                            (g.row(x).count_ones(..), g.right())
                        } else {
                            (g.col(x).count_ones(..), g.left())
                        };
                        deg >= pdeg[v] && other - deg >= pnon[v]
                    }
                    (None, Host::Three(h)) => 2 * h.degree(x) >= pdeg[v],
                    _ => true,
                })
                .collect()
        })
        .collect();

    for g in 0..3 {
        if groups.iter().filter(|&&x| x == g).count() > host_sizes[g] {
            return Ok(PatternWitness {
                pattern: name.to_string(),
                status: SearchStatus::AbsentCertified,
                embedding: None,
                nodes_explored: 0,
            });
        }
    }
    let order = order_vertices(n, &checks);
    let mut pos_of = vec![0usize; n];
    for (i, &v) in order.iter().enumerate() {
        pos_of[v] = i;
    }
    let mut forward: Vec<Vec<(usize, Vec<Check>)>> = vec![Vec::new(); n];
    let mut tail = 0;
    for (vs, c) in &checks {
        let mut ps: Vec<usize> = vs.iter().map(|&v| pos_of[v]).collect();
        ps.sort_unstable();
        let (last, second) = (ps[ps.len() - 1], ps[ps.len() - 2]);
        tail = tail.max(second + 1);
        match forward[second].iter_mut().find(|(q, _)| *q == last) {
            Some((_, cs)) => cs.push(*c),
            None => forward[second].push((last, vec![*c])),
        }
    }
    let domain: Vec<Vec<usize>> = order.iter().map(|&v| domain[v].clone()).collect();
    let group_count = 3;
    let mut used: Vec<Vec<bool>> = (0..group_count).map(|g| vec![false; host_sizes[g].max(1)]).collect();
    let mut csp = Csp { host, bip, order, group: groups, domain, forward, tail, budget, nodes: 0 };
    let mut val = vec![0usize; n];
    let outcome = if n == 0 { Some(true) } else { csp.run(0, &mut val, &mut used) };
    let (status, embedding) = match outcome {
        Some(true) => {
            verify_embedding(host, pattern, &val)?;
            (SearchStatus::Found, Some(val))
        }
        Some(false) => (SearchStatus::AbsentCertified, None),
        None => (SearchStatus::Inconclusive, None),
    };
    Ok(PatternWitness { pattern: name.to_string(), status, embedding, nodes_explored: csp.nodes })
}

/// Re-check every edge and non-edge of an embedding against the host.
pub fn verify_embedding(host: Host<'_>, pattern: &Pattern, emb: &[usize]) -> Result<()> {
    let bad = |what: String| Err(Error::InvalidWitness(what));
    match pattern {
        Pattern::Three(p) => {
            let h = match host {
                Host::Three(h) => h,
                Host::Bip(_) => return bad("3-partite pattern in a bipartite host".into()),
            };
            let parts = p.partition().expect("pattern partition");
            for part in parts {
                let mut seen = std::collections::HashSet::new();
                if !part.iter().all(|&v| seen.insert(emb[v])) {
                    return bad("a role is not injective".into());
                }
            }
            for &a in &parts[0] {
                for &b in &parts[1] {
                    for &c in &parts[2] {
                        if p.contains(a, b, c) != h.contains(emb[a], emb[b], emb[c]) {
                            return bad(format!("pattern triple {a} {b} {c} disagrees"));
                        }
                    }
                }
            }
        }
        Pattern::Bip(p) => {
            let g = match host {
                Host::Bip(g) => g.clone(),
                Host::Three(h) => graph_of(h),
            };
            let l = p.left();
            for side in [0..l, l..l + p.right()] {
                let mut seen = std::collections::HashSet::new();
                if !side.clone().all(|v| seen.insert(emb[v])) {
                    return bad("a side is not injective".into());
                }
            }
            for a in 0..l {
                for b in 0..p.right() {
                    if p.has(a, b) != g.has(emb[a], emb[l + b]) {
                        return bad(format!("pattern pair {a} {b} disagrees"));
                    }
                }
            }
        }
    }
    Ok(())
}

/// Build `spec` and search for it.
pub fn find_family(host: Host<'_>, spec: &FamilySpec, budget: u64) -> Result<PatternWitness> {
    let name = format!("{:?}({})", spec.family, spec.k);
    let pattern = Pattern::build(spec, crate::construct::families::DEFAULT_VERTEX_CAP)?;
    find_pattern(host, &pattern, &name, budget)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construct::Family;

    fn three(f: Family, k: usize) -> ThreeGraph {
        build_canonical(&FamilySpec::new(f, k), 1 << 16).unwrap().three().unwrap()
    }

    #[test]
    fn restricted_domains() {
        let h = three(Family::Hbar, 3);
        let p = Pattern::build(&FamilySpec::new(Family::Hbar, 2), 1 << 16).unwrap();
        let all: Vec<Vec<usize>> = vec![(0..9).collect(); 6];
        let w = find_pattern_in(Host::Three(&h), &p, "h2", DEFAULT_BUDGET, &all).unwrap();
        assert_eq!(w.status, SearchStatus::Found);
        // the second part of the pattern pinned to one vertex cannot be injective
        let mut pinned = all.clone();
        pinned[2] = vec![3];
        pinned[3] = vec![3];
        let w = find_pattern_in(Host::Three(&h), &p, "h2", DEFAULT_BUDGET, &pinned).unwrap();
        assert_eq!(w.status, SearchStatus::AbsentCertified);
        assert!(find_pattern_in(Host::Three(&h), &p, "h2", DEFAULT_BUDGET, &all[..2]).is_err());
    }

    #[test]
    fn f2_in_itself() {
        let h = three(Family::F, 2);
        let w = find_family(Host::Three(&h), &FamilySpec::new(Family::F, 2), DEFAULT_BUDGET).unwrap();
        assert_eq!(w.status, SearchStatus::Found);
    }

    #[test]
    fn v1_absent_from_empty() {
        let h = ThreeGraph::empty(10);
        let w = find_family(Host::Three(&h), &FamilySpec::new(Family::V, 1), DEFAULT_BUDGET).unwrap();
        assert_eq!(w.status, SearchStatus::AbsentCertified);
    }

    #[test]
    fn half_graph_in_hbar() {
        let h = three(Family::Hbar, 3);
        let w = find_family(Host::Three(&h), &FamilySpec::new(Family::HalfGraph, 3), DEFAULT_BUDGET).unwrap();
        assert_eq!(w.status, SearchStatus::Found);
    }

    #[test]
    fn tiny_budget_is_inconclusive() {
        let h = three(Family::Hbar, 4);
        let w = find_family(Host::Three(&h), &FamilySpec::new(Family::HalfGraph, 5), 3).unwrap();
        assert_eq!(w.status, SearchStatus::Inconclusive);
    }

    #[test]
    fn half_graph_order_property_is_sharp() {
        let g = build_canonical(&FamilySpec::new(Family::HalfGraph, 3), 1 << 16).unwrap().bip().unwrap();
        let yes = find_family(Host::Bip(&g), &FamilySpec::new(Family::HalfGraph, 3), DEFAULT_BUDGET).unwrap();
        let no = find_family(Host::Bip(&g), &FamilySpec::new(Family::HalfGraph, 4), DEFAULT_BUDGET).unwrap();
        assert_eq!(yes.status, SearchStatus::Found);
        assert_eq!(no.status, SearchStatus::AbsentCertified);
    }

    #[test]
    fn monotone_under_supergraph() {
        let h = three(Family::Hbar, 2);
        let bigger = ThreeGraph::new(8, h.edges().chain([[5, 6, 7]])).unwrap();
        for host in [&h, &bigger] {
            let w = find_family(Host::Three(host), &FamilySpec::new(Family::Hbar, 2), DEFAULT_BUDGET).unwrap();
            assert_eq!(w.status, SearchStatus::Found);
        }
    }
}
