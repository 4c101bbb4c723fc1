//! Text formats: "3G v1" for 3-graphs and "bip" for bipartite graphs.
//!
//! ```text
//! 3graph <n>
//! i j k        (0-based, i<j<k, one edge per line)
//! ```
//!
//! ```text
//! bip <m> <n>
//! i j
//! ```
//!
//! Both are ASCII and LF-terminated; emitted files list edges in increasing order.

use std::collections::HashSet;
use std::fmt::Write as _;

use crate::core::bip::BipartiteGraph;
use crate::core::three::ThreeGraph;
use crate::error::{Error, Result};

fn perr(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

fn nums(line: usize, s: &str, want: usize) -> Result<Vec<usize>> {
    let v: std::result::Result<Vec<usize>, _> = s.split_whitespace().map(str::parse).collect();
    let v = v.map_err(|e| perr(line, format!("bad integer: {e}")))?;
    if v.len() != want {
        return Err(perr(line, format!("expected {want} integers, found {}", v.len())));
    }
    Ok(v)
}

pub fn parse_3g(text: &str) -> Result<ThreeGraph> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
    let (ln, header) = lines.next().ok_or_else(|| perr(1, "empty input"))?;
    let n = match header.split_whitespace().collect::<Vec<_>>().as_slice() {
        ["3graph", n] => n.parse::<usize>().map_err(|e| perr(ln, format!("bad vertex count: {e}")))?,
        _ => return Err(perr(ln, "expected header `3graph <n>`")),
    };
    let mut seen = HashSet::new();
    let mut edges = Vec::new();
    for (ln, l) in lines {
        if l.trim().is_empty() {
            continue;
        }
        let v = nums(ln, l, 3)?;
        let (i, j, k) = (v[0], v[1], v[2]);
        if i == j || j == k || i == k {
            return Err(perr(ln, format!("degenerate triple {i} {j} {k}")));
        }
        if !(i < j && j < k) {
            return Err(perr(ln, "triple must satisfy i<j<k"));
        }
        if k >= n {
            return Err(perr(ln, format!("vertex {k} out of range for n={n}")));
        }
        if !seen.insert((i, j, k)) {
            return Err(perr(ln, "duplicate triple"));
        }
        edges.push([i, j, k]);
    }
    ThreeGraph::new(n, edges)
}

pub fn emit_3g(h: &ThreeGraph) -> String {
    let mut s = format!("3graph {}\n", h.n());
    for [a, b, c] in h.edges() {
        let _ = writeln!(s, "{a} {b} {c}");
    }
    s
}

pub fn parse_bip(text: &str) -> Result<BipartiteGraph> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
    let (ln, header) = lines.next().ok_or_else(|| perr(1, "empty input"))?;
    let (m, n) = match header.split_whitespace().collect::<Vec<_>>().as_slice() {
        ["bip", m, n] => (
            m.parse::<usize>().map_err(|e| perr(ln, format!("bad size: {e}")))?,
            n.parse::<usize>().map_err(|e| perr(ln, format!("bad size: {e}")))?,
        ),
        _ => return Err(perr(ln, "expected header `bip <m> <n>`")),
    };
    let mut g = Vec::new();
    let mut seen = HashSet::new();
    for (ln, l) in lines {
        if l.trim().is_empty() {
            continue;
        }
        let v = nums(ln, l, 2)?;
        if v[0] >= m || v[1] >= n {
            return Err(perr(ln, "index out of range"));
        }
        if !seen.insert((v[0], v[1])) {
            return Err(perr(ln, "duplicate pair"));
        }
        g.push((v[0], v[1]));
    }
    BipartiteGraph::new(m, n, g)
}

pub fn emit_bip(g: &BipartiteGraph) -> String {
    let mut s = format!("bip {} {}\n", g.left(), g.right());
    for (u, w) in g.edges() {
        let _ = writeln!(s, "{u} {w}");
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrip_3g_is_bit_exact() {
        let text = "3graph 5\n0 1 2\n0 3 4\n1 2 4\n";
        let g = parse_3g(text).unwrap();
        assert_eq!(emit_3g(&g), text);
    }

    #[test]
    fn roundtrip_bip() {
        let text = "bip 2 3\n0 2\n1 0\n1 1\n";
        assert_eq!(emit_bip(&parse_bip(text).unwrap()), text);
    }

    #[test]
    fn reports_line_numbers() {
        let err = parse_3g("3graph 4\n0 1 2\n1 1 3\n").unwrap_err();
        assert_eq!(err, Error::Parse { line: 3, msg: "degenerate triple 1 1 3".into() });
        assert!(matches!(parse_3g("graph 3\n"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(parse_3g("3graph 3\n2 1 0\n"), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(parse_bip("bip 1 1\n0 0\n0 0\n"), Err(Error::Parse { line: 3, .. })));
    }
}
