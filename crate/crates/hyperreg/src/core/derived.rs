use crate::core::bip::{BipartiteGraph, SimpleGraph};
use crate::core::three::ThreeGraph;
use crate::error::{Error, Result};

/// Index of the pair {i,j} (i<j) in the lexicographic list of pairs of `0..n`.
pub fn pair_index(n: usize, i: usize, j: usize) -> usize {
    let (i, j) = if i < j { (i, j) } else { (j, i) };
    i * (2 * n - i - 1) / 2 + (j - i - 1)
}

/// Inverse of [`pair_index`].
pub fn pair_at(n: usize, mut idx: usize) -> (usize, usize) {
    for i in 0..n {
        let row = n - i - 1;
        if idx < row {
            return (i, i + 1 + idx);
        }
        idx -= row;
    }
    panic!("pair index out of range")
}

/// The incidence graph between vertices and vertex pairs: (a, {b,c}) is an
/// edge iff {a,b,c} is an edge. Right vertices follow [`pair_index`].
pub fn graph_of(h: &ThreeGraph) -> BipartiteGraph {
    let n = h.n();
    let right = n * n.saturating_sub(1) / 2;
    let mut edges = Vec::with_capacity(3 * h.edge_count());
    for [a, b, c] in h.edges() {
        edges.push((a, pair_index(n, b, c)));
        edges.push((b, pair_index(n, a, c)));
        edges.push((c, pair_index(n, a, b)));
    }
    BipartiteGraph::new(n, right, edges).expect("each incidence occurs once")
}

/// Three disjoint copies X = 0..n, Y = n..2n, Z = 2n..3n of V(h), with
/// x_u y_v z_w an edge iff {u,v,w} is an edge of h.
pub fn trip(h: &ThreeGraph) -> ThreeGraph {
    let n = h.n();
    let mut edges = Vec::with_capacity(6 * h.edge_count());
    for [a, b, c] in h.edges() {
        for [u, v, w] in [[a, b, c], [a, c, b], [b, a, c], [b, c, a], [c, a, b], [c, b, a]] {
            edges.push([u, n + v, 2 * n + w]);
        }
    }
    let parts = [(0..n).collect(), (n..2 * n).collect(), (2 * n..3 * n).collect()];
    ThreeGraph::new(3 * n, edges)
        .and_then(|g| g.with_partition(parts))
        .expect("Trip is 3-partite by construction")
}

/// Two copies of V(g) with u_v w_v' adjacent iff vv' is an edge of g.
pub fn bip(g: &SimpleGraph) -> BipartiteGraph {
    BipartiteGraph::from_fn(g.n(), g.n(), |a, b| a != b && g.has(a, b))
}

/// Induced sub-3-graph on `s`, re-indexed to `0..|s|` in increasing order of `s`.
pub fn induce(h: &ThreeGraph, s: &[usize]) -> Result<ThreeGraph> {
    let mut sel: Vec<usize> = s.to_vec();
    sel.sort_unstable();
    sel.dedup();
    if let Some(&bad) = sel.iter().find(|&&v| v >= h.n()) {
        return Err(Error::OutOfRange { index: bad, n: h.n() });
    }
    let mut pos = vec![usize::MAX; h.n()];
    for (i, &v) in sel.iter().enumerate() {
        pos[v] = i;
    }
    let edges = h
        .edges()
        .filter(|e| e.iter().all(|&v| pos[v] != usize::MAX))
        .map(|[a, b, c]| [pos[a], pos[b], pos[c]]);
    let g = ThreeGraph::new(sel.len(), edges)?;
    match h.partition() {
        Some(parts) => {
            let np = [0, 1, 2].map(|p| {
                parts[p].iter().filter(|&&v| pos[v] != usize::MAX).map(|&v| pos[v]).collect()
            });
            g.with_partition(np)
        }
        None => Ok(g),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pair_indexing_roundtrips() {
        let n = 7;
        let mut k = 0;
        for i in 0..n {
            for j in i + 1..n {
                assert_eq!(pair_index(n, i, j), k);
                assert_eq!(pair_at(n, k), (i, j));
                k += 1;
            }
        }
    }

    #[test]
    fn graph_of_single_edge() {
        let h = ThreeGraph::new(3, [[0, 1, 2]]).unwrap();
        let g = graph_of(&h);
        assert_eq!(g.edge_count(), 3);
        assert!(g.has(0, pair_index(3, 1, 2)));
        assert!(g.has(1, pair_index(3, 0, 2)));
        assert!(g.has(2, pair_index(3, 0, 1)));
    }

    #[test]
    fn graph_of_empty() {
        let g = graph_of(&ThreeGraph::empty(4));
        assert_eq!((g.left(), g.right(), g.edge_count()), (4, 6, 0));
    }

    #[test]
    fn trip_single_edge_has_six_images() {
        let t = trip(&ThreeGraph::new(3, [[0, 1, 2]]).unwrap());
        assert_eq!(t.edge_count(), 6);
        assert!(t.contains(1, 3, 8));
        let e = trip(&ThreeGraph::empty(4));
        assert_eq!(e.n(), 12);
        assert_eq!(e.partition().unwrap()[2].len(), 4);
    }

    #[test]
    fn bip_examples() {
        let tri = SimpleGraph::new(3, [(0, 1), (1, 2), (0, 2)]).unwrap();
        assert_eq!(bip(&tri).edge_count(), 6);
        let path = SimpleGraph::new(2, [(0, 1)]).unwrap();
        let b = bip(&path);
        assert!(b.has(0, 1) && b.has(1, 0) && b.edge_count() == 2);
        assert_eq!(bip(&SimpleGraph::new(3, []).unwrap()).edge_count(), 0);
    }

    #[test]
    fn induce_examples() {
        let h = ThreeGraph::new(5, [[0, 1, 2], [2, 3, 4]]).unwrap();
        assert_eq!(induce(&h, &[0, 1, 2, 3, 4]).unwrap(), h);
        let s = induce(&h, &[4, 2, 3]).unwrap();
        assert_eq!(s.edges().collect::<Vec<_>>(), vec![[0, 1, 2]]);
        assert_eq!(induce(&h, &[]).unwrap().n(), 0);
        assert_eq!(induce(&h, &[9]), Err(Error::OutOfRange { index: 9, n: 5 }));
    }
}
