use std::cmp::{Ordering, Reverse};
use std::collections::{BTreeMap, BinaryHeap};

use super::{GraphError, MetricGraph};

/// A shortest circuit: its length and its edges in traversal order.
#[derive(Debug, Clone, PartialEq)]
pub struct Girth {
    pub length: f64,
    pub circuit: Vec<usize>,
}

#[derive(PartialEq)]
struct Dist(f64);

impl Eq for Dist {}

impl PartialOrd for Dist {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Dist {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0)
    }
}

/// Shortest path from `from` to `to` avoiding edge `skip`; returns the
/// length and the edge sequence.
fn shortest_path_avoiding(g: &MetricGraph, from: usize, to: usize, skip: usize) -> Option<(f64, Vec<usize>)> {
    let mut adj: BTreeMap<usize, Vec<(usize, usize, f64)>> = BTreeMap::new();
    for e in g.edges().filter(|e| e.id != skip && !e.is_loop()) {
        adj.entry(e.u).or_default().push((e.v, e.id, e.length));
        adj.entry(e.v).or_default().push((e.u, e.id, e.length));
    }
    let mut best: BTreeMap<usize, (f64, Option<(usize, usize)>)> = BTreeMap::new();
    best.insert(from, (0.0, None));
    let mut heap = BinaryHeap::from([(Reverse(Dist(0.0)), from)]);
    while let Some((Reverse(Dist(d)), w)) = heap.pop() {
        if d > best[&w].0 {
            continue;
        }
        if w == to {
            let mut path = Vec::new();
            let mut cur = to;
            while let Some((prev, edge)) = best[&cur].1 {
                path.push(edge);
                cur = prev;
            }
            path.reverse();
            return Some((d, path));
        }
        for &(n, id, len) in adj.get(&w).into_iter().flatten() {
            let nd = d + len;
            if best.get(&n).map_or(true, |&(old, _)| nd < old) {
                best.insert(n, (nd, Some((w, id))));
                heap.push((Reverse(Dist(nd)), n));
            }
        }
    }
    None
}

/// Length of the shortest circuit (simple closed curve).
///
/// Every shortest circuit runs through some edge `e = uv`, and is then `e`
/// followed by a shortest `v → u` path in `G - e`; taking the best such
/// candidate over all edges is exact. Loops are circuits by themselves.
pub fn girth(g: &MetricGraph) -> Result<Girth, GraphError> {
    let mut best: Option<Girth> = None;
    for e in g.edges() {
        let candidate = if e.is_loop() {
            Some(Girth { length: e.length, circuit: vec![e.id] })
        } else {
            shortest_path_avoiding(g, e.v, e.u, e.id).map(|(d, path)| {
                let mut circuit = vec![e.id];
                circuit.extend(path);
                Girth { length: e.length + d, circuit }
            })
        };
        if let Some(c) = candidate {
            if best.as_ref().map_or(true, |b| c.length < b.length) {
                best = Some(c);
            }
        }
    }
    best.ok_or(GraphError::Acyclic(g.rank()))
}
