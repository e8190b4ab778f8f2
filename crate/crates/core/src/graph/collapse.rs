//! Collapsing a tree `S ⊂ X` to a cone point.
//!
//! `R` is `X` with the interior of `S` removed. Every half-edge of `R`
//! attached to a vertex of `S` gets its own copy of that vertex (this is the
//! vertex splitting; a loop at a vertex of `S` becomes an edge between two
//! split copies), and every split copy `v'` is joined to the cone point `p'`
//! by a cone edge as long as the unique `S`-path from the original vertex
//! to the chosen point `p ∈ S`. The split copies then have valence two and
//! are fused away, so each `R` edge touching `S` becomes a single edge of
//! `Y` ending at the cone point, lengthened by its cone edges.

use std::collections::{BTreeMap, BTreeSet};

use super::{validate_trivalent, Edge, GraphError, MetricGraph, Subgraph};

/// An interior point of an edge: `t ∈ (0, 1)` measured from the edge's `u`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CollapsePoint {
    pub edge: usize,
    pub t: f64,
}

/// One cone edge `[v', p']`, already fused into `y_edge`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConeEdge {
    /// Identifier given to the split copy `v'`.
    pub split_vertex: usize,
    /// Vertex of `S` that `v'` was split from.
    pub original_vertex: usize,
    /// Edge of `R` (same id in `X` and `Y`) attached at `v'`.
    pub edge: usize,
    pub length: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CollapseResult {
    pub y: MetricGraph,
    pub cone_vertex: usize,
    pub cone_edges: Vec<ConeEdge>,
    /// Split copy → original vertex of `X`.
    pub split_map: BTreeMap<usize, usize>,
    pub point: CollapsePoint,
    /// `len(S)`.
    pub subgraph_length: f64,
}

impl CollapseResult {
    pub fn cone_length(&self) -> f64 {
        self.cone_edges.iter().map(|c| c.length).sum()
    }

    /// Valence of the cone point in `Y`.
    pub fn cone_valence(&self) -> usize {
        self.cone_edges.len()
    }
}

/// Collapses the tree `s` of the trivalent graph `x` to a cone point over
/// `point` (default: midpoint of the longest edge of `s`).
pub fn collapse_tree(
    x: &MetricGraph,
    s: &Subgraph<'_>,
    point: Option<CollapsePoint>,
) -> Result<CollapseResult, GraphError> {
    let report = validate_trivalent(x);
    if !report.trivalent {
        return Err(GraphError::NotTrivalent(report.violations));
    }
    if !std::ptr::eq(s.parent(), x) && s.parent() != x {
        return Err(GraphError::Precondition("subgraph belongs to a different graph".into()));
    }
    if !s.is_tree() {
        return Err(GraphError::NotATree);
    }
    let point = match point {
        Some(p) => p,
        None => {
            let longest = s
                .edge_ids()
                .map(|id| x.edge(id).unwrap())
                .max_by(|a, b| a.length.total_cmp(&b.length).then(b.id.cmp(&a.id)))
                .unwrap();
            CollapsePoint { edge: longest.id, t: 0.5 }
        }
    };
    if !s.contains(point.edge) || !(point.t > 0.0 && point.t < 1.0) {
        return Err(GraphError::PointNotOnSubgraph);
    }

    let to_point = tree_distances_to_point(x, s, point);
    let s_vertices = s.vertices();
    let cone_vertex = x.vertices().max().unwrap() + 1;
    let mut next_split = cone_vertex + 1;

    let mut cone_edges = Vec::new();
    let mut split_map = BTreeMap::new();
    let mut y_edges = Vec::new();
    for e in x.edges().filter(|e| !s.contains(e.id)) {
        let mut y_edge = *e;
        for (end, w) in [(0, e.u), (1, e.v)] {
            if !s_vertices.contains(&w) {
                continue;
            }
            let length = to_point[&w];
            cone_edges.push(ConeEdge { split_vertex: next_split, original_vertex: w, edge: e.id, length });
            split_map.insert(next_split, w);
            next_split += 1;
            y_edge.length += length;
            if end == 0 {
                y_edge.u = cone_vertex;
            } else {
                y_edge.v = cone_vertex;
            }
        }
        y_edges.push(y_edge);
    }

    let y_vertices: Vec<usize> = x
        .vertices()
        .filter(|v| !s_vertices.contains(v))
        .chain(std::iter::once(cone_vertex))
        .collect();
    let y = MetricGraph::new(format!("{}-collapsed", x.name()), y_vertices, y_edges)?;
    Ok(CollapseResult { y, cone_vertex, cone_edges, split_map, point, subgraph_length: s.length() })
}

/// Length of the `S`-path from each vertex of the tree `S` to `point`.
fn tree_distances_to_point(x: &MetricGraph, s: &Subgraph<'_>, point: CollapsePoint) -> BTreeMap<usize, f64> {
    let pe: Edge = *x.edge(point.edge).unwrap();
    let mut out = BTreeMap::new();
    for (root, offset) in [(pe.u, point.t * pe.length), (pe.v, (1.0 - point.t) * pe.length)] {
        // walk the component of S - pe containing root
        out.insert(root, offset);
        let mut stack = vec![root];
        let mut seen = BTreeSet::from([root]);
        while let Some(w) = stack.pop() {
            for id in s.edge_ids().filter(|&id| id != pe.id) {
                let e = x.edge(id).unwrap();
                if e.touches(w) {
                    let n = e.other(w);
                    if seen.insert(n) {
                        out.insert(n, out[&w] + e.length);
                        stack.push(n);
                    }
                }
            }
        }
    }
    out
}
