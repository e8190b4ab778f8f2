//! Finite metric multigraphs.
//!
//! Loops and parallel edges are allowed; a loop contributes two half-edges
//! to the valence of its vertex. Graphs are immutable once built and always
//! connected with positive edge lengths and rank `|E| - |V| + 1 >= 1`.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

mod collapse;
mod girth;
pub mod io;
pub mod random;
mod subgraph;

pub use collapse::{collapse_tree, CollapsePoint, CollapseResult, ConeEdge};
pub use girth::{girth, Girth};
pub use subgraph::{find_small_subgraph, Subgraph};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GraphError {
    #[error("vertex {0} declared twice")]
    DuplicateVertex(usize),
    #[error("edge {0} declared twice")]
    DuplicateEdge(usize),
    #[error("edge {edge} references unknown vertex {vertex}")]
    UnknownVertex { edge: usize, vertex: usize },
    #[error("edge {edge} has invalid length {length}")]
    BadLength { edge: usize, length: f64 },
    #[error("graph is not connected")]
    Disconnected,
    #[error("graph has rank {0}; at least one circuit is required")]
    Acyclic(i64),
    #[error("unknown edge {0}")]
    UnknownEdge(usize),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("subgraph contains a circuit")]
    NotATree,
    #[error("graph is not trivalent: {}", .0.join("; "))]
    NotTrivalent(Vec<String>),
    #[error("collapse point must be an interior point of an edge of the subgraph")]
    PointNotOnSubgraph,
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub id: usize,
    pub u: usize,
    pub v: usize,
    pub length: f64,
}

impl Edge {
    pub fn is_loop(&self) -> bool {
        self.u == self.v
    }

    /// The endpoint opposite `w`; for loops, `w` itself.
    pub fn other(&self, w: usize) -> usize {
        if self.u == w {
            self.v
        } else {
            self.u
        }
    }

    pub fn touches(&self, w: usize) -> bool {
        self.u == w || self.v == w
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetricGraph {
    name: String,
    vertices: BTreeSet<usize>,
    edges: BTreeMap<usize, Edge>,
}

impl MetricGraph {
    pub fn new(
        name: impl Into<String>,
        vertices: impl IntoIterator<Item = usize>,
        edges: impl IntoIterator<Item = Edge>,
    ) -> Result<Self, GraphError> {
        let mut vs = BTreeSet::new();
        for v in vertices {
            if !vs.insert(v) {
                return Err(GraphError::DuplicateVertex(v));
            }
        }
        let mut es = BTreeMap::new();
        for e in edges {
            for w in [e.u, e.v] {
                if !vs.contains(&w) {
                    return Err(GraphError::UnknownVertex { edge: e.id, vertex: w });
                }
            }
            if !(e.length > 0.0) || !e.length.is_finite() {
                return Err(GraphError::BadLength { edge: e.id, length: e.length });
            }
            if es.insert(e.id, e).is_some() {
                return Err(GraphError::DuplicateEdge(e.id));
            }
        }
        let g = MetricGraph { name: name.into(), vertices: vs, edges: es };
        if !g.is_connected() {
            return Err(GraphError::Disconnected);
        }
        if g.rank() < 1 {
            return Err(GraphError::Acyclic(g.rank()));
        }
        Ok(g)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn vertices(&self) -> impl Iterator<Item = usize> + '_ {
        self.vertices.iter().copied()
    }

    pub fn edges(&self) -> impl Iterator<Item = &Edge> + '_ {
        self.edges.values()
    }

    pub fn edge(&self, id: usize) -> Result<&Edge, GraphError> {
        self.edges.get(&id).ok_or(GraphError::UnknownEdge(id))
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn has_vertex(&self, v: usize) -> bool {
        self.vertices.contains(&v)
    }

    /// First Betti number `|E| - |V| + 1`.
    pub fn rank(&self) -> i64 {
        self.edges.len() as i64 - self.vertices.len() as i64 + 1
    }

    pub fn total_length(&self) -> f64 {
        self.edges.values().map(|e| e.length).sum()
    }

    pub fn min_edge_length(&self) -> f64 {
        self.edges.values().map(|e| e.length).fold(f64::INFINITY, f64::min)
    }

    /// Edges at `v`, with loops listed twice.
    pub fn half_edges(&self, v: usize) -> Vec<usize> {
        let mut out = Vec::new();
        for e in self.edges.values() {
            if e.u == v {
                out.push(e.id);
            }
            if e.v == v {
                out.push(e.id);
            }
        }
        out
    }

    pub fn valence(&self, v: usize) -> usize {
        self.half_edges(v).len()
    }

    /// Copy with new edge lengths, keyed by edge id.
    pub fn with_lengths(&self, lengths: &BTreeMap<usize, f64>) -> Result<Self, GraphError> {
        let edges: Vec<Edge> = self
            .edges
            .values()
            .map(|e| Edge { length: lengths.get(&e.id).copied().unwrap_or(e.length), ..*e })
            .collect();
        MetricGraph::new(self.name.clone(), self.vertices.iter().copied(), edges)
    }

    fn is_connected(&self) -> bool {
        let Some(&start) = self.vertices.iter().next() else {
            return false;
        };
        let mut adj: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for e in self.edges.values() {
            adj.entry(e.u).or_default().push(e.v);
            adj.entry(e.v).or_default().push(e.u);
        }
        let mut seen = BTreeSet::from([start]);
        let mut stack = vec![start];
        while let Some(w) = stack.pop() {
            for &n in adj.get(&w).into_iter().flatten() {
                if seen.insert(n) {
                    stack.push(n);
                }
            }
        }
        seen.len() == self.vertices.len()
    }
}

/// Outcome of [`validate_trivalent`].
#[derive(Debug, Clone, PartialEq)]
pub struct TrivalenceReport {
    pub trivalent: bool,
    pub rank: i64,
    pub violations: Vec<String>,
}

/// Checks that every vertex has valence 3, which for rank `k` forces
/// `3k - 3` edges and `2k - 2` vertices.
pub fn validate_trivalent(g: &MetricGraph) -> TrivalenceReport {
    let k = g.rank();
    let mut violations = Vec::new();
    for v in g.vertices() {
        let val = g.valence(v);
        if val != 3 {
            violations.push(format!("vertex {v} has valence {val}"));
        }
    }
    if g.edge_count() as i64 != 3 * k - 3 {
        violations.push(format!("{} edges, expected 3k-3 = {}", g.edge_count(), 3 * k - 3));
    }
    if g.vertex_count() as i64 != 2 * k - 2 {
        violations.push(format!("{} vertices, expected 2k-2 = {}", g.vertex_count(), 2 * k - 2));
    }
    TrivalenceReport { trivalent: violations.is_empty(), rank: k, violations }
}

/// Builds edges from `(u, v, length)` triples numbered from 0.
pub fn edges_from(list: &[(usize, usize, f64)]) -> Vec<Edge> {
    list.iter().enumerate().map(|(id, &(u, v, length))| Edge { id, u, v, length }).collect()
}

/// Two vertices joined by three edges.
pub fn theta(lengths: [f64; 3]) -> MetricGraph {
    MetricGraph::new("theta", [0, 1], edges_from(&[(0, 1, lengths[0]), (0, 1, lengths[1]), (0, 1, lengths[2])]))
        .expect("theta graph is valid")
}

/// Two loops joined by a bridge: edges are loop at 0, loop at 1, bridge.
pub fn dumbbell(loop0: f64, loop1: f64, bridge: f64) -> MetricGraph {
    MetricGraph::new("dumbbell", [0, 1], edges_from(&[(0, 0, loop0), (1, 1, loop1), (0, 1, bridge)]))
        .expect("dumbbell graph is valid")
}
