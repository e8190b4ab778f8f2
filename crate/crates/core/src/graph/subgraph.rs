use std::collections::BTreeSet;

use super::{GraphError, MetricGraph};

/// A set of edges of a parent graph, together with their endpoints.
#[derive(Debug, Clone, PartialEq)]
pub struct Subgraph<'g> {
    parent: &'g MetricGraph,
    edges: BTreeSet<usize>,
}

impl<'g> Subgraph<'g> {
    pub fn new(parent: &'g MetricGraph, edges: impl IntoIterator<Item = usize>) -> Result<Self, GraphError> {
        let edges: BTreeSet<usize> = edges.into_iter().collect();
        for &id in &edges {
            parent.edge(id)?;
        }
        if edges.is_empty() {
            return Err(GraphError::Precondition("subgraph must contain an edge".into()));
        }
        let s = Subgraph { parent, edges };
        if !s.is_connected() {
            return Err(GraphError::Precondition("subgraph must be connected".into()));
        }
        Ok(s)
    }

    pub fn parent(&self) -> &'g MetricGraph {
        self.parent
    }

    pub fn edge_ids(&self) -> impl Iterator<Item = usize> + '_ {
        self.edges.iter().copied()
    }

    pub fn contains(&self, edge: usize) -> bool {
        self.edges.contains(&edge)
    }

    /// Number of edges, `|S|`.
    pub fn size(&self) -> usize {
        self.edges.len()
    }

    pub fn length(&self) -> f64 {
        self.edges.iter().map(|id| self.parent.edge(*id).unwrap().length).sum()
    }

    pub fn vertices(&self) -> BTreeSet<usize> {
        let mut out = BTreeSet::new();
        for id in &self.edges {
            let e = self.parent.edge(*id).unwrap();
            out.insert(e.u);
            out.insert(e.v);
        }
        out
    }

    /// Edges outside the subgraph sharing at least one endpoint with it.
    pub fn adjacent_edges(&self) -> Vec<usize> {
        let vs = self.vertices();
        self.parent
            .edges()
            .filter(|e| !self.edges.contains(&e.id) && (vs.contains(&e.u) || vs.contains(&e.v)))
            .map(|e| e.id)
            .collect()
    }

    /// No loops, and `|V(S)| = |S| + 1` for a connected edge set.
    pub fn is_tree(&self) -> bool {
        self.vertices().len() == self.edges.len() + 1
    }

    fn is_connected(&self) -> bool {
        let vs = self.vertices();
        let mut seen = BTreeSet::from([*vs.iter().next().unwrap()]);
        let mut grew = true;
        while grew {
            grew = false;
            for id in &self.edges {
                let e = self.parent.edge(*id).unwrap();
                if seen.contains(&e.u) != seen.contains(&e.v) {
                    seen.insert(e.u);
                    seen.insert(e.v);
                    grew = true;
                }
            }
        }
        seen.len() == vs.len()
    }
}

/// Grows a connected subgraph around a short edge.
///
/// Starting from `S = {e}`, repeatedly absorbs an adjacent edge of length at
/// most `m · len(S)` (the shortest one, lowest id on ties) until every
/// adjacent edge is longer than that. Each absorption multiplies `len(S)` by
/// at most `m + 1`, so `len(S) < l0 (m+1)^{|S|-1}` holds throughout.
pub fn find_small_subgraph(g: &MetricGraph, e: usize, m: f64, l0: f64) -> Result<Subgraph<'_>, GraphError> {
    let seed = g.edge(e)?;
    if !(m > 0.0) || !m.is_finite() {
        return Err(GraphError::Precondition(format!("m = {m} must be positive")));
    }
    if !(seed.length < l0) {
        return Err(GraphError::Precondition(format!(
            "seed edge {e} has length {} >= l0 = {l0}",
            seed.length
        )));
    }
    let mut s = Subgraph { parent: g, edges: BTreeSet::from([e]) };
    let mut len = seed.length;
    loop {
        let absorbable = s
            .adjacent_edges()
            .into_iter()
            .map(|id| g.edge(id).unwrap())
            .filter(|f| f.length <= m * len)
            .min_by(|a, b| a.length.total_cmp(&b.length).then(a.id.cmp(&b.id)));
        match absorbable {
            Some(f) => {
                s.edges.insert(f.id);
                len += f.length;
            }
            None => return Ok(s),
        }
    }
}
