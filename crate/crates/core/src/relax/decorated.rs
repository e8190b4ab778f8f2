//! Carrier graphs encoded by a lift: a position in H³ per vertex and a group
//! word per oriented edge.
//!
//! The edge `u → v` with label `w` lifts to the geodesic from `pos(u)` to
//! `w · pos(v)`. Its far endpoint seen from `v` is `w⁻¹ · pos(u)`.
//!
//! File format: the graph-file format plus
//!
//! ```text
//! pos <vertex> x0 x1 x2 x3
//! label <edge> <word>
//! ```
//!
//! Edge lengths in the file are informational; they are recomputed.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt::Write as _;
use std::sync::Arc;

use nalgebra::Vector4;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::group::{GroupPresentation, Word};
use super::stallings::generates_free_group;
use super::RelaxError;
use crate::format::fmt17;
use crate::graph::io::{parse_err, parse_num, GraphFile};
use crate::graph::{Edge, GraphError, MetricGraph};
use crate::hyperbolic::{exp_map, tangent_and_dist, tangent_frame, HPoint, HTangent, DEGENERATE_DIST};
use crate::isometry::Isometry;

#[derive(Debug, Clone, PartialEq)]
pub struct DecoratedEdge {
    pub id: usize,
    pub u: usize,
    pub v: usize,
    pub label: Word,
}

/// One end of an edge: `head` is the `v` end.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct HalfEdge {
    pub edge: usize,
    pub head: bool,
}

/// Seed topologies for the relaxer.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Topology {
    /// Two vertices joined by edges labelled `1`, `a`, `b` (rank 2 only).
    Theta,
    /// A loop per generator, the loop vertices joined by a tree. For rank 2
    /// this is the dumbbell.
    Caterpillar,
}

impl Topology {
    pub fn as_str(&self) -> &'static str {
        match self {
            Topology::Theta => "theta",
            Topology::Caterpillar => "caterpillar",
        }
    }
}

impl std::str::FromStr for Topology {
    type Err = RelaxError;

    fn from_str(s: &str) -> Result<Self, RelaxError> {
        match s {
            "theta" => Ok(Topology::Theta),
            "caterpillar" | "dumbbell" => Ok(Topology::Caterpillar),
            _ => Err(RelaxError::Precondition(format!("unknown topology `{s}` (expected theta, dumbbell or caterpillar)"))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct DecoratedGraph {
    name: String,
    group: Arc<GroupPresentation>,
    positions: BTreeMap<usize, HPoint>,
    edges: BTreeMap<usize, DecoratedEdge>,
    transports: BTreeMap<usize, (Isometry, Isometry)>,
}

impl PartialEq for DecoratedGraph {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name
            && *self.group == *other.group
            && self.positions == other.positions
            && self.edges == other.edges
    }
}

impl DecoratedGraph {
    /// Builds and validates: every vertex has a position and valence at
    /// least three, the graph is connected with the group's rank, and the
    /// circuit words generate the free group on the generators.
    pub fn new(
        name: impl Into<String>,
        group: Arc<GroupPresentation>,
        positions: BTreeMap<usize, HPoint>,
        edges: impl IntoIterator<Item = DecoratedEdge>,
    ) -> Result<Self, RelaxError> {
        let mut map = BTreeMap::new();
        for e in edges {
            if let Some(l) = e.label.0.iter().find(|l| l.generator >= group.rank()) {
                return Err(RelaxError::Precondition(format!(
                    "edge {} uses generator {} but the group has rank {}",
                    e.id,
                    l.generator,
                    group.rank()
                )));
            }
            let id = e.id;
            if map.insert(id, e).is_some() {
                return Err(GraphError::DuplicateEdge(id).into());
            }
        }
        let g = DecoratedGraph::unchecked(name.into(), group, positions, map);
        g.validate()?;
        Ok(g)
    }

    fn unchecked(
        name: String,
        group: Arc<GroupPresentation>,
        positions: BTreeMap<usize, HPoint>,
        edges: BTreeMap<usize, DecoratedEdge>,
    ) -> Self {
        let transports = edges
            .values()
            .map(|e| {
                let t = e.label.evaluate(&group);
                let tinv = t.inverse();
                (e.id, (t, tinv))
            })
            .collect();
        DecoratedGraph { name, group, positions, edges, transports }
    }

    fn validate(&self) -> Result<(), RelaxError> {
        for e in self.edges.values() {
            for w in [e.u, e.v] {
                if !self.positions.contains_key(&w) {
                    return Err(RelaxError::Precondition(format!("vertex {w} of edge {} has no position", e.id)));
                }
            }
        }
        let low: Vec<String> = self
            .positions
            .keys()
            .filter(|&&v| self.valence(v) < 3)
            .map(|&v| format!("vertex {v} has valence {}", self.valence(v)))
            .collect();
        if !low.is_empty() {
            return Err(GraphError::NotTrivalent(low).into());
        }
        let topo = self.topology_with(|_| 1.0)?;
        if topo.rank() != self.group.rank() as i64 {
            return Err(RelaxError::Precondition(format!(
                "graph has rank {} but the group has rank {}",
                topo.rank(),
                self.group.rank()
            )));
        }
        if !generates_free_group(&self.circuit_words(), self.group.rank()) {
            return Err(RelaxError::NotSurjective);
        }
        Ok(())
    }

    fn topology_with(&self, len: impl Fn(&DecoratedEdge) -> f64) -> Result<MetricGraph, GraphError> {
        let edges: Vec<Edge> =
            self.edges.values().map(|e| Edge { id: e.id, u: e.u, v: e.v, length: len(e) }).collect();
        MetricGraph::new(self.name.clone(), self.positions.keys().copied(), edges)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn group(&self) -> &Arc<GroupPresentation> {
        &self.group
    }

    pub fn rank(&self) -> usize {
        self.group.rank()
    }

    pub fn vertices(&self) -> impl Iterator<Item = usize> + '_ {
        self.positions.keys().copied()
    }

    pub fn position(&self, v: usize) -> Option<&HPoint> {
        self.positions.get(&v)
    }

    pub fn positions(&self) -> &BTreeMap<usize, HPoint> {
        &self.positions
    }

    pub fn edges(&self) -> impl Iterator<Item = &DecoratedEdge> + '_ {
        self.edges.values()
    }

    pub fn edge(&self, id: usize) -> Option<&DecoratedEdge> {
        self.edges.get(&id)
    }

    pub fn vertex_count(&self) -> usize {
        self.positions.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Half-edges at `v` in edge order; a loop contributes its tail then its head.
    pub fn half_edges(&self, v: usize) -> Vec<HalfEdge> {
        let mut out = Vec::new();
        for e in self.edges.values() {
            if e.u == v {
                out.push(HalfEdge { edge: e.id, head: false });
            }
            if e.v == v {
                out.push(HalfEdge { edge: e.id, head: true });
            }
        }
        out
    }

    pub fn valence(&self, v: usize) -> usize {
        self.edges.values().map(|e| (e.u == v) as usize + (e.v == v) as usize).sum()
    }

    pub fn is_trivalent(&self) -> bool {
        self.positions.keys().all(|&v| self.valence(v) == 3)
    }

    /// The vertex a half-edge is attached to.
    pub fn half_edge_vertex(&self, h: HalfEdge) -> usize {
        let e = &self.edges[&h.edge];
        if h.head {
            e.v
        } else {
            e.u
        }
    }

    /// Far endpoint of a half-edge in the frame of its own vertex.
    pub fn far_point(&self, h: HalfEdge) -> HPoint {
        let e = &self.edges[&h.edge];
        let (t, tinv) = &self.transports[&h.edge];
        if h.head {
            tinv.apply(&self.positions[&e.u])
        } else {
            t.apply(&self.positions[&e.v])
        }
    }

    pub fn edge_length(&self, id: usize) -> f64 {
        let e = &self.edges[&id];
        hyperbolic_dist(&self.positions[&e.u], &self.transports[&id].0.apply(&self.positions[&e.v]))
    }

    pub fn lengths(&self) -> BTreeMap<usize, f64> {
        self.edges.keys().map(|&id| (id, self.edge_length(id))).collect()
    }

    pub fn total_length(&self) -> f64 {
        self.edges.keys().map(|&id| self.edge_length(id)).sum()
    }

    pub fn min_edge_length(&self) -> f64 {
        self.edges.keys().map(|&id| self.edge_length(id)).fold(f64::INFINITY, f64::min)
    }

    /// Unit tangents at `pos(v)` towards each far endpoint, with lengths.
    pub fn vertex_tangents(&self, v: usize) -> Result<Vec<(HalfEdge, HTangent, f64)>, RelaxError> {
        let p = &self.positions[&v];
        self.half_edges(v)
            .into_iter()
            .map(|h| {
                let q = self.far_point(h);
                tangent_and_dist(p, &q)
                    .map(|(t, d)| (h, t, d))
                    .map_err(|_| RelaxError::ZeroLengthEdge { edge: h.edge })
            })
            .collect()
    }

    /// Riemannian gradient of the total length with respect to `pos(v)`:
    /// minus the sum of unit tangents towards the far endpoints.
    pub fn vertex_gradient(&self, v: usize) -> Result<Vector4<f64>, RelaxError> {
        if !self.positions.contains_key(&v) {
            return Err(RelaxError::UnknownVertex(v));
        }
        let mut g = Vector4::zeros();
        for (_, t, _) in self.vertex_tangents(v)? {
            g -= t.vector();
        }
        Ok(g)
    }

    /// All pairwise angles between the half-edges at `v`, in pair order
    /// `(0,1), (0,2), …`.
    pub fn vertex_angles(&self, v: usize) -> Result<Vec<f64>, RelaxError> {
        let ts = self.vertex_tangents(v)?;
        let mut out = Vec::new();
        for i in 0..ts.len() {
            for j in i + 1..ts.len() {
                out.push(crate::hyperbolic::angle_between(&ts[i].1, &ts[j].1)?);
            }
        }
        Ok(out)
    }

    /// The underlying metric graph with the current lengths.
    pub fn to_metric_graph(&self) -> Result<MetricGraph, GraphError> {
        self.topology_with(|e| self.edge_length(e.id))
    }

    /// Words of the fundamental circuits of a breadth-first spanning tree
    /// rooted at the smallest vertex: `W(u) · label · W(v)⁻¹` for each edge
    /// outside the tree.
    pub fn circuit_words(&self) -> Vec<Word> {
        let Some(&root) = self.positions.keys().next() else { return Vec::new() };
        let mut path: BTreeMap<usize, Word> = BTreeMap::from([(root, Word::identity())]);
        let mut tree = BTreeSet::new();
        let mut queue = VecDeque::from([root]);
        while let Some(x) = queue.pop_front() {
            for e in self.edges.values() {
                if e.is_loop() {
                    continue;
                }
                let (next, step) = if e.u == x {
                    (e.v, e.label.clone())
                } else if e.v == x {
                    (e.u, e.label.inverse())
                } else {
                    continue;
                };
                if !path.contains_key(&next) {
                    let w = path[&x].mul(&step);
                    path.insert(next, w);
                    tree.insert(e.id);
                    queue.push_back(next);
                }
            }
        }
        self.edges
            .values()
            .filter(|e| !tree.contains(&e.id))
            .filter_map(|e| Some(path.get(&e.u)?.mul(&e.label).mul(&path.get(&e.v)?.inverse())))
            .collect()
    }

    /// Moves every position by `h` and conjugates the group by `h`; all
    /// lengths and angles are unchanged.
    pub fn transformed(&self, h: &Isometry) -> DecoratedGraph {
        let group = Arc::new(self.group.conjugated(h));
        let positions = self.positions.iter().map(|(&v, p)| (v, h.apply(p))).collect();
        DecoratedGraph::unchecked(self.name.clone(), group, positions, self.edges.clone())
    }

    /// Same graph with new positions for (some of) the vertices.
    pub fn with_positions(&self, updates: impl IntoIterator<Item = (usize, HPoint)>) -> Result<Self, RelaxError> {
        let mut g = self.clone();
        for (v, p) in updates {
            match g.positions.get_mut(&v) {
                Some(slot) => *slot = p,
                None => return Err(RelaxError::UnknownVertex(v)),
            }
        }
        Ok(g)
    }

    pub fn renamed(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    /// Perturbs every position by a random tangent vector of norm `scale`.
    pub fn perturbed(&self, rng: &mut impl Rng, scale: f64) -> Self {
        let mut g = self.clone();
        for p in g.positions.values_mut() {
            let frame = tangent_frame(p);
            let dir = random_unit3(rng);
            let v = frame[0] * dir[0] + frame[1] * dir[1] + frame[2] * dir[2];
            *p = exp_map(p, &(v * scale));
        }
        g
    }

    /// Contracts the non-loop edge `id`, merging its head into its tail.
    /// Words are rewired so that every circuit word stays conjugate to its
    /// original.
    pub fn contract_edge(&self, id: usize) -> Result<Self, RelaxError> {
        let e = self.edges.get(&id).ok_or(GraphError::UnknownEdge(id))?.clone();
        if e.is_loop() {
            return Err(RelaxError::Precondition(format!("edge {id} is a loop and cannot be contracted")));
        }
        let w = &e.label;
        let winv = w.inverse();
        let mut edges = BTreeMap::new();
        for f in self.edges.values().filter(|f| f.id != id) {
            let mut f = f.clone();
            match (f.u == e.v, f.v == e.v) {
                (true, true) => {
                    f.label = w.mul(&f.label).mul(&winv);
                    f.u = e.u;
                    f.v = e.u;
                }
                (true, false) => {
                    f.label = w.mul(&f.label);
                    f.u = e.u;
                }
                (false, true) => {
                    f.label = f.label.mul(&winv);
                    f.v = e.u;
                }
                (false, false) => {}
            }
            edges.insert(f.id, f);
        }
        let mut positions = self.positions.clone();
        positions.remove(&e.v);
        let g = DecoratedGraph::unchecked(self.name.clone(), self.group.clone(), positions, edges);
        g.validate()?;
        Ok(g)
    }

    /// Splits the half-edges `moved` off `v` onto a new vertex at `at`,
    /// joined to `v` by a new edge with identity label. If `v` is left with
    /// valence two it is fused away instead, which amounts to moving `v`.
    /// Returns the graph and the vertex now at `at`.
    pub(crate) fn split_vertex(&self, v: usize, moved: [HalfEdge; 2], at: HPoint) -> Result<(Self, usize), RelaxError> {
        if self.valence(v) == 3 {
            return Ok((self.with_positions([(v, at)])?, v));
        }
        let s = self.positions.keys().last().unwrap() + 1;
        let new_edge = self.edges.keys().last().unwrap() + 1;
        let mut edges = self.edges.clone();
        for h in moved {
            let e = edges.get_mut(&h.edge).ok_or(GraphError::UnknownEdge(h.edge))?;
            if h.head {
                e.v = s;
            } else {
                e.u = s;
            }
        }
        edges.insert(new_edge, DecoratedEdge { id: new_edge, u: v, v: s, label: Word::identity() });
        let mut positions = self.positions.clone();
        positions.insert(s, at);
        let g = DecoratedGraph::unchecked(self.name.clone(), self.group.clone(), positions, edges);
        g.validate()?;
        Ok((g, s))
    }

    pub fn parse(text: &str, group: Arc<GroupPresentation>) -> Result<Self, RelaxError> {
        let file = GraphFile::parse(text)?;
        let mut positions = BTreeMap::new();
        let mut labels: BTreeMap<usize, Word> = BTreeMap::new();
        for x in &file.extra {
            match x.keyword.as_str() {
                "pos" => {
                    if x.args.len() != 5 {
                        return Err(parse_err(x.line, "expected `pos <vertex> x0 x1 x2 x3`").into());
                    }
                    let v: usize = parse_num(x.line, &x.args[0], "vertex id")?;
                    let mut c = [0.0; 4];
                    for (slot, tok) in c.iter_mut().zip(&x.args[1..]) {
                        *slot = parse_num(x.line, tok, "coordinate")?;
                    }
                    let p = HPoint::new(c).map_err(|e| parse_err(x.line, e.to_string()))?;
                    if positions.insert(v, p).is_some() {
                        return Err(parse_err(x.line, format!("duplicate position for vertex {v}")).into());
                    }
                }
                "label" => {
                    if x.args.is_empty() {
                        return Err(parse_err(x.line, "expected `label <edge> <word>`").into());
                    }
                    let id: usize = parse_num(x.line, &x.args[0], "edge id")?;
                    let word = group
                        .parse_word(&x.args[1..].join(" "))
                        .map_err(|e| parse_err(x.line, e.to_string()))?;
                    if labels.insert(id, word).is_some() {
                        return Err(parse_err(x.line, format!("duplicate label for edge {id}")).into());
                    }
                }
                kw => return Err(parse_err(x.line, format!("unknown keyword `{kw}`")).into()),
            }
        }
        let declared: BTreeSet<usize> = file.vertices.iter().copied().collect();
        if let Some(v) = positions.keys().find(|v| !declared.contains(v)) {
            return Err(RelaxError::UnknownVertex(*v));
        }
        if let Some(v) = declared.iter().find(|v| !positions.contains_key(v)) {
            return Err(RelaxError::Precondition(format!("vertex {v} has no `pos` line")));
        }
        let mut edges = Vec::new();
        for e in &file.edges {
            let label = labels
                .remove(&e.id)
                .ok_or_else(|| RelaxError::Precondition(format!("edge {} has no `label` line", e.id)))?;
            edges.push(DecoratedEdge { id: e.id, u: e.u, v: e.v, label });
        }
        if let Some(id) = labels.keys().next() {
            return Err(GraphError::UnknownEdge(*id).into());
        }
        let g = DecoratedGraph::new(file.name, group, positions, edges)?;
        if g.rank() as i64 != file.rank {
            return Err(parse_err(1, format!("header declares rank {} but graph has rank {}", file.rank, g.rank())).into());
        }
        Ok(g)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let name = if self.name.is_empty() { "unnamed" } else { &self.name };
        writeln!(out, "graph {} rank {}", name.replace(char::is_whitespace, "_"), self.rank()).unwrap();
        for v in self.positions.keys() {
            writeln!(out, "vertex {v}").unwrap();
        }
        for e in self.edges.values() {
            writeln!(out, "edge {} {} {} {}", e.id, e.u, e.v, fmt17(self.edge_length(e.id))).unwrap();
        }
        for (v, p) in &self.positions {
            let c = p.coords();
            writeln!(out, "pos {v} {} {} {} {}", fmt17(c[0]), fmt17(c[1]), fmt17(c[2]), fmt17(c[3])).unwrap();
        }
        for e in self.edges.values() {
            writeln!(out, "label {} {}", e.id, e.label.display(&self.group)).unwrap();
        }
        out
    }

    /// Seed graph with random positions (deterministic in `seed`) within
    /// distance about one of the origin.
    pub fn seed(group: Arc<GroupPresentation>, topology: Topology, seed: u64) -> Result<Self, RelaxError> {
        let k = group.rank();
        let mut edges = Vec::new();
        let mut push = |u: usize, v: usize, label: Word| {
            let id = edges.len();
            edges.push(DecoratedEdge { id, u, v, label });
        };
        let n = match topology {
            Topology::Theta => {
                if k != 2 {
                    return Err(RelaxError::Precondition(format!("theta seed needs rank 2, group has rank {k}")));
                }
                push(0, 1, Word::identity());
                push(0, 1, Word::generator(0));
                push(0, 1, Word::generator(1));
                2
            }
            Topology::Caterpillar => {
                if k < 2 {
                    return Err(RelaxError::Precondition("caterpillar seed needs rank at least 2".into()));
                }
                for i in 0..k {
                    push(i, i, Word::generator(i));
                }
                if k == 2 {
                    push(0, 1, Word::identity());
                } else {
                    // spine vertex k + j - 1 carries loop vertex j
                    let spine = |j: usize| k + j - 1;
                    push(0, spine(1), Word::identity());
                    for j in 1..=k - 2 {
                        push(j, spine(j), Word::identity());
                    }
                    push(k - 1, spine(k - 2), Word::identity());
                    for j in 1..k - 2 {
                        push(spine(j), spine(j + 1), Word::identity());
                    }
                }
                2 * k - 2
            }
        };
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let positions = (0..n).map(|v| (v, random_point(&mut rng))).collect();
        let name = format!("{}-{}-seed{seed}", group.name, topology.as_str());
        DecoratedGraph::new(name, group, positions, edges)
    }
}

impl DecoratedEdge {
    pub fn is_loop(&self) -> bool {
        self.u == self.v
    }
}

fn hyperbolic_dist(p: &HPoint, q: &HPoint) -> f64 {
    crate::hyperbolic::dist(p, q)
}

fn random_unit3(rng: &mut impl Rng) -> [f64; 3] {
    loop {
        let v = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0f64..1.0)];
        let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        if n > 1e-3 && n <= 1.0 {
            return [v[0] / n, v[1] / n, v[2] / n];
        }
    }
}

fn random_point(rng: &mut impl Rng) -> HPoint {
    let d = random_unit3(rng);
    let r: f64 = rng.gen_range(0.0..1.0);
    let s = r.sinh();
    HPoint::from_spatial([s * d[0], s * d[1], s * d[2]])
}

/// Whether any edge is too short for tangents to be defined.
pub(crate) fn has_degenerate_edge(g: &DecoratedGraph) -> bool {
    g.edges.keys().any(|&id| g.edge_length(id) < DEGENERATE_DIST)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::relax::group::schottky_pair;

    fn group() -> Arc<GroupPresentation> {
        Arc::new(schottky_pair("t", [2.5, 2.5], [0.3, -0.2], 1.0).unwrap())
    }

    #[test]
    fn seeds_are_valid_and_deterministic() {
        let g = group();
        for t in [Topology::Theta, Topology::Caterpillar] {
            let a = DecoratedGraph::seed(g.clone(), t, 7).unwrap();
            let b = DecoratedGraph::seed(g.clone(), t, 7).unwrap();
            assert_eq!(a, b);
            assert!(a.is_trivalent());
            assert_ne!(a.positions(), DecoratedGraph::seed(g.clone(), t, 8).unwrap().positions());
        }
    }

    #[test]
    fn file_round_trip() {
        let g = DecoratedGraph::seed(group(), Topology::Theta, 3).unwrap();
        let text = g.to_text();
        let back = DecoratedGraph::parse(&text, g.group().clone()).unwrap();
        assert_eq!(back, g);
        assert_eq!(back.to_text(), text);
    }

    #[test]
    fn parse_errors() {
        let g = DecoratedGraph::seed(group(), Topology::Theta, 3).unwrap();
        let text = g.to_text().replace("label 1 a", "label 1 q");
        let err = DecoratedGraph::parse(&text, g.group().clone()).unwrap_err();
        assert!(err.to_string().starts_with("line 10:"), "{err}");
        let text = g.to_text().replace("label 2 b", "label 2 a");
        assert!(matches!(DecoratedGraph::parse(&text, g.group().clone()), Err(RelaxError::NotSurjective)));
    }

    #[test]
    fn labels_must_generate() {
        let g = group();
        let pos: BTreeMap<usize, HPoint> = [(0, HPoint::origin()), (1, HPoint::from_spatial([0.5, 0.0, 0.0]))].into();
        let w = |s: &str| g.parse_word(s).unwrap();
        let edges = |l: [&str; 3]| {
            (0..3).map(move |i| DecoratedEdge { id: i, u: 0, v: 1, label: w(l[i]) }).collect::<Vec<_>>()
        };
        assert!(DecoratedGraph::new("x", g.clone(), pos.clone(), edges(["1", "a", "b"])).is_ok());
        assert!(DecoratedGraph::new("x", g.clone(), pos.clone(), edges(["b", "a b", "a b b"])).is_ok());
        assert!(matches!(
            DecoratedGraph::new("x", g.clone(), pos.clone(), edges(["1", "a a", "b"])),
            Err(RelaxError::NotSurjective)
        ));
    }

    #[test]
    fn contraction_preserves_the_subgroup() {
        let g = DecoratedGraph::seed(group(), Topology::Caterpillar, 1).unwrap();
        let before = g.circuit_words();
        let c = g.contract_edge(2).unwrap();
        assert_eq!(c.valence(0), 4);
        let after = c.circuit_words();
        assert_eq!(before.len(), after.len());
        for (x, y) in before.iter().zip(&after) {
            assert!(x.conjugate_in_free_group(y));
        }
    }
}
