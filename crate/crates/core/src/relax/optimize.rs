//! Riemannian gradient descent on vertex positions, with topology moves.

use std::fmt::Write as _;

use nalgebra::{Matrix4, Vector4};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::decorated::{has_degenerate_edge, DecoratedGraph, HalfEdge};
use super::RelaxError;
use crate::format::fmt17;
use crate::graph::girth;
use crate::hyperbolic::{self, angle_between, exp_map, point_along, tangent_and_dist, tangent_norm, HPoint};
use crate::shortening::{realize_triod, sh, STEINER_ANGLE};

/// Armijo sufficient-decrease constant.
pub const ARMIJO: f64 = 0.5;
/// Backtracking factor.
pub const SHRINK: f64 = 0.5;
/// Edges shorter than this are contracted when topology moves are on.
pub const SHORT_EDGE: f64 = 1e-6;
/// A topology move must shorten the graph by more than this.
pub const MIN_MOVE_GAIN: f64 = 1e-12;
/// Noise added to degenerate seeds.
pub const SEED_NOISE: f64 = 1e-3;
/// Cap on topology moves per run, against churn.
pub const MAX_MOVES: usize = 1000;
/// Largest step relative to `step`.
const MAX_STEP_FACTOR: f64 = 64.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RelaxConfig {
    pub step: f64,
    pub tol_grad: f64,
    pub max_iter: usize,
    pub allow_topology_moves: bool,
    pub seed: u64,
    pub angle_tol: f64,
}

impl Default for RelaxConfig {
    fn default() -> Self {
        RelaxConfig { step: 0.1, tol_grad: 1e-8, max_iter: 100_000, allow_topology_moves: false, seed: 0, angle_tol: 1e-3 }
    }
}

impl RelaxConfig {
    pub fn validate(&self) -> Result<(), RelaxError> {
        let ok = |x: f64| x > 0.0 && x.is_finite();
        if !ok(self.step) || !ok(self.tol_grad) || !ok(self.angle_tol) || self.max_iter == 0 {
            return Err(RelaxError::Precondition(format!("relax config values must be positive: {self:?}")));
        }
        Ok(())
    }
}

/// Angles between the half-edges at one vertex.
#[derive(Debug, Clone, PartialEq)]
pub struct VertexAngles {
    pub vertex: usize,
    /// Pairwise angles, pairs in order `(0,1), (0,2), (1,2), …`.
    pub angles: Vec<f64>,
    /// Norm of the sum of the unit tangents (the gradient norm).
    pub tangent_sum: f64,
}

/// The three local-minimality conditions at a critical point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WhiteCertificate {
    /// Edges are geodesic segments; true by construction of the encoding.
    pub geodesic_edges: bool,
    pub positive_lengths: bool,
    pub trivalent: bool,
    /// Every angle within `angle_tol` of `2π/3`.
    pub steiner_angles: bool,
    pub max_angle_defect: f64,
    pub max_tangent_sum: f64,
}

impl WhiteCertificate {
    pub fn holds(&self) -> bool {
        self.geodesic_edges && self.positive_lengths && self.trivalent && self.steiner_angles
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RelaxReport {
    pub converged: bool,
    pub final_length: f64,
    pub iterations: usize,
    pub topology_moves: usize,
    pub max_gradient: f64,
    pub vertex_angles: Vec<VertexAngles>,
    pub white: WhiteCertificate,
    /// Some vertex pair still admits a shortening move with gain above
    /// [`MIN_MOVE_GAIN`].
    pub moves_available: bool,
    /// `None` when some edge has zero length.
    pub girth: Option<f64>,
    pub min_edge: f64,
    /// Total length after every accepted step or move, starting with the input.
    pub trace: Vec<f64>,
    /// Whether the seed was perturbed off a degenerate configuration.
    pub perturbed: bool,
}

impl RelaxReport {
    pub fn trace_csv(&self) -> String {
        let mut out = String::from("iteration,total_length\n");
        for (i, l) in self.trace.iter().enumerate() {
            writeln!(out, "{i},{}", fmt17(*l)).unwrap();
        }
        out
    }

    pub fn summary(&self) -> String {
        let mut out = String::new();
        let w = &self.white;
        let opt = |x: Option<f64>| x.map(fmt17).unwrap_or_else(|| "none".into());
        writeln!(out, "converged: {}", self.converged).unwrap();
        writeln!(out, "minimality: local").unwrap();
        writeln!(out, "final_length: {}", fmt17(self.final_length)).unwrap();
        writeln!(out, "iterations: {}", self.iterations).unwrap();
        writeln!(out, "topology_moves: {}", self.topology_moves).unwrap();
        writeln!(out, "max_gradient: {}", fmt17(self.max_gradient)).unwrap();
        writeln!(out, "girth: {}", opt(self.girth)).unwrap();
        writeln!(out, "min_edge: {}", fmt17(self.min_edge)).unwrap();
        writeln!(out, "geodesic_edges: {}", w.geodesic_edges).unwrap();
        writeln!(out, "positive_lengths: {}", w.positive_lengths).unwrap();
        writeln!(out, "trivalent: {}", w.trivalent).unwrap();
        writeln!(out, "steiner_angles: {}", w.steiner_angles).unwrap();
        writeln!(out, "max_angle_defect: {}", fmt17(w.max_angle_defect)).unwrap();
        writeln!(out, "max_tangent_sum: {}", fmt17(w.max_tangent_sum)).unwrap();
        writeln!(out, "moves_available: {}", self.moves_available).unwrap();
        writeln!(out, "perturbed_seed: {}", self.perturbed).unwrap();
        for va in &self.vertex_angles {
            let angles: Vec<String> = va.angles.iter().map(|a| fmt17(*a)).collect();
            writeln!(out, "angles {}: {}", va.vertex, angles.join(" ")).unwrap();
        }
        out
    }
}

/// Flat copy of a decorated graph for the inner loop.
struct Work {
    ids: Vec<usize>,
    edges: Vec<(usize, usize, Matrix4<f64>, Matrix4<f64>)>,
}

fn transport(m: &Matrix4<f64>, p: &HPoint) -> HPoint {
    HPoint::renormalize(&(m * p.as_vector()))
}

impl Work {
    fn new(g: &DecoratedGraph) -> Self {
        let ids: Vec<usize> = g.vertices().collect();
        let index = |v: usize| ids.binary_search(&v).unwrap();
        let edges = g
            .edges()
            .map(|e| {
                let t = e.label.evaluate(g.group());
                (index(e.u), index(e.v), *t.mat4(), *t.inverse().mat4())
            })
            .collect();
        Work { ids, edges }
    }

    fn positions(&self, g: &DecoratedGraph) -> Vec<HPoint> {
        self.ids.iter().map(|v| *g.position(*v).unwrap()).collect()
    }

    fn length(&self, pos: &[HPoint]) -> f64 {
        self.edges.iter().map(|(u, v, t, _)| hyperbolic::dist(&pos[*u], &transport(t, &pos[*v]))).sum()
    }

    fn gradient(&self, pos: &[HPoint], edge_ids: &[usize]) -> Result<Vec<Vector4<f64>>, RelaxError> {
        let mut g = vec![Vector4::zeros(); pos.len()];
        for (k, (u, v, t, tinv)) in self.edges.iter().enumerate() {
            let zero = |_| RelaxError::ZeroLengthEdge { edge: edge_ids[k] };
            let (tu, _) = tangent_and_dist(&pos[*u], &transport(t, &pos[*v])).map_err(zero)?;
            let (tv, _) = tangent_and_dist(&pos[*v], &transport(tinv, &pos[*u])).map_err(zero)?;
            g[*u] -= tu.vector();
            g[*v] -= tv.vector();
        }
        Ok(g)
    }
}

/// Result of a shortening move.
#[derive(Debug, Clone)]
pub struct MoveOutcome {
    pub graph: DecoratedGraph,
    /// The vertex placed at the Steiner point (`v` itself when `v` was
    /// trivalent and simply moved).
    pub steiner_vertex: usize,
    pub angle: f64,
    /// Segment length used on both half-edges.
    pub c: f64,
    pub predicted_gain: f64,
    pub realized_gain: f64,
}

/// Replaces the initial segments of length `c` of the half-edges `pair` at
/// `v` by a triod through their Steiner point. `c` is the shorter of the two
/// edge lengths (half the length when both ends belong to one loop).
///
/// At a vertex of valence at least four the pair moves to a new vertex at
/// the Steiner point, joined to `v` by an identity-labelled edge. At a
/// trivalent vertex that would leave `v` with valence two, so `v` itself
/// moves to the Steiner point. Labels are untouched, so circuit words are
/// unchanged.
pub fn apply_shortening_move(
    g: &DecoratedGraph,
    v: usize,
    pair: (HalfEdge, HalfEdge),
    angle_tol: f64,
) -> Result<MoveOutcome, RelaxError> {
    let (h1, h2) = pair;
    if h1 == h2 || g.half_edge_vertex(h1) != v || g.half_edge_vertex(h2) != v {
        return Err(RelaxError::Precondition(format!("half-edges {h1:?}, {h2:?} are not two distinct ends at vertex {v}")));
    }
    let p = *g.position(v).unwrap();
    let (u1, l1) = tangent_and_dist(&p, &g.far_point(h1)).map_err(|_| RelaxError::ZeroLengthEdge { edge: h1.edge })?;
    let (u2, l2) = tangent_and_dist(&p, &g.far_point(h2)).map_err(|_| RelaxError::ZeroLengthEdge { edge: h2.edge })?;
    let angle = angle_between(&u1, &u2)?;
    if angle >= STEINER_ANGLE - angle_tol {
        return Err(RelaxError::Precondition(format!(
            "angle {angle} at vertex {v} is not below 2π/3 - {angle_tol}; no move"
        )));
    }
    let c = if h1.edge == h2.edge { 0.5 * l1 } else { l1.min(l2) };
    let predicted_gain = sh(c, angle)?;
    if !(predicted_gain > 0.0) {
        return Err(RelaxError::Precondition(format!("predicted gain {predicted_gain} is not positive")));
    }
    let tri = realize_triod(&point_along(&u1, c), &point_along(&u2, c), &p)?;
    let before = g.total_length();
    let (graph, steiner_vertex) = g.split_vertex(v, [h1, h2], tri.steiner)?;
    let realized_gain = before - graph.total_length();
    Ok(MoveOutcome { graph, steiner_vertex, angle, c, predicted_gain, realized_gain })
}

/// One topology move, if any applies. A vertex of valence four or more is
/// split along the pair with the largest realized gain; otherwise the
/// shortest edge below [`SHORT_EDGE`] is contracted. At trivalent vertices
/// the move would only displace the vertex, which the descent already does.
fn topology_move(g: &DecoratedGraph, cfg: &RelaxConfig) -> Option<DecoratedGraph> {
    for v in g.vertices().filter(|&v| g.valence(v) >= 4) {
        let hs = g.half_edges(v);
        let mut best: Option<MoveOutcome> = None;
        for i in 0..hs.len() {
            for j in i + 1..hs.len() {
                let Ok(m) = apply_shortening_move(g, v, (hs[i], hs[j]), cfg.angle_tol) else { continue };
                if m.realized_gain > MIN_MOVE_GAIN && best.as_ref().is_none_or(|b| m.realized_gain > b.realized_gain) {
                    best = Some(m);
                }
            }
        }
        if let Some(m) = best {
            return Some(m.graph);
        }
    }
    let mut short: Vec<(f64, usize)> = g
        .edges()
        .filter(|e| !e.is_loop())
        .map(|e| (g.edge_length(e.id), e.id))
        .filter(|(l, _)| *l < SHORT_EDGE)
        .collect();
    short.sort_by(|x, y| x.0.total_cmp(&y.0));
    if let Some((_, id)) = short.first() {
        if let Ok(c) = g.contract_edge(*id) {
            return Some(c);
        }
    }
    None
}

/// Whether some vertex admits a shortening move with predicted gain above
/// [`MIN_MOVE_GAIN`].
pub fn shortening_move_available(g: &DecoratedGraph) -> bool {
    g.vertices().any(|v| {
        let Ok(ts) = g.vertex_tangents(v) else { return true };
        for i in 0..ts.len() {
            for j in i + 1..ts.len() {
                let Ok(a) = angle_between(&ts[i].1, &ts[j].1) else { continue };
                if a >= STEINER_ANGLE {
                    continue;
                }
                let c = if ts[i].0.edge == ts[j].0.edge { 0.5 * ts[i].2 } else { ts[i].2.min(ts[j].2) };
                if sh(c, a).map(|s| s > MIN_MOVE_GAIN).unwrap_or(false) {
                    return true;
                }
            }
        }
        false
    })
}

/// Relaxes vertex positions by gradient descent with Armijo backtracking.
/// Never fails on non-convergence; the report says whether the
/// certificates hold.
pub fn relax(g: &DecoratedGraph, cfg: &RelaxConfig) -> Result<(DecoratedGraph, RelaxReport), RelaxError> {
    cfg.validate()?;
    let mut g = g.clone();
    let perturbed = has_degenerate_edge(&g);
    if perturbed {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        g = g.perturbed(&mut rng, SEED_NOISE);
    }
    let mut trace = vec![g.total_length()];
    let mut iterations = 0;
    let mut moves = 0;
    let mut alpha = cfg.step;
    let max_alpha = cfg.step * MAX_STEP_FACTOR;

    'outer: loop {
        if cfg.allow_topology_moves && moves < MAX_MOVES {
            if let Some(next) = topology_move(&g, cfg) {
                g = next;
                moves += 1;
                trace.push(g.total_length());
                continue;
            }
        }
        let work = Work::new(&g);
        let edge_ids: Vec<usize> = g.edges().map(|e| e.id).collect();
        let mut pos = work.positions(&g);
        let mut f = work.length(&pos);
        loop {
            let grad = match work.gradient(&pos, &edge_ids) {
                Ok(grad) => grad,
                Err(RelaxError::ZeroLengthEdge { .. }) => {
                    g = g.with_positions(work.ids.iter().copied().zip(pos.iter().copied()))?;
                    if cfg.allow_topology_moves && moves < MAX_MOVES {
                        let short = g.edges().find(|e| !e.is_loop() && g.edge_length(e.id) < SHORT_EDGE).map(|e| e.id);
                        if let Some(id) = short {
                            if let Ok(next) = g.contract_edge(id) {
                                g = next;
                                moves += 1;
                                trace.push(g.total_length());
                                continue 'outer;
                            }
                        }
                    }
                    break 'outer;
                }
                Err(e) => return Err(e),
            };
            let gmax = grad.iter().map(tangent_norm).fold(0.0, f64::max);
            let g2: f64 = grad.iter().map(|x| hyperbolic::minkowski(x, x)).sum();
            if gmax < cfg.tol_grad || iterations >= cfg.max_iter {
                g = g.with_positions(work.ids.iter().copied().zip(pos.iter().copied()))?;
                break 'outer;
            }
            // roundoff in f limits what the Armijo test can resolve
            let slack = 8.0 * f64::EPSILON * f.abs();
            let mut a = alpha;
            let accepted = loop {
                let cand: Vec<HPoint> = pos.iter().zip(&grad).map(|(p, d)| exp_map(p, &(-a * d))).collect();
                let fc = work.length(&cand);
                let decrease = ARMIJO * a * g2;
                if decrease > slack {
                    if fc <= f - decrease {
                        break Some((cand, fc));
                    }
                } else if fc <= f + slack {
                    // below roundoff the gradient norm has to shrink instead
                    if let Ok(gc) = work.gradient(&cand, &edge_ids) {
                        if gc.iter().map(|x| hyperbolic::minkowski(x, x)).sum::<f64>() < g2 {
                            break Some((cand, fc));
                        }
                    }
                }
                a *= SHRINK;
                if a * gmax < 1e-300 || a < cfg.step * 1e-20 {
                    break None;
                }
            };
            iterations += 1;
            let Some((cand, fc)) = accepted else {
                g = g.with_positions(work.ids.iter().copied().zip(pos.iter().copied()))?;
                break 'outer;
            };
            pos = cand;
            f = fc;
            trace.push(f);
            alpha = (2.0 * a).min(max_alpha);
            // re-check for topology changes now and then
            if cfg.allow_topology_moves && iterations % 16 == 0 {
                g = g.with_positions(work.ids.iter().copied().zip(pos.iter().copied()))?;
                continue 'outer;
            }
        }
    }
    let report = build_report(&g, cfg, iterations, moves, trace, perturbed);
    Ok((g, report))
}

fn build_report(
    g: &DecoratedGraph,
    cfg: &RelaxConfig,
    iterations: usize,
    topology_moves: usize,
    trace: Vec<f64>,
    perturbed: bool,
) -> RelaxReport {
    let min_edge = g.min_edge_length();
    let positive_lengths = min_edge >= hyperbolic::DEGENERATE_DIST;
    let mut vertex_angles = Vec::new();
    let mut max_gradient: f64 = 0.0;
    let mut max_defect: f64 = 0.0;
    for v in g.vertices() {
        let grad = g.vertex_gradient(v).map(|x| tangent_norm(&x)).unwrap_or(f64::INFINITY);
        max_gradient = max_gradient.max(grad);
        let angles = g.vertex_angles(v).unwrap_or_default();
        for a in &angles {
            max_defect = max_defect.max((a - STEINER_ANGLE).abs());
        }
        if angles.is_empty() {
            max_defect = f64::INFINITY;
        }
        vertex_angles.push(VertexAngles { vertex: v, angles, tangent_sum: grad });
    }
    let trivalent = g.is_trivalent();
    let white = WhiteCertificate {
        geodesic_edges: true,
        positive_lengths,
        trivalent,
        steiner_angles: trivalent && max_defect <= cfg.angle_tol,
        max_angle_defect: max_defect,
        max_tangent_sum: max_gradient,
    };
    let moves_available = cfg.allow_topology_moves && shortening_move_available(g);
    let girth = if positive_lengths { g.to_metric_graph().ok().and_then(|m| girth(&m).ok()).map(|x| x.length) } else { None };
    let converged = max_gradient < cfg.tol_grad && white.holds() && !moves_available;
    RelaxReport {
        converged,
        final_length: g.total_length(),
        iterations,
        topology_moves,
        max_gradient,
        vertex_angles,
        white,
        moves_available,
        girth,
        min_edge,
        trace,
        perturbed,
    }
}
