//! Random graph generators for property tests and the lemma suites.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::Rng;

use super::{Edge, GraphError, MetricGraph, Subgraph};

/// Log-uniform length in `[1e-3, 10]`.
pub fn random_length(rng: &mut impl Rng) -> f64 {
    10f64.powf(rng.gen_range(-3.0..1.0))
}

/// Connected multigraph with at most `max_edges` edges (at least one circuit).
pub fn random_connected_graph(rng: &mut impl Rng, max_edges: usize) -> MetricGraph {
    let max_edges = max_edges.max(1);
    let n = rng.gen_range(1..=max_edges.div_ceil(2).max(1));
    let mut edges = Vec::new();
    for v in 1..n {
        let u = rng.gen_range(0..v);
        edges.push((u, v));
    }
    let extra = rng.gen_range(1..=max_edges - (n - 1));
    for _ in 0..extra {
        edges.push((rng.gen_range(0..n), rng.gen_range(0..n)));
    }
    edges.shuffle(rng);
    let edges: Vec<Edge> = edges
        .into_iter()
        .enumerate()
        .map(|(id, (u, v))| Edge { id, u, v, length: random_length(rng) })
        .collect();
    MetricGraph::new("random", 0..n, edges).expect("spanning tree plus extra edges is connected")
}

/// Uniformly paired trivalent multigraph of rank `k >= 2`, resampled until
/// connected.
pub fn random_trivalent(rng: &mut impl Rng, k: usize) -> MetricGraph {
    assert!(k >= 2, "trivalent graphs need rank at least 2");
    let n = 2 * k - 2;
    loop {
        let mut half: Vec<usize> = (0..n).flat_map(|v| [v, v, v]).collect();
        half.shuffle(rng);
        let edges: Vec<Edge> = half
            .chunks(2)
            .enumerate()
            .map(|(id, p)| Edge { id, u: p[0], v: p[1], length: random_length(rng) })
            .collect();
        match MetricGraph::new(format!("trivalent{k}"), 0..n, edges) {
            Ok(g) => return g,
            Err(GraphError::Disconnected) => continue,
            Err(e) => panic!("unexpected {e}"),
        }
    }
}

/// Random subtree with between 1 and `max_size` edges, grown from a random
/// non-loop edge. Panics if `g` has no non-loop edge.
pub fn random_tree_subgraph<'g>(rng: &mut impl Rng, g: &'g MetricGraph, max_size: usize) -> Subgraph<'g> {
    let non_loops: Vec<&Edge> = g.edges().filter(|e| !e.is_loop()).collect();
    let first = non_loops.choose(rng).expect("graph has a non-loop edge");
    let target = rng.gen_range(1..=max_size.max(1));
    let mut chosen = vec![first.id];
    let mut verts = BTreeSet::from([first.u, first.v]);
    while chosen.len() < target {
        let growable: Vec<&Edge> = g
            .edges()
            .filter(|e| verts.contains(&e.u) != verts.contains(&e.v))
            .collect();
        let Some(e) = growable.choose(rng) else { break };
        chosen.push(e.id);
        verts.insert(e.u);
        verts.insert(e.v);
    }
    Subgraph::new(g, chosen).expect("grown edge set is connected")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::validate_trivalent;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn generators_respect_their_contracts() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..200 {
            let g = random_connected_graph(&mut rng, 30);
            assert!(g.edge_count() <= 30 && g.rank() >= 1);
            let k = rng.gen_range(2..=5);
            let t = random_trivalent(&mut rng, k);
            assert!(validate_trivalent(&t).trivalent);
            assert_eq!(t.rank(), k as i64);
            let s = random_tree_subgraph(&mut rng, &t, 2 * k - 3);
            assert!(s.is_tree());
        }
    }
}
