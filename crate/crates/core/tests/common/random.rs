//! Seeded random instances.

use kgreason::kernel::AttributedGraph;
use kgreason::store::KnowledgeGraph;
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

const POOL: [&str; 7] = ["a", "b", "c", "d", "e", "f", "g"];

/// Undirected attributed graph with up to `max_nodes` distinct labels from a small pool.
pub fn attributed_graph(rng: &mut ChaCha8Rng, max_nodes: usize, edge_prob: f64) -> AttributedGraph {
    let n = rng.random_range(1..=max_nodes);
    let labels: Vec<&str> = POOL.choose_multiple(rng, n).copied().collect();
    let mut g = AttributedGraph::with_nodes(&labels);
    for i in 0..n {
        for j in i..n {
            if rng.random_bool(edge_prob) {
                g.add_edge(i, "p", j, true);
            }
        }
    }
    g
}

/// Random multigraph with at most `max_triples` triples over `entities` nodes
/// and `predicates` predicate labels. Self loops and repeats are allowed.
pub fn triples(rng: &mut ChaCha8Rng, max_triples: usize, entities: usize, predicates: usize) -> Vec<(String, String, String)> {
    let n = rng.random_range(1..=max_triples);
    (0..n)
        .map(|_| {
            (
                format!("e{}", rng.random_range(0..entities)),
                format!("p{}", rng.random_range(0..predicates)),
                format!("e{}", rng.random_range(0..entities)),
            )
        })
        .collect()
}

pub fn knowledge_graph(triples: &[(String, String, String)]) -> KnowledgeGraph {
    KnowledgeGraph::from_triples(triples.iter().map(|(s, p, o)| (s.as_str(), p.as_str(), o.as_str())))
}

/// Directed arcs `(from, to, cost)` on up to `max_nodes` nodes with continuous costs.
pub fn weighted_digraph(rng: &mut ChaCha8Rng, max_nodes: usize, density: f64) -> (usize, Vec<(u32, u32, f64)>) {
    let n = rng.random_range(2..=max_nodes);
    let mut arcs = Vec::new();
    for a in 0..n {
        for b in 0..n {
            if a != b && rng.random_bool(density) {
                arcs.push((a as u32, b as u32, rng.random_range(0.1..10.0)));
                // occasional parallel arc
                if rng.random_bool(0.05) {
                    arcs.push((a as u32, b as u32, rng.random_range(0.1..10.0)));
                }
            }
        }
    }
    (n, arcs)
}
