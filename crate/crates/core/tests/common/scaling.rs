//! Synthetic graphs for the extraction runtime check.

use std::time::{Duration, Instant};

use kgreason::mining::PredicateSimilarityModel;
use kgreason::query::{Clue, QueryGraph};
use kgreason::segment::{extract_subgraph_segment, EdgeParams};
use kgreason::store::{GraphBuilder, KnowledgeGraph};
use rand::Rng;

use super::random;

pub const SIZES: [usize; 4] = [10_000, 20_000, 40_000, 80_000];
const PREDICATES: usize = 8;
const QUERIES: usize = 16;
const REPEATS: usize = 3;

/// Sparse random graph: a ring for connectivity plus `2n` random triples.
pub fn synthetic(n: usize, seed: u64) -> KnowledgeGraph {
    let mut rng = random::rng(seed);
    let mut b = GraphBuilder::new();
    for i in 0..n {
        b.add(&format!("e{i}"), "p0", &format!("e{}", (i + 1) % n));
    }
    for _ in 0..2 * n {
        let s = rng.random_range(0..n);
        let o = rng.random_range(0..n);
        let p = rng.random_range(0..PREDICATES);
        b.add(&format!("e{s}"), &format!("p{p}"), &format!("e{o}"));
    }
    b.build()
}

pub fn model() -> PredicateSimilarityModel {
    let labels: Vec<String> = (0..PREDICATES).map(|i| format!("p{i}")).chain(["q".to_owned()]).collect();
    let sims: Vec<(String, f64)> = (0..PREDICATES).map(|i| (format!("p{i}"), 0.3 + 0.08 * i as f64)).collect();
    let entries: Vec<(&str, &str, f64)> = sims.iter().map(|(p, s)| ("q", p.as_str(), *s)).collect();
    PredicateSimilarityModel::pinned(&labels, &entries).unwrap()
}

/// Best-of-three wall time of subgraph extraction for a fixed batch of triangle queries.
pub fn time_extraction(n: usize) -> Duration {
    let g = synthetic(n, 99);
    let m = model();
    let mut rng = random::rng(7);
    let params = EdgeParams {
        bidirectional: true,
        ..EdgeParams::default()
    };
    let queries: Vec<QueryGraph> = (0..QUERIES)
        .map(|_| {
            let [a, b, c] = [0; 3].map(|_| format!("e{}", rng.random_range(0..n)));
            QueryGraph::from_clues(&[Clue::new(&a, "q", &b), Clue::new(&b, "q", &c), Clue::new(&c, "q", &a)])
        })
        .collect();
    (0..REPEATS)
        .map(|_| {
            let start = Instant::now();
            for q in &queries {
                let seg = extract_subgraph_segment(&g, &m, q, &params).unwrap();
                assert!(seg.all_found());
            }
            start.elapsed()
        })
        .min()
        .unwrap()
}

/// Growth factor between consecutive sizes.
pub fn ratios(times: &[Duration]) -> Vec<f64> {
    times.windows(2).map(|w| w[1].as_secs_f64() / w[0].as_secs_f64()).collect()
}
