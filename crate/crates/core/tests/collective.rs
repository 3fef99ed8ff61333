mod common;

use common::dense::{self, close, Shift};
use common::random;
use kgreason::collective::{build_line_graphs, collective_influence};
use kgreason::kernel::{AttributedGraph, KernelConfig};
use kgreason::mining::PredicateSimilarityModel;
use kgreason::query::{Clue, QueryGraph};
use rand::Rng;

const PREDS: [&str; 3] = ["p", "q", "r"];

fn model() -> PredicateSimilarityModel {
    PredicateSimilarityModel::pinned(&PREDS, &[("p", "q", 0.45), ("q", "r", 0.8), ("p", "r", 0.1)]).unwrap()
}

fn random_query(rng: &mut impl Rng) -> QueryGraph {
    let names = ["w", "x", "y", "z"];
    let clues: Vec<Clue> = (0..3)
        .map(|_| {
            let s = rng.random_range(0..4);
            let o = (s + rng.random_range(1..4)) % 4;
            Clue::new(names[s], PREDS[rng.random_range(0..3)], names[o])
        })
        .collect();
    QueryGraph::from_clues(&clues)
}

#[test]
fn loss_influence_matches_finite_differences() {
    let h = 1e-5;
    let mut rng = random::rng(23);
    let mut checked = 0;
    for case in 0..100 {
        let query = random_query(&mut rng);
        let segs: Vec<AttributedGraph> = (0..3).map(|_| random::attributed_graph(&mut rng, 4, 0.6)).collect();
        let c = rng.random_range(0.02..0.15);
        let background = case % 2 == 0;
        let mut cfg = KernelConfig {
            tolerance: 1e-14,
            ..KernelConfig::default().with_decay(c)
        };
        cfg.background = background;
        let wrapped: Vec<Option<AttributedGraph>> = segs.iter().cloned().map(Some).collect();
        let lines = build_line_graphs(&query, &wrapped, &model(), &cfg).unwrap();
        let loss = |s: usize, shift: Shift| dense::loss(&query, &segs, &model(), c, background, s, shift);
        let base = loss(0, Shift::None);
        assert!(close(lines.loss, base, 1e-8, 1e-12), "case {case}: loss {} vs {base}", lines.loss);
        let reports = collective_influence(&query, &lines, &wrapped, &cfg).unwrap();
        let fd = |s: usize, plus: Shift, minus: Shift| (loss(s, plus) - loss(s, minus)) / (2.0 * h);
        for (s, g) in segs.iter().enumerate() {
            let report = &reports[s];
            let n = g.node_count();
            for i in 0..n {
                for j in i..n {
                    let want = fd(s, Shift::Edge(i, j, h), Shift::Edge(i, j, -h));
                    let got = report.edge_derivative(i, j);
                    assert!(close(got, want, 1e-4, 1e-10), "case {case} seg {s} edge ({i},{j}): {got} vs {want}");
                    checked += 1;
                }
                for label in &report.vocabulary {
                    let want = fd(s, Shift::Attr(i, label, h), Shift::Attr(i, label, -h));
                    let got = report.attribute_derivative(i, label);
                    assert!(close(got, want, 1e-4, 1e-10), "case {case} seg {s} attr ({i},{label}): {got} vs {want}");
                    checked += 1;
                }
            }
            for node in &report.nodes {
                let want: f64 = g
                    .incident(node.node)
                    .into_iter()
                    .map(|j| fd(s, Shift::Edge(node.node, j, h), Shift::Edge(node.node, j, -h)))
                    .sum();
                assert!(close(node.value, want, 1e-4, 1e-10), "case {case} seg {s} node {}", node.node);
            }
        }
    }
    assert!(checked > 1000);
}

#[test]
fn loss_is_invariant_under_edge_permutation() {
    let mut rng = random::rng(5);
    for _ in 0..20 {
        let query = random_query(&mut rng);
        let segs: Vec<AttributedGraph> = (0..3).map(|_| random::attributed_graph(&mut rng, 4, 0.5)).collect();
        let cfg = KernelConfig::default();
        let wrapped: Vec<Option<AttributedGraph>> = segs.iter().cloned().map(Some).collect();
        let a = build_line_graphs(&query, &wrapped, &model(), &cfg).unwrap();
        let perm = [2, 0, 1];
        let clues: Vec<Clue> = perm.iter().map(|&i| query.clue(i)).collect();
        let permuted: Vec<Option<AttributedGraph>> = perm.iter().map(|&i| Some(segs[i].clone())).collect();
        let b = build_line_graphs(&QueryGraph::from_clues(&clues), &permuted, &model(), &cfg).unwrap();
        assert!((a.loss - b.loss).abs() < 1e-12);
        for x in 0..3 {
            assert!(a.h1.is_symmetric(0.0) && a.h2.is_symmetric(1e-15));
            for y in 0..3 {
                assert_eq!(a.h1.get(perm[x], perm[y]), b.h1.get(x, y));
            }
        }
    }
}
