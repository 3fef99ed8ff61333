mod common;

use std::collections::HashSet;

use common::{fixtures, oracle, random};
use kgreason::mining::compute_predicate_stats;
use kgreason::segment::{approximate_ppr, extract_node_segment, sweep_cut, NibbleParams, WeightedView};
use kgreason::store::{EntityId, KnowledgeGraph};
use rand::Rng;

fn view_edges(g: &KnowledgeGraph, view: &WeightedView) -> Vec<(EntityId, EntityId, f64)> {
    g.triples()
        .map(|t| (t.subject, t.object, view.weight(t.predicate)))
        .collect()
}

#[test]
fn bridge_graph_cut_is_seed_clique() {
    let g = fixtures::two_cliques();
    let view = WeightedView::uniform(&g);
    let params = NibbleParams::default();
    for seed in ["n0", "n2", "n7"] {
        let seg = extract_node_segment(&view, seed, &params).unwrap();
        let ppr = approximate_ppr(&view, g.entity(seed).unwrap(), params.alpha, params.epsilon);
        let sweep = sweep_cut(&view, &ppr, params.max_size);
        let (best, _) = oracle::best_prefix(&view_edges(&g, &view), &sweep.order);
        assert_eq!(best, sweep.best_len);
        let got: HashSet<&str> = seg.segment.nodes.iter().map(|&e| g.entity_label(e)).collect();
        let side = if seed == "n7" { 5..10 } else { 0..5 };
        let want: HashSet<String> = side.map(|i| format!("n{i}")).collect();
        assert_eq!(got, want.iter().map(String::as_str).collect());
    }
}

#[test]
fn residual_bound_and_sweep_on_random_graphs() {
    let mut rng = random::rng(4);
    for case in 0..100 {
        let t = random::triples(&mut rng, 80, 30, 4);
        let g = random::knowledge_graph(&t);
        let stats = compute_predicate_stats(&g);
        let view = WeightedView::from_stats(&g, &stats);
        let seed = t[0].0.as_str();
        let s = g.entity(seed).unwrap();
        if view.degree(s) == 0.0 {
            continue;
        }
        let eps = [1e-3, 1e-4, 1e-5][case % 3];
        let alpha = rng.random_range(0.05..0.3);
        let ppr = approximate_ppr(&view, s, alpha, eps);
        assert!(ppr.max_scaled_residual(&view) < eps, "case {case}");
        let mass: f64 = ppr.p.values().sum::<f64>() + ppr.r.values().sum::<f64>();
        assert!((mass - 1.0).abs() < 1e-9, "case {case}: mass {mass}");
        assert!(ppr.p.values().chain(ppr.r.values()).all(|&x| x >= 0.0));

        let sweep = sweep_cut(&view, &ppr, 50);
        let (best, phis) = oracle::best_prefix(&view_edges(&g, &view), &sweep.order);
        for (a, b) in sweep.conductance.iter().zip(&phis) {
            assert!(a == b || (a - b).abs() < 1e-9, "case {case}: {a} vs {b}");
        }
        assert_eq!(sweep.best_len, best, "case {case}");
    }
}
