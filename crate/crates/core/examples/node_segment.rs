//! Local cluster around one entity via approximate personalized PageRank and a sweep cut.
//!
//! `cargo run -p kgreason --example node_segment [entity]`

use kgreason::mining::compute_predicate_stats;
use kgreason::segment::{extract_node_segment, NibbleParams, WeightedView};
use kgreason::store::{KnowledgeGraph, LoadConfig};

fn main() -> kgreason::Result<()> {
    let seed = std::env::args().nth(1).unwrap_or_else(|| "Barack Obama".into());
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/obama.tsv");
    let (graph, _) = KnowledgeGraph::load_tsv(path, &LoadConfig::default())?;

    // functional predicates such as wasBornIn weigh more than many-valued ones
    let stats = compute_predicate_stats(&graph);
    let view = WeightedView::from_stats(&graph, &stats);

    for alpha in [0.15, 0.4] {
        let params = NibbleParams {
            alpha,
            ..NibbleParams::default()
        };
        let seg = extract_node_segment(&view, &seed, &params)?;
        println!(
            "alpha {alpha}: {} nodes, conductance {:.4}, {} pushes",
            seg.segment.node_count(),
            seg.conductance,
            seg.pushes
        );
        let mut names: Vec<&str> = seg.segment.nodes.iter().map(|&e| graph.entity_label(e)).collect();
        names.sort_unstable();
        println!("  {}", names.join(", "));
    }
    Ok(())
}
