//! Segments for every edge of a query graph, merged into one.
//!
//! `cargo run -p kgreason --example subgraph_segment`

use kgreason::mining::PredicateSimilarityModel;
use kgreason::query::{Clue, QueryGraph};
use kgreason::segment::{extract_subgraph_segment, EdgeParams};
use kgreason::store::{KnowledgeGraph, LoadConfig};

fn main() -> kgreason::Result<()> {
    let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures");
    let (graph, _) = KnowledgeGraph::load_tsv(format!("{dir}/obama.tsv"), &LoadConfig::default())?;
    let model = PredicateSimilarityModel::load(format!("{dir}/obama.model.json"))?;

    let query = QueryGraph::from_clues(&[
        Clue::new("Barack Obama", "wasBornIn", "Hawaii"),
        Clue::new("Barack Obama", "wasBornIn", "Honolulu"),
        Clue::new("Honolulu", "isLocatedIn", "Hawaii"),
    ]);
    let params = EdgeParams {
        bidirectional: true,
        ..EdgeParams::default()
    };
    let seg = extract_subgraph_segment(&graph, &model, &query, &params)?;
    for e in &seg.edges {
        match &e.segment {
            Some(s) => println!("edge {} {}: {} paths, {} triples", e.edge, e.clue, s.paths.len(), s.segment.edge_count()),
            None => println!("edge {} {}: no path", e.edge, e.clue),
        }
    }
    println!("merged: {} nodes, {} triples", seg.merged.node_count(), seg.merged.edge_count());
    for t in seg.merged.triples() {
        println!("  {}", graph.display_triple(&t));
    }
    Ok(())
}
