//! Cheapest alternative paths behind one claimed triple.
//!
//! `cargo run -p kgreason --example edge_segment ["subject|predicate|object"]`

use kgreason::mining::PredicateSimilarityModel;
use kgreason::query::Clue;
use kgreason::segment::{extract_edge_segment, EdgeParams, SegmentJson};
use kgreason::store::{KnowledgeGraph, LoadConfig};

fn main() -> kgreason::Result<()> {
    let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures");
    let (graph, _) = KnowledgeGraph::load_tsv(format!("{dir}/obama.tsv"), &LoadConfig::default())?;
    let model = PredicateSimilarityModel::load(format!("{dir}/obama.model.json"))?;
    let clue = match std::env::args().nth(1) {
        Some(s) => Clue::parse(&s)?,
        None => Clue::new("Barack Obama", "wasBornIn", "Hawaii"),
    };

    let params = EdgeParams {
        k: 3,
        ..EdgeParams::default()
    };
    let seg = extract_edge_segment(&graph, &model, &clue, &params)?;
    println!("{clue}");
    for p in &seg.paths {
        let hops: Vec<String> = p
            .hops
            .iter()
            .map(|h| {
                let arrow = if h.reversed { "<-" } else { "->" };
                format!("{arrow}[{}] {}", graph.predicate_label(h.predicate), graph.entity_label(h.to))
            })
            .collect();
        println!("  {:.3}  {} {}", p.cost, graph.entity_label(p.nodes[0]), hops.join(" "));
    }

    let json = serde_json::to_string(&SegmentJson::from_edge_segment(&graph, &seg)).expect("segment serializes");
    println!("{} bytes of segment JSON", json.len());
    Ok(())
}
