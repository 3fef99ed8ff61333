//! Mine entropy weights and predicate similarities, then save the model.
//!
//! `cargo run -p kgreason --example mine_model [graph.tsv] [out.json]`

use kgreason::mining::{compute_predicate_stats, compute_similarity_model, CooccurrenceMode, PredicateSimilarityModel};
use kgreason::store::{KnowledgeGraph, LoadConfig};

fn main() -> kgreason::Result<()> {
    let mut args = std::env::args().skip(1);
    let path = args.next().unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/obama.tsv").into());
    let (graph, _) = KnowledgeGraph::load_tsv(&path, &LoadConfig::default())?;

    let stats = compute_predicate_stats(&graph);
    let model = compute_similarity_model(&graph, &stats, CooccurrenceMode::Pairs);

    println!("{:<16} {:>8} {:>8}", "predicate", "entropy", "weight");
    for s in &stats {
        println!("{:<16} {:>8.4} {:>8.4}", s.label, s.entropy, s.weight);
    }
    for p in ["wasBornIn", "graduatedFrom"] {
        let near: Vec<String> = model.most_similar(p, 3).into_iter().map(|(q, s)| format!("{q} {s:.3}")).collect();
        println!("closest to {p}: {}", near.join(", "));
    }
    if !model.degenerate_predicates().is_empty() {
        println!("never co-occurring: {:?}", model.degenerate_predicates());
    }

    if let Some(out) = args.next() {
        model.save(&out)?;
        let back = PredicateSimilarityModel::load(&out)?;
        assert_eq!(back.labels(), model.labels());
        println!("saved to {out}");
    }
    Ok(())
}
