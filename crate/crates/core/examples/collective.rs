//! Check a whole query graph at once. Each pair of claims looks harmless on
//! its own; only the joint comparison finds the conflict.
//!
//! `cargo run -p kgreason --example collective`

use kgreason::collective::{reason_collective, CollectiveParams, OverlapSource, PairStatus};
use kgreason::mining::PredicateSimilarityModel;
use kgreason::query::{Clue, QueryGraph};
use kgreason::store::{KnowledgeGraph, LoadConfig};

fn main() -> kgreason::Result<()> {
    let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures");
    let (mut graph, _) = KnowledgeGraph::load_tsv(format!("{dir}/iraq_collective.tsv"), &LoadConfig::default())?;
    graph.load_types(format!("{dir}/iraq_collective.types.tsv"))?;
    let model = PredicateSimilarityModel::load(format!("{dir}/iraq_collective.model.json"))?;

    let query = QueryGraph::from_clues(&[
        Clue::new("White House", "punish", "Iraqi Army"),
        Clue::new("Washington,D.C", "means", "White House"),
        Clue::new("Washington,D.C", "participatedIn", "Operation Mountain Thrust"),
    ]);
    for source in [OverlapSource::Pair, OverlapSource::Loss] {
        let params = CollectiveParams {
            overlap_source: source,
            ..CollectiveParams::default()
        };
        let v = reason_collective(&graph, &model, &query, &params)?;
        println!("{source:?} keys: loss {:.4}", v.line_graphs.loss);
        for p in v.pairs.iter().filter(|p| p.status != PairStatus::Unrelated) {
            println!("  edges {:?}: {:?}, overlap {:.3}", p.edges, p.status, p.overlap.mean);
            for (end, t) in [("subject", &p.subject_transfer), ("object", &p.object_transfer)] {
                if let Some(t) = t {
                    println!("    {end} {} ~ {}: {:.3}", t.from, t.to, t.forward.max(t.backward));
                }
            }
        }
        println!("  verdict: {}", if v.inconsistent { "inconsistent" } else { "consistent" });
    }
    Ok(())
}
