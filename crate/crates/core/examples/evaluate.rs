//! Accuracy over a labelled query file, split by category.
//!
//! `cargo run -p kgreason --example evaluate [graph.tsv model.json queries.jsonl]`

use std::fs::File;
use std::io::BufReader;

use kgreason::collective::CollectiveParams;
use kgreason::eval::{evaluate, read_cases};
use kgreason::mining::PredicateSimilarityModel;
use kgreason::pairwise::OppositionTable;
use kgreason::store::{KnowledgeGraph, LoadConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures");
    let args: Vec<String> = std::env::args().skip(1).collect();
    let (graph, model, queries) = match args.as_slice() {
        [g, m, q] => (g.clone(), m.clone(), q.clone()),
        _ => (format!("{dir}/obama.tsv"), format!("{dir}/obama.model.json"), format!("{dir}/obama_eval.jsonl")),
    };
    let (graph, _) = KnowledgeGraph::load_tsv(graph, &LoadConfig::default())?;
    let model = PredicateSimilarityModel::load(model)?;
    let cases = read_cases(BufReader::new(File::open(queries)?))?;

    let report = evaluate(&graph, &model, &OppositionTable::builtin(), &CollectiveParams::default(), &cases, None);
    for (name, acc) in &report.categories {
        println!("{name:<12} {}/{}", acc.correct, acc.total);
    }
    println!("overall      {}/{} ({:.1}%)", report.overall.correct, report.overall.total, 100.0 * report.overall.accuracy);
    for c in report.cases.iter().filter(|c| c.error.is_some()) {
        println!("case {} not decided: {}", c.index, c.error.as_deref().unwrap_or_default());
    }
    Ok(())
}
