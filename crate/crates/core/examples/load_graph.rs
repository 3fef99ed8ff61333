//! Load a triple file, look entities up and walk their neighbors.
//!
//! `cargo run -p kgreason --example load_graph [graph.tsv] [entity]`

use kgreason::store::{Direction, EdgeDirection, KnowledgeGraph, LoadConfig};

fn main() -> kgreason::Result<()> {
    let mut args = std::env::args().skip(1);
    let path = args.next().unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/obama.tsv").into());
    let who = args.next().unwrap_or_else(|| "Barack Obama".into());

    let (graph, report) = KnowledgeGraph::load_tsv(&path, &LoadConfig::default())?;
    println!(
        "{} entities, {} predicates, {} triples ({} malformed lines skipped)",
        graph.entity_count(),
        graph.predicate_count(),
        graph.triple_count(),
        report.malformed.len()
    );

    let id = graph.entity(&who)?;
    println!("{who}: out-degree {}, in-degree {}", graph.out_degree(id), graph.in_degree(id));
    for n in graph.neighbors(id, Direction::Both)? {
        let (p, other) = (graph.predicate_label(n.predicate), graph.entity_label(n.entity));
        match n.direction {
            EdgeDirection::Out => println!("  -[{p}]-> {other}"),
            EdgeDirection::In => println!("  <-[{p}]- {other}"),
        }
    }
    Ok(())
}
