//! Loaders for the small hand-built graphs under `fixtures/`.

use std::path::PathBuf;

use kgreason::mining::PredicateSimilarityModel;
use kgreason::store::{KnowledgeGraph, LoadConfig};

pub fn dir() -> PathBuf {
    // resolves from the core crate and from its sibling crates alike
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/fixtures")
}

/// Graph, optional types file and pinned model sharing the stem `name`.
pub fn load(name: &str) -> (KnowledgeGraph, PredicateSimilarityModel) {
    let base = dir();
    let (mut graph, _) = KnowledgeGraph::load_tsv(base.join(format!("{name}.tsv")), &LoadConfig::default())
        .unwrap_or_else(|e| panic!("{name}.tsv: {e}"));
    let types = base.join(format!("{name}.types.tsv"));
    if types.exists() {
        graph.load_types(&types).unwrap();
    }
    let model = PredicateSimilarityModel::load(base.join(format!("{name}.model.json"))).unwrap();
    (graph, model)
}

/// Two 5-cliques `n0..n4` and `n5..n9` joined by the single edge `n4 - n5`.
pub fn two_cliques() -> KnowledgeGraph {
    let mut t: Vec<(String, String)> = Vec::new();
    for base in [0, 5] {
        for i in 0..5 {
            for j in i + 1..5 {
                t.push((format!("n{}", base + i), format!("n{}", base + j)));
            }
        }
    }
    t.push(("n4".into(), "n5".into()));
    KnowledgeGraph::from_triples(t.iter().map(|(a, b)| (a.as_str(), "link", b.as_str())))
}
