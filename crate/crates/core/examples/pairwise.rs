//! Compare two claims through their knowledge segments.
//!
//! `cargo run -p kgreason --example pairwise`

use kgreason::mining::PredicateSimilarityModel;
use kgreason::pairwise::{reason_pair, OppositionTable, ReasonParams};
use kgreason::query::Clue;
use kgreason::store::{KnowledgeGraph, LoadConfig};

fn main() -> kgreason::Result<()> {
    let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures");
    let (graph, _) = KnowledgeGraph::load_tsv(format!("{dir}/obama.tsv"), &LoadConfig::default())?;
    let model = PredicateSimilarityModel::load(format!("{dir}/obama.model.json"))?;
    let opposites = OppositionTable::builtin();
    let params = ReasonParams::default();

    let born = Clue::new("Barack Obama", "wasBornIn", "Honolulu");
    for other in [
        Clue::new("Barack Obama", "wasBornIn", "Hawaii"),
        Clue::new("Barack Obama", "wasBornIn", "Chicago"),
        Clue::new("Google", "isLocatedIn", "United States"),
    ] {
        let v = reason_pair(&graph, &model, &born, &other, &opposites, &params)?;
        print!("{other}: case {}", v.case);
        if let Some(o) = &v.overlap_rate {
            print!(", overlap {:.3}", o.mean);
        }
        if let Some(t) = &v.transfer {
            print!(", transfer {} -> {} {:.3}", t.from, t.to, t.forward.max(t.backward));
        }
        println!(" => {}", if v.inconsistent { "inconsistent" } else { "no conflict" });
    }
    Ok(())
}
