//! Drive the HTTP API without opening a socket, the way an embedding
//! application or a test would.
//!
//! `cargo run -p kgreason-service --example in_process`

use axum::body::Body;
use axum::http::Request;
use http_body_util::BodyExt;
use kgreason::mining::PredicateSimilarityModel;
use kgreason::pairwise::OppositionTable;
use kgreason::store::{KnowledgeGraph, LoadConfig};
use kgreason_service::{router, AppState, ServiceConfig, Snapshot};
use tower::ServiceExt;

#[tokio::main]
async fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/../core/fixtures");
    let (graph, _) = KnowledgeGraph::load_tsv(format!("{dir}/obama.tsv"), &LoadConfig::default())?;
    let model = PredicateSimilarityModel::load(format!("{dir}/obama.model.json"))?;
    let state = AppState::new(Snapshot::new(graph, model, OppositionTable::builtin()), ServiceConfig::default());

    let requests = [
        ("GET", "/health", None),
        ("GET", "/entity?label=Honolulu", None),
        (
            "POST",
            "/reason/pairwise",
            Some(r#"{"t1":["Barack Obama","wasBornIn","Honolulu"],"t2":["Barack Obama","wasBornIn","Chicago"]}"#),
        ),
        // same request again, answered from the cache
        (
            "POST",
            "/reason/pairwise",
            Some(r#"{"t2":["Barack Obama","wasBornIn","Chicago"],"t1":["Barack Obama","wasBornIn","Honolulu"]}"#),
        ),
        ("POST", "/ks/edge", Some(r#"{"triple":["Nobody","wasBornIn","Hawaii"]}"#)),
    ];
    for (method, uri, body) in requests {
        let req = Request::builder().method(method).uri(uri).header("content-type", "application/json");
        let req = req.body(body.map_or_else(Body::empty, Body::from))?;
        let resp = router(state.clone()).oneshot(req).await?;
        let status = resp.status();
        let bytes = resp.into_body().collect().await?.to_bytes();
        let text = String::from_utf8_lossy(&bytes);
        let shown: String = text.chars().take(160).collect();
        println!("{method} {uri} -> {status}\n  {shown}");
    }
    println!("cache holds {} response(s)", state.cache_len());
    Ok(())
}
