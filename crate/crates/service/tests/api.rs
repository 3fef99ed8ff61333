use std::path::PathBuf;
use std::sync::Arc;
use std::time::{Duration, Instant};

use axum::body::Body;
use axum::http::{Request, StatusCode};
use http_body_util::BodyExt;
use kgreason::mining::PredicateSimilarityModel;
use kgreason::pairwise::OppositionTable;
use kgreason::store::{KnowledgeGraph, LoadConfig};
use kgreason_service::{router, AppState, ServiceConfig, Snapshot};
use serde_json::{json, Value};
use tower::ServiceExt;

fn fixture(name: &str) -> Snapshot {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/fixtures");
    let (mut graph, _) = KnowledgeGraph::load_tsv(dir.join(format!("{name}.tsv")), &LoadConfig::default()).unwrap();
    let types = dir.join(format!("{name}.types.tsv"));
    if types.exists() {
        graph.load_types(types).unwrap();
    }
    let model = PredicateSimilarityModel::load(dir.join(format!("{name}.model.json"))).unwrap();
    Snapshot::new(graph, model, OppositionTable::builtin())
}

fn state(name: &str) -> Arc<AppState> {
    AppState::new(fixture(name), ServiceConfig::default())
}

async fn call(state: &Arc<AppState>, method: &str, uri: &str, body: Option<Value>) -> (StatusCode, String) {
    let req = Request::builder().method(method).uri(uri);
    let req = match body {
        Some(b) => req.header("content-type", "application/json").body(Body::from(b.to_string())),
        None => req.body(Body::empty()),
    }
    .unwrap();
    let resp = router(state.clone()).oneshot(req).await.unwrap();
    let code = resp.status();
    let bytes = resp.into_body().collect().await.unwrap().to_bytes();
    (code, String::from_utf8(bytes.to_vec()).unwrap())
}

fn parse(text: &str) -> Value {
    serde_json::from_str(text).unwrap()
}

/// The body with the timing field removed.
fn untimed(text: &str) -> String {
    let mut v = parse(text);
    v.as_object_mut().unwrap().remove("elapsedMs");
    v.to_string()
}

fn pair_request() -> Value {
    json!({
        "t1": ["White House", "participatedIn", "Operation Mountain Thrust"],
        "t2": {"subject": "White House", "predicate": "punish", "object": "Iraqi Army"}
    })
}

#[tokio::test]
async fn pairwise_fixture_is_inconsistent_and_repeats_identically() {
    let s = state("iraq_pair");
    let (code, first) = call(&s, "POST", "/reason/pairwise", Some(pair_request())).await;
    assert_eq!(code, StatusCode::OK, "{first}");
    let v = parse(&first);
    assert_eq!(v["status"], "ok");
    assert_eq!(v["result"]["inconsistent"], true);
    assert_eq!(v["result"]["case"], "C3");
    let want = untimed(&first);
    for _ in 0..100 {
        let start = Instant::now();
        let (code, body) = call(&s, "POST", "/reason/pairwise", Some(pair_request())).await;
        assert!(start.elapsed() < Duration::from_millis(500));
        assert_eq!(code, StatusCode::OK);
        assert_eq!(untimed(&body), want);
    }
    assert_eq!(s.cache_len(), 1);
}

#[tokio::test]
async fn key_order_does_not_split_the_cache() {
    let s = state("iraq_pair");
    let a = r#"{"t1":["White House","participatedIn","Operation Mountain Thrust"],"t2":["White House","punish","Iraqi Army"],"params":{"k":5}}"#;
    let b = r#"{"params":{"k":5},"t2":["White House","punish","Iraqi Army"],"t1":["White House","participatedIn","Operation Mountain Thrust"]}"#;
    let (_, x) = call(&s, "POST", "/reason/pairwise", Some(parse(a))).await;
    let (_, y) = call(&s, "POST", "/reason/pairwise", Some(parse(b))).await;
    assert_eq!(untimed(&x), untimed(&y));
    assert_eq!(s.cache_len(), 1);
}

#[tokio::test]
async fn collective_fixture() {
    let s = state("iraq_collective");
    let body = json!({"queryGraph": [
        ["White House", "punish", "Iraqi Army"],
        ["Washington,D.C", "means", "White House"],
        ["Washington,D.C", "participatedIn", "Operation Mountain Thrust"]
    ]});
    let (code, text) = call(&s, "POST", "/reason/collective", Some(body)).await;
    assert_eq!(code, StatusCode::OK, "{text}");
    let v = parse(&text);
    assert_eq!(v["result"]["inconsistent"], true);
    let pairs = v["result"]["pairs"].as_array().unwrap();
    assert!(pairs.iter().any(|p| p["status"] == "inconsistent"));
}

#[tokio::test]
async fn node_segment_for_obama() {
    let s = state("obama");
    let (code, text) = call(&s, "POST", "/ks/node", Some(json!({"seed": "Barack Obama", "weighting": "mined"}))).await;
    assert_eq!(code, StatusCode::OK, "{text}");
    let v = parse(&text);
    let edges = v["result"]["segment"]["edges"].as_array().unwrap();
    assert!(edges.iter().any(|e| e["pred"] == "isMarriedTo"));
    assert!(v["result"]["conductance"].as_f64().unwrap() < 1.0);
}

#[tokio::test]
async fn edge_and_subgraph_segments() {
    let s = state("iraq_pair");
    let body = json!({"triple": ["Operation Mountain Thrust", "isTypeOf", "Iraqi Army"], "k": 3, "bidirectional": true});
    let (code, text) = call(&s, "POST", "/ks/edge", Some(body)).await;
    assert_eq!(code, StatusCode::OK, "{text}");
    let v = parse(&text);
    let costs: Vec<f64> = v["result"]["paths"].as_array().unwrap().iter().map(|p| p["cost"].as_f64().unwrap()).collect();
    assert!(!costs.is_empty() && costs.windows(2).all(|w| w[0] <= w[1]));

    let body = json!({"queryGraph": [["White House", "participatedIn", "Operation Mountain Thrust"], ["White House", "punish", "Iraqi Army"]], "bidirectional": true});
    let (code, text) = call(&s, "POST", "/ks/subgraph", Some(body)).await;
    assert_eq!(code, StatusCode::OK, "{text}");
    let v = parse(&text);
    assert_eq!(v["result"]["allFound"], true);
    assert_eq!(v["result"]["edges"].as_array().unwrap().len(), 2);
    assert!(!v["result"]["merged"]["edges"].as_array().unwrap().is_empty());
}

#[tokio::test]
async fn error_statuses() {
    let s = state("iraq_pair");
    let (code, text) = call(&s, "POST", "/ks/edge", Some(json!({"triple": ["Nobody", "isTypeOf", "Iraq"]}))).await;
    assert_eq!(code, StatusCode::NOT_FOUND);
    assert_eq!(parse(&text)["error"], "UnknownEntity");

    let req = Request::builder()
        .method("POST")
        .uri("/ks/edge")
        .body(Body::from("{not json"))
        .unwrap();
    assert_eq!(router(s.clone()).oneshot(req).await.unwrap().status(), StatusCode::BAD_REQUEST);
    let (code, _) = call(&s, "POST", "/ks/edge", Some(json!({"triple": ["a", "b"]}))).await;
    assert_eq!(code, StatusCode::BAD_REQUEST);
    let (code, _) = call(&s, "POST", "/ks/edge", Some(json!({"triple": ["Iraq", "isTypeOf", "Asia"], "bogus": 1}))).await;
    assert_eq!(code, StatusCode::BAD_REQUEST);

    // Asia has no outgoing isTypeOf-similar edge in directed mode
    let (code, text) = call(&s, "POST", "/ks/edge", Some(json!({"triple": ["Asia", "isTypeOf", "Iraq"]}))).await;
    assert_eq!(code, StatusCode::UNPROCESSABLE_ENTITY, "{text}");
    assert_eq!(parse(&text)["error"], "NoPath");

    let (code, text) = call(&s, "GET", "/predicates/similarity?p1=isTypeOf&p2=nothing", None).await;
    assert_eq!(code, StatusCode::NOT_FOUND);
    assert_eq!(parse(&text)["error"], "UnknownPredicate");
    let (code, _) = call(&s, "GET", "/entity", None).await;
    assert_eq!(code, StatusCode::BAD_REQUEST);
    let (code, _) = call(&s, "GET", "/jobs/99", None).await;
    assert_eq!(code, StatusCode::NOT_FOUND);
}

#[tokio::test]
async fn lookups() {
    let s = state("iraq_collective");
    let (code, text) = call(&s, "GET", "/entity?label=Washington,D.C", None).await;
    assert_eq!(code, StatusCode::OK);
    let v = parse(&text);
    assert_eq!(v["result"]["types"], json!(["City"]));
    assert!(v["result"]["inDegree"].as_u64().unwrap() > 0);
    let (_, text) = call(&s, "GET", "/predicates/similarity?p1=isTypeOf&p2=isLocatedIn", None).await;
    assert!((parse(&text)["result"]["similarity"].as_f64().unwrap() - 0.87).abs() < 1e-12);
    let (_, text) = call(&s, "GET", "/predicates", None).await;
    assert!(parse(&text)["result"].as_array().unwrap().iter().any(|p| p["label"] == "isTypeOf"));
    let (code, text) = call(&s, "GET", "/health", None).await;
    assert_eq!(code, StatusCode::OK);
    assert!(parse(&text)["result"]["triples"].as_u64().unwrap() > 10);
    let (code, text) = call(&s, "GET", "/spec", None).await;
    assert_eq!(code, StatusCode::OK);
    let spec = parse(&text);
    for path in ["/health", "/entity", "/predicates/similarity", "/ks/node", "/ks/edge", "/ks/subgraph", "/reason/pairwise", "/reason/collective"] {
        assert!(spec["paths"][path].is_object(), "{path} missing from /spec");
    }
}

#[tokio::test]
async fn slow_requests_become_jobs() {
    let config = ServiceConfig {
        job_after: Duration::ZERO,
        ..ServiceConfig::default()
    };
    let s = AppState::new(fixture("iraq_pair"), config);
    let (code, text) = call(&s, "POST", "/reason/pairwise", Some(pair_request())).await;
    assert_eq!(code, StatusCode::ACCEPTED, "{text}");
    let id = parse(&text)["job"].as_u64().unwrap();
    let deadline = Instant::now() + Duration::from_secs(10);
    loop {
        let (code, text) = call(&s, "GET", &format!("/jobs/{id}"), None).await;
        if code == StatusCode::OK {
            assert_eq!(parse(&text)["result"]["inconsistent"], true);
            break;
        }
        assert_eq!(code, StatusCode::ACCEPTED);
        assert!(Instant::now() < deadline, "job never finished");
        tokio::time::sleep(Duration::from_millis(10)).await;
    }
    // the finished job also filled the cache
    let (code, _) = call(&s, "POST", "/reason/pairwise", Some(pair_request())).await;
    assert_eq!(code, StatusCode::OK);
}

#[tokio::test]
async fn replacing_the_snapshot_clears_the_cache() {
    let s = state("iraq_pair");
    call(&s, "POST", "/reason/pairwise", Some(pair_request())).await;
    assert_eq!(s.cache_len(), 1);
    s.replace(fixture("obama"));
    assert_eq!(s.cache_len(), 0);
    let (code, _) = call(&s, "POST", "/reason/pairwise", Some(pair_request())).await;
    assert_eq!(code, StatusCode::NOT_FOUND);
}
