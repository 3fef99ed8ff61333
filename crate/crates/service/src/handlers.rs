use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;
use std::time::Instant;

use axum::body::Bytes;
use axum::extract::{Path, Query, State};
use axum::http::{header, StatusCode, Uri};
use axum::response::{IntoResponse, Response};
use kgreason::collective::{reason_collective as collective, CollectiveParams};
use kgreason::pairwise::{reason_pair, CaseLabel, ReasonParams};
use kgreason::query::{Clue, QueryInput};
use kgreason::segment::{
    extract_edge_segment, extract_node_segment, extract_subgraph_segment, EdgeParams, NibbleParams,
    NodeSegmentJson, SegmentJson, SubgraphJson, WeightedView,
};
use kgreason::Error;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::envelope::Outcome;
use crate::state::{AppState, Snapshot};

type Shared = State<Arc<AppState>>;

fn elapsed_ms(start: Instant) -> f64 {
    start.elapsed().as_secs_f64() * 1e3
}

fn joined(result: Result<Outcome, tokio::task::JoinError>) -> Outcome {
    result.unwrap_or_else(|e| {
        Outcome::failure(StatusCode::INTERNAL_SERVER_ERROR, "InternalError", e.to_string(), None)
    })
}

/// Parses the body, then answers from the cache or runs `f` off the async
/// runtime. Past the job threshold the client gets a job id instead.
async fn compute<T, F>(state: Arc<AppState>, uri: &Uri, body: &Bytes, f: F) -> Response
where
    T: DeserializeOwned + Send + 'static,
    F: FnOnce(&Snapshot, T) -> Outcome + Send + 'static,
{
    let start = Instant::now();
    let value: Value = match serde_json::from_slice(body) {
        Ok(v) => v,
        Err(e) => return Outcome::bad_request(format!("malformed JSON: {e}")).into_response(elapsed_ms(start)),
    };
    // serde_json maps are ordered, so re-serializing canonicalizes key order
    let key = format!("{}\n{}", uri.path(), value);
    if let Some(hit) = state.cached(&key) {
        return hit.into_response(elapsed_ms(start));
    }
    let request: T = match serde_json::from_value(value) {
        Ok(r) => r,
        Err(e) => return Outcome::bad_request(e.to_string()).into_response(elapsed_ms(start)),
    };
    let snapshot = state.snapshot();
    let worker = snapshot.clone();
    let mut handle = tokio::task::spawn_blocking(move || f(&worker, request));
    let finished = if state.config.job_after.is_zero() {
        None
    } else {
        tokio::time::timeout(state.config.job_after, &mut handle).await.ok()
    };
    match finished {
        Some(result) => {
            let outcome = joined(result);
            state.remember(key, &outcome, &snapshot);
            outcome.into_response(elapsed_ms(start))
        }
        None => {
            let id = state.start_job();
            let st = state.clone();
            tokio::spawn(async move {
                let outcome = joined(handle.await);
                st.remember(key, &outcome, &snapshot);
                st.finish_job(id, outcome);
            });
            Outcome::pending(id).into_response(elapsed_ms(start))
        }
    }
}

pub async fn health(State(state): Shared) -> Response {
    let start = Instant::now();
    let snap = state.snapshot();
    Outcome::ok(serde_json::json!({
        "entities": snap.graph.entity_count(),
        "predicates": snap.graph.predicate_count(),
        "triples": snap.graph.triple_count(),
        "cached": state.cache_len(),
    }))
    .into_response(elapsed_ms(start))
}

pub async fn spec() -> Response {
    ([(header::CONTENT_TYPE, "application/json")], crate::OPENAPI).into_response()
}

fn param<'a>(q: &'a HashMap<String, String>, name: &str) -> Result<&'a str, Outcome> {
    q.get(name)
        .map(String::as_str)
        .filter(|v| !v.is_empty())
        .ok_or_else(|| Outcome::bad_request(format!("missing query parameter `{name}`")))
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct EntitySummary<'a> {
    id: u32,
    label: &'a str,
    types: &'a [String],
    out_degree: usize,
    in_degree: usize,
    /// Triple count per predicate, both directions.
    predicates: BTreeMap<&'a str, usize>,
}

pub async fn entity(State(state): Shared, Query(q): Query<HashMap<String, String>>) -> Response {
    let start = Instant::now();
    let snap = state.snapshot();
    let g = &snap.graph;
    let outcome = param(&q, "label").and_then(|label| {
        let id = g.entity(label)?;
        let mut predicates = BTreeMap::new();
        for &(p, _) in g.out_edges(id).iter().chain(g.in_edges(id)) {
            *predicates.entry(g.predicate_label(p)).or_insert(0) += 1;
        }
        Ok(Outcome::ok(EntitySummary {
            id: id.0,
            label: g.entity_label(id),
            types: g.entity_types(id),
            out_degree: g.out_degree(id),
            in_degree: g.in_degree(id),
            predicates,
        }))
    });
    outcome.unwrap_or_else(|e| e).into_response(elapsed_ms(start))
}

pub async fn similarity(State(state): Shared, Query(q): Query<HashMap<String, String>>) -> Response {
    let start = Instant::now();
    let snap = state.snapshot();
    let outcome = (|| {
        let (p1, p2) = (param(&q, "p1")?, param(&q, "p2")?);
        let m = &snap.model;
        for p in [p1, p2] {
            if !m.contains(p) {
                return Err(Outcome::from(Error::UnknownPredicate(p.to_owned())));
            }
        }
        Ok(Outcome::ok(serde_json::json!({
            "p1": p1,
            "p2": p2,
            "similarity": m.similarity(p1, p2),
        })))
    })();
    outcome.unwrap_or_else(|e| e).into_response(elapsed_ms(start))
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct PredicateSummary<'a> {
    label: &'a str,
    weight: f64,
    degenerate: bool,
    in_graph: bool,
}

pub async fn predicates(State(state): Shared) -> Response {
    let start = Instant::now();
    let snap = state.snapshot();
    let list: Vec<PredicateSummary> = snap
        .model
        .labels()
        .iter()
        .map(|l| PredicateSummary {
            label: l,
            weight: snap.model.weight(l),
            degenerate: snap.model.is_degenerate(l),
            in_graph: snap.graph.resolve_predicate(l).is_some(),
        })
        .collect();
    Outcome::ok(list).into_response(elapsed_ms(start))
}

/// Edge weights for the node-segment walk.
#[derive(Debug, Clone, Copy, Default, Deserialize)]
#[serde(rename_all = "lowercase")]
enum Weighting {
    /// Entropy weights stored in the model (1 where the model has none).
    #[default]
    Model,
    /// Entropy weights mined from the loaded graph.
    Mined,
    Uniform,
}

#[derive(Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
struct NodeRequest {
    seed: String,
    #[serde(default)]
    params: NibbleParams,
    #[serde(default)]
    weighting: Weighting,
}

pub async fn ks_node(State(state): Shared, uri: Uri, body: Bytes) -> Response {
    compute(state, &uri, &body, |snap, req: NodeRequest| {
        let g = &snap.graph;
        let view = match req.weighting {
            Weighting::Model => WeightedView::from_model(g, &snap.model),
            Weighting::Mined => WeightedView::from_stats(g, snap.mined_stats()),
            Weighting::Uniform => WeightedView::uniform(g),
        };
        match extract_node_segment(&view, &req.seed, &req.params) {
            Ok(seg) if seg.segment.empty => Outcome::failure(
                StatusCode::UNPROCESSABLE_ENTITY,
                "EmptySegment",
                Error::EmptySegment(req.seed.clone()).to_string(),
                serde_json::to_value(NodeSegmentJson::new(g, &seg)).ok(),
            ),
            Ok(seg) => Outcome::ok(NodeSegmentJson::new(g, &seg)),
            Err(e) => e.into(),
        }
    })
    .await
}

#[derive(Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
struct EdgeRequest {
    triple: Clue,
    k: Option<usize>,
    bidirectional: Option<bool>,
    exclude_clue: Option<bool>,
}

fn edge_params(k: Option<usize>, bidirectional: Option<bool>, exclude_clue: Option<bool>) -> EdgeParams {
    let d = EdgeParams::default();
    EdgeParams {
        k: k.unwrap_or(d.k),
        bidirectional: bidirectional.unwrap_or(d.bidirectional),
        exclude_clue: exclude_clue.unwrap_or(d.exclude_clue),
    }
}

pub async fn ks_edge(State(state): Shared, uri: Uri, body: Bytes) -> Response {
    compute(state, &uri, &body, |snap, req: EdgeRequest| {
        let params = edge_params(req.k, req.bidirectional, req.exclude_clue);
        match extract_edge_segment(&snap.graph, &snap.model, &req.triple, &params) {
            Ok(seg) => Outcome::ok(SegmentJson::from_edge_segment(&snap.graph, &seg)),
            Err(e) => e.into(),
        }
    })
    .await
}

#[derive(Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
struct SubgraphRequest {
    query_graph: QueryInput,
    k: Option<usize>,
    bidirectional: Option<bool>,
    exclude_clue: Option<bool>,
}

pub async fn ks_subgraph(State(state): Shared, uri: Uri, body: Bytes) -> Response {
    compute(state, &uri, &body, |snap, req: SubgraphRequest| {
        let params = edge_params(req.k, req.bidirectional, req.exclude_clue);
        let query = req.query_graph.into_graph();
        match extract_subgraph_segment(&snap.graph, &snap.model, &query, &params) {
            Ok(seg) => {
                let json = SubgraphJson::new(&snap.graph, &seg);
                match seg.edges.iter().find(|e| !e.is_ok()) {
                    None => Outcome::ok(json),
                    Some(missing) => Outcome::failure(
                        StatusCode::UNPROCESSABLE_ENTITY,
                        "NoPath",
                        Error::NoPath {
                            from: missing.clue.subject.clone(),
                            to: missing.clue.object.clone(),
                        }
                        .to_string(),
                        serde_json::to_value(json).ok(),
                    ),
                }
            }
            Err(e) => e.into(),
        }
    })
    .await
}

#[derive(Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
struct PairRequest {
    t1: Clue,
    t2: Clue,
    #[serde(default)]
    params: ReasonParams,
}

pub async fn reason_pairwise(State(state): Shared, uri: Uri, body: Bytes) -> Response {
    compute(state, &uri, &body, |snap, req: PairRequest| {
        match reason_pair(&snap.graph, &snap.model, &req.t1, &req.t2, &snap.opposites, &req.params) {
            Ok(v) => {
                let mut warnings = Vec::new();
                if matches!(v.case, CaseLabel::C1 | CaseLabel::C5 | CaseLabel::C6) {
                    warnings.push(format!("case {} needs no consistency check", v.case));
                }
                Outcome::ok_with(v, warnings)
            }
            Err(e) => e.into(),
        }
    })
    .await
}

#[derive(Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
struct CollectiveRequest {
    query_graph: QueryInput,
    #[serde(default)]
    params: CollectiveParams,
}

pub async fn reason_collective(State(state): Shared, uri: Uri, body: Bytes) -> Response {
    compute(state, &uri, &body, |snap, req: CollectiveRequest| {
        let query = req.query_graph.into_graph();
        match collective(&snap.graph, &snap.model, &query, &req.params) {
            Ok(v) => Outcome::ok(v),
            Err(e) => e.into(),
        }
    })
    .await
}

pub async fn job(State(state): Shared, Path(id): Path<u64>) -> Response {
    let start = Instant::now();
    match state.job(id) {
        Some(Ok(outcome)) => outcome.into_response(elapsed_ms(start)),
        Some(Err(running)) => Outcome::pending(id).into_response(running.as_secs_f64() * 1e3),
        None => Outcome::failure(StatusCode::NOT_FOUND, "UnknownJob", format!("no job {id}"), None)
            .into_response(elapsed_ms(start)),
    }
}
