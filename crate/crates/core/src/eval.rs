//! Accuracy of verdicts over a labelled query file.
//!
//! One JSON object per line: `{"queries": [triple, ...], "label":
//! "consistent" | "inconsistent", "category": "..."}`. Two triples go through
//! pairwise reasoning, three or more through collective reasoning.

use std::collections::BTreeMap;
use std::io::BufRead;
use std::num::NonZeroUsize;
use std::thread;

use serde::{Deserialize, Serialize};

use crate::collective::{reason_collective, CollectiveParams};
use crate::error::{Error, Result};
use crate::mining::PredicateSimilarityModel;
use crate::pairwise::{reason_pair, OppositionTable};
use crate::query::{Clue, QueryGraph};
use crate::store::KnowledgeGraph;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Label {
    Consistent,
    Inconsistent,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalCase {
    pub queries: Vec<Clue>,
    pub label: Label,
    #[serde(default = "default_category")]
    pub category: String,
}

fn default_category() -> String {
    "default".into()
}

/// Parses the JSON-lines format; blank lines are skipped.
pub fn read_cases<R: BufRead>(reader: R) -> Result<Vec<EvalCase>> {
    let mut out = Vec::new();
    for (no, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| Error::Format {
            line: no + 1,
            message: e.to_string(),
        })?;
        if line.trim().is_empty() {
            continue;
        }
        let case: EvalCase = serde_json::from_str(&line).map_err(|e| Error::Format {
            line: no + 1,
            message: e.to_string(),
        })?;
        if case.queries.len() < 2 {
            return Err(Error::Format {
                line: no + 1,
                message: "a case needs at least two triples".into(),
            });
        }
        out.push(case);
    }
    Ok(out)
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct CaseOutcome {
    pub index: usize,
    pub category: String,
    pub label: Label,
    /// `None` when reasoning failed.
    pub predicted: Option<Label>,
    pub correct: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Accuracy {
    pub correct: usize,
    pub total: usize,
    pub accuracy: f64,
}

impl Accuracy {
    fn add(&mut self, correct: bool) {
        self.total += 1;
        self.correct += usize::from(correct);
        self.accuracy = self.correct as f64 / self.total as f64;
    }
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct EvalReport {
    pub overall: Accuracy,
    pub categories: BTreeMap<String, Accuracy>,
    pub cases: Vec<CaseOutcome>,
}

fn predict(
    graph: &KnowledgeGraph,
    model: &PredicateSimilarityModel,
    opposites: &OppositionTable,
    params: &CollectiveParams,
    queries: &[Clue],
) -> Result<Label> {
    let inconsistent = if let [t1, t2] = queries {
        reason_pair(graph, model, t1, t2, opposites, &params.reason)?.inconsistent
    } else {
        reason_collective(graph, model, &QueryGraph::from_clues(queries), params)?.inconsistent
    };
    Ok(if inconsistent {
        Label::Inconsistent
    } else {
        Label::Consistent
    })
}

/// Runs every case, spreading them over up to `threads` workers. Output order
/// follows input order.
pub fn evaluate(
    graph: &KnowledgeGraph,
    model: &PredicateSimilarityModel,
    opposites: &OppositionTable,
    params: &CollectiveParams,
    cases: &[EvalCase],
    threads: Option<NonZeroUsize>,
) -> EvalReport {
    let workers = threads
        .or_else(|| thread::available_parallelism().ok())
        .map_or(1, NonZeroUsize::get)
        .min(cases.len().max(1));
    let chunk = cases.len().div_ceil(workers).max(1);
    let run = |offset: usize, slice: &[EvalCase]| -> Vec<CaseOutcome> {
        slice
            .iter()
            .enumerate()
            .map(|(i, case)| {
                let result = predict(graph, model, opposites, params, &case.queries);
                let predicted = result.as_ref().ok().copied();
                CaseOutcome {
                    index: offset + i,
                    category: case.category.clone(),
                    label: case.label,
                    predicted,
                    correct: predicted == Some(case.label),
                    error: result.err().map(|e| e.to_string()),
                }
            })
            .collect()
    };
    let outcomes: Vec<CaseOutcome> = thread::scope(|s| {
        let handles: Vec<_> = cases
            .chunks(chunk)
            .enumerate()
            .map(|(i, slice)| s.spawn(move || run(i * chunk, slice)))
            .collect();
        handles
            .into_iter()
            .flat_map(|h| h.join().expect("evaluation worker panicked"))
            .collect()
    });

    let mut overall = Accuracy::default();
    let mut categories: BTreeMap<String, Accuracy> = BTreeMap::new();
    for o in &outcomes {
        overall.add(o.correct);
        categories.entry(o.category.clone()).or_default().add(o.correct);
    }
    EvalReport {
        overall,
        categories,
        cases: outcomes,
    }
}
