use std::collections::{BTreeMap, HashMap};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::cooccurrence::{compute_cooccurrence, CooccurrenceMode, SquareMatrix};
use super::entropy::PredicateStats;
use crate::error::{Error, Result};
use crate::store::KnowledgeGraph;

pub const MODEL_FORMAT: &str = "kgreason.predicate-model";
pub const MODEL_VERSION: u32 = 1;

/// Predicate weights and predicate-predicate similarity, keyed by predicate label.
///
/// The label vocabulary is the model's own: it may name predicates that never
/// occur in the graph (an abstract `isTypeOf`, say), which is how query
/// predicates outside the graph get similarities.
#[derive(Debug, Clone)]
pub struct PredicateSimilarityModel {
    labels: Vec<String>,
    index: HashMap<String, usize>,
    stats: Vec<Option<PredicateStats>>,
    cooccurrence: Option<SquareMatrix>,
    tfidf: Option<SquareMatrix>,
    similarity: SquareMatrix,
    degenerate: Vec<bool>,
}

/// TF-IDF similarity model for `graph`.
///
/// `stats` must be indexed by graph predicate id, as returned by
/// [`compute_predicate_stats`](super::compute_predicate_stats).
pub fn compute_similarity_model(
    graph: &KnowledgeGraph,
    stats: &[PredicateStats],
    mode: CooccurrenceMode,
) -> PredicateSimilarityModel {
    let m = graph.predicate_count();
    let c = compute_cooccurrence(graph, mode);
    let weight = |j: usize| stats.get(j).map_or(1.0, |s| s.weight);

    let idf: Vec<f64> = (0..m)
        .map(|j| {
            let df = (0..m).filter(|&i| c.get(i, j) > 0.0).count();
            if df == 0 {
                0.0
            } else {
                (m as f64 / df as f64).ln()
            }
        })
        .collect();

    let mut u = SquareMatrix::zeros(m);
    for i in 0..m {
        for j in 0..m {
            let tf = (1.0 + c.get(i, j) * weight(j)).ln();
            u.set(i, j, tf * idf[j]);
        }
    }

    let norms: Vec<f64> = (0..m)
        .map(|i| u.row(i).iter().map(|x| x * x).sum::<f64>().sqrt())
        .collect();
    let degenerate: Vec<bool> = norms.iter().map(|&n| n == 0.0).collect();
    let mut sim = SquareMatrix::zeros(m);
    for i in 0..m {
        if degenerate[i] {
            continue;
        }
        sim.set(i, i, 1.0);
        for j in 0..i {
            if degenerate[j] {
                continue;
            }
            let dot: f64 = u.row(i).iter().zip(u.row(j)).map(|(a, b)| a * b).sum();
            let s = (dot / (norms[i] * norms[j])).clamp(0.0, 1.0);
            sim.set(i, j, s);
            sim.set(j, i, s);
        }
    }

    let labels: Vec<String> = graph.predicates().labels().to_vec();
    PredicateSimilarityModel {
        index: labels
            .iter()
            .enumerate()
            .map(|(i, l)| (l.clone(), i))
            .collect(),
        labels,
        stats: (0..m).map(|i| stats.get(i).cloned()).collect(),
        cooccurrence: Some(c),
        tfidf: Some(u),
        similarity: sim,
        degenerate,
    }
}

impl PredicateSimilarityModel {
    /// A model with hand-set similarities. Unlisted pairs are 0, every
    /// predicate is similar to itself with 1, and all weights are 1.
    pub fn pinned<S: AsRef<str>>(labels: &[S], entries: &[(&str, &str, f64)]) -> Result<Self> {
        let labels: Vec<String> = labels.iter().map(|l| l.as_ref().to_owned()).collect();
        let index: HashMap<String, usize> = labels
            .iter()
            .enumerate()
            .map(|(i, l)| (l.clone(), i))
            .collect();
        if index.len() != labels.len() {
            return Err(Error::Model("duplicate predicate label".into()));
        }
        let n = labels.len();
        let mut sim = SquareMatrix::zeros(n);
        for i in 0..n {
            sim.set(i, i, 1.0);
        }
        for &(a, b, s) in entries {
            let i = *index.get(a).ok_or_else(|| Error::UnknownPredicate(a.into()))?;
            let j = *index.get(b).ok_or_else(|| Error::UnknownPredicate(b.into()))?;
            if !(0.0..=1.0).contains(&s) {
                return Err(Error::Model(format!("similarity {s} for ({a}, {b}) outside [0, 1]")));
            }
            sim.set(i, j, s);
            sim.set(j, i, s);
        }
        Ok(PredicateSimilarityModel {
            labels,
            index,
            stats: vec![None; n],
            cooccurrence: None,
            tfidf: None,
            similarity: sim,
            degenerate: vec![false; n],
        })
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.index.get(label).copied()
    }

    pub fn contains(&self, label: &str) -> bool {
        self.index.contains_key(label)
    }

    /// Similarity by model index.
    pub fn sim(&self, i: usize, j: usize) -> f64 {
        self.similarity.get(i, j)
    }

    /// Similarity by label; `None` when either label is outside the vocabulary.
    pub fn similarity(&self, a: &str, b: &str) -> Option<f64> {
        Some(self.sim(self.index_of(a)?, self.index_of(b)?))
    }

    /// Entropy weight of a predicate; 1 for predicates without statistics.
    pub fn weight(&self, label: &str) -> f64 {
        self.index_of(label)
            .and_then(|i| self.stats[i].as_ref())
            .map_or(1.0, |s| s.weight)
    }

    pub fn stats(&self, label: &str) -> Option<&PredicateStats> {
        self.index_of(label).and_then(|i| self.stats[i].as_ref())
    }

    pub fn similarity_matrix(&self) -> &SquareMatrix {
        &self.similarity
    }

    pub fn cooccurrence(&self) -> Option<&SquareMatrix> {
        self.cooccurrence.as_ref()
    }

    pub fn tfidf(&self) -> Option<&SquareMatrix> {
        self.tfidf.as_ref()
    }

    pub fn is_degenerate(&self, label: &str) -> bool {
        self.index_of(label).is_some_and(|i| self.degenerate[i])
    }

    /// Predicates whose TF-IDF row is all zero.
    pub fn degenerate_predicates(&self) -> Vec<&str> {
        self.labels
            .iter()
            .zip(&self.degenerate)
            .filter(|(_, &d)| d)
            .map(|(l, _)| l.as_str())
            .collect()
    }

    /// The `n` most similar other predicates, best first (ties by label).
    pub fn most_similar(&self, label: &str, n: usize) -> Vec<(&str, f64)> {
        let Some(i) = self.index_of(label) else {
            return Vec::new();
        };
        let mut v: Vec<(&str, f64)> = (0..self.len())
            .filter(|&j| j != i)
            .map(|j| (self.labels[j].as_str(), self.sim(i, j)))
            .collect();
        v.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(b.0)));
        v.truncate(n);
        v
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_file()).expect("model serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: ModelFile =
            serde_json::from_str(text).map_err(|e| Error::Model(e.to_string()))?;
        Self::from_file(file)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_json()).map_err(|source| Error::Io {
            path: path.to_owned(),
            source,
        })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_owned(),
            source,
        })?;
        Self::from_json(&text)
    }

    fn sparse(&self, m: &SquareMatrix) -> BTreeMap<String, BTreeMap<String, f64>> {
        let mut out = BTreeMap::new();
        for i in 0..m.dim() {
            let row: BTreeMap<String, f64> = (0..m.dim())
                .filter(|&j| m.get(i, j) != 0.0)
                .map(|j| (self.labels[j].clone(), m.get(i, j)))
                .collect();
            if !row.is_empty() {
                out.insert(self.labels[i].clone(), row);
            }
        }
        out
    }

    fn to_file(&self) -> ModelFile {
        ModelFile {
            format: MODEL_FORMAT.to_owned(),
            version: MODEL_VERSION,
            predicates: self.labels.clone(),
            stats: self
                .labels
                .iter()
                .zip(&self.stats)
                .filter_map(|(l, s)| {
                    s.as_ref().map(|s| {
                        (
                            l.clone(),
                            StatsEntry {
                                degree_counts: s.degree_counts.clone(),
                                entropy: s.entropy,
                                weight: s.weight,
                            },
                        )
                    })
                })
                .collect(),
            cooccurrence: self.cooccurrence.as_ref().map(|m| self.sparse(m)),
            tfidf: self.tfidf.as_ref().map(|m| self.sparse(m)),
            similarity: self.sparse(&self.similarity),
            degenerate: self
                .degenerate_predicates()
                .into_iter()
                .map(str::to_owned)
                .collect(),
        }
    }

    fn from_file(file: ModelFile) -> Result<Self> {
        if file.format != MODEL_FORMAT {
            return Err(Error::Model(format!("unexpected format `{}`", file.format)));
        }
        if file.version != MODEL_VERSION {
            return Err(Error::Model(format!("unsupported version {}", file.version)));
        }
        let labels = file.predicates;
        let n = labels.len();
        let index: HashMap<String, usize> = labels
            .iter()
            .enumerate()
            .map(|(i, l)| (l.clone(), i))
            .collect();
        if index.len() != n {
            return Err(Error::Model("duplicate predicate label".into()));
        }
        let lookup = |l: &str| {
            index
                .get(l)
                .copied()
                .ok_or_else(|| Error::Model(format!("label `{l}` not in predicate list")))
        };
        let dense = |sparse: &BTreeMap<String, BTreeMap<String, f64>>| -> Result<SquareMatrix> {
            let mut m = SquareMatrix::zeros(n);
            for (a, row) in sparse {
                let i = lookup(a)?;
                for (b, &v) in row {
                    m.set(i, lookup(b)?, v);
                }
            }
            Ok(m)
        };
        let similarity = dense(&file.similarity)?;
        for i in 0..n {
            for j in 0..n {
                let v = similarity.get(i, j);
                if !(0.0..=1.0).contains(&v) || v != similarity.get(j, i) {
                    return Err(Error::Model(format!(
                        "similarity ({}, {}) must be symmetric and within [0, 1]",
                        labels[i], labels[j]
                    )));
                }
            }
        }
        let mut stats = vec![None; n];
        for (l, s) in file.stats {
            let i = lookup(&l)?;
            stats[i] = Some(PredicateStats {
                predicate: crate::store::PredicateId(i as u32),
                label: l,
                degree_counts: s.degree_counts,
                entropy: s.entropy,
                weight: s.weight,
            });
        }
        let mut degenerate = vec![false; n];
        for l in &file.degenerate {
            degenerate[lookup(l)?] = true;
        }
        let cooccurrence = file.cooccurrence.as_ref().map(&dense).transpose()?;
        let tfidf = file.tfidf.as_ref().map(&dense).transpose()?;
        Ok(PredicateSimilarityModel {
            labels,
            index,
            stats,
            cooccurrence,
            tfidf,
            similarity,
            degenerate,
        })
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
struct StatsEntry {
    degree_counts: BTreeMap<usize, usize>,
    entropy: f64,
    weight: f64,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
struct ModelFile {
    format: String,
    version: u32,
    predicates: Vec<String>,
    #[serde(default)]
    stats: BTreeMap<String, StatsEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    cooccurrence: Option<BTreeMap<String, BTreeMap<String, f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    tfidf: Option<BTreeMap<String, BTreeMap<String, f64>>>,
    similarity: BTreeMap<String, BTreeMap<String, f64>>,
    #[serde(default)]
    degenerate: Vec<String>,
}
