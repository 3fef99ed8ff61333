//! Reasoning over a whole query graph through its line graph.
//!
//! `H1(n,k)` is the similarity of the predicates of query edges `n` and `k`,
//! `H2(n,k)` the normalized kernel `K(n,k) / sqrt(K(n,n) K(k,k))` of their
//! segments, both only where the query edges share an endpoint. Element
//! influence is the derivative of `||H1 - H2||_F^2`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::{
    combine_reports, decay_bound, default_decay, influence, key_elements, kernel_similarity, AttributedGraph,
    InfluenceReport, KernelConfig, KeyElements,
};
use crate::mining::{PredicateSimilarityModel, SquareMatrix};
use crate::pairwise::{compare_segments, overlap_rate, transferred_information, OverlapRate, ReasonParams, TransferResult};
use crate::query::{Clue, QueryGraph};
use crate::segment::{extract_subgraph_segment, SegmentJson};
use crate::store::KnowledgeGraph;

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct LineGraphPair {
    /// Line-graph edges `(n, k)`, `n < k`.
    pub adjacent: Vec<(usize, usize)>,
    #[serde(serialize_with = "rows")]
    pub h1: SquareMatrix,
    #[serde(serialize_with = "rows")]
    pub h2: SquareMatrix,
    /// Decay used for each adjacent pair, in `adjacent` order.
    pub decays: Vec<f64>,
    pub loss: f64,
}

fn rows<S: serde::Serializer>(m: &SquareMatrix, s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(m.dim()))?;
    for i in 0..m.dim() {
        seq.serialize_element(m.row(i))?;
    }
    seq.end()
}

/// Squared Frobenius distance over the full matrices.
pub fn frobenius_loss(h1: &SquareMatrix, h2: &SquareMatrix) -> f64 {
    let n = h1.dim();
    (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .map(|(i, j)| (h1.get(i, j) - h2.get(i, j)).powi(2))
        .sum()
}

fn line_edges(query: &QueryGraph) -> Vec<(usize, usize)> {
    let m = query.edges.len();
    let mut out = Vec::new();
    for n in 0..m {
        for k in n + 1..m {
            if query.edges_adjacent(n, k) {
                out.push((n, k));
            }
        }
    }
    out
}

/// Decay shared by `K(n,k)`, `K(n,n)` and `K(k,k)`.
fn pair_decay(a: &AttributedGraph, b: &AttributedGraph, cfg: &KernelConfig) -> Result<f64> {
    if let Some(c) = cfg.decay {
        return Ok(c);
    }
    let ub = decay_bound(a, b, cfg)?
        .max(decay_bound(a, a, cfg)?)
        .max(decay_bound(b, b, cfg)?);
    Ok(default_decay(ub))
}

fn segments_for<'a>(query: &QueryGraph, segments: &'a [Option<AttributedGraph>]) -> Result<Vec<&'a AttributedGraph>> {
    (0..query.edges.len())
        .map(|i| {
            segments
                .get(i)
                .and_then(Option::as_ref)
                .ok_or(Error::MissingSegment(i))
        })
        .collect()
}

/// Builds `H1`, `H2` and the loss.
pub fn build_line_graphs(
    query: &QueryGraph,
    segments: &[Option<AttributedGraph>],
    model: &PredicateSimilarityModel,
    cfg: &KernelConfig,
) -> Result<LineGraphPair> {
    let segs = segments_for(query, segments)?;
    let m = query.edges.len();
    let mut h1 = SquareMatrix::zeros(m);
    let mut h2 = SquareMatrix::zeros(m);
    let adjacent = line_edges(query);
    let mut decays = Vec::with_capacity(adjacent.len());
    for &(n, k) in &adjacent {
        let (pn, pk) = (&query.edges[n].predicate, &query.edges[k].predicate);
        let s = model
            .similarity(pn, pk)
            .ok_or_else(|| Error::UnknownPredicate(if model.contains(pn) { pk.clone() } else { pn.clone() }))?;
        h1.set(n, k, s);
        h1.set(k, n, s);
        let c = pair_decay(segs[n], segs[k], cfg)?;
        let fixed = cfg.with_decay(c);
        let knk = kernel_similarity(segs[n], segs[k], &fixed)?.similarity;
        let knn = kernel_similarity(segs[n], segs[n], &fixed)?.similarity;
        let kkk = kernel_similarity(segs[k], segs[k], &fixed)?.similarity;
        let v = normalized(knk, knn, kkk);
        h2.set(n, k, v);
        h2.set(k, n, v);
        decays.push(c);
    }
    let loss = frobenius_loss(&h1, &h2);
    Ok(LineGraphPair {
        adjacent,
        h1,
        h2,
        decays,
        loss,
    })
}

fn normalized(knk: f64, knn: f64, kkk: f64) -> f64 {
    let d = (knn * kkk).sqrt();
    if d > 0.0 {
        knk / d
    } else {
        0.0
    }
}

/// `dLoss/de` for every element of every segment.
///
/// Each line-graph edge contributes through both symmetric entries, so the
/// value is `sum_k -4 (H1 - H2)(n,k) dH2(n,k)/de`.
pub fn collective_influence(
    query: &QueryGraph,
    lines: &LineGraphPair,
    segments: &[Option<AttributedGraph>],
    cfg: &KernelConfig,
) -> Result<Vec<InfluenceReport>> {
    let segs = segments_for(query, segments)?;
    // per segment: (coefficient, report) terms of the chain rule
    let mut terms: Vec<Vec<(f64, InfluenceReport)>> = vec![Vec::new(); segs.len()];
    for (&(n, k), &c) in lines.adjacent.iter().zip(&lines.decays) {
        let fixed = cfg.with_decay(c);
        let residual = lines.h1.get(n, k) - lines.h2.get(n, k);
        if residual == 0.0 {
            continue;
        }
        let pair = influence(segs[n], segs[k], &fixed)?;
        let self_n = influence(segs[n], segs[n], &fixed)?;
        let self_k = influence(segs[k], segs[k], &fixed)?;
        let (knk, knn, kkk) = (pair.similarity, self_n.similarity, self_k.similarity);
        let d = (knn * kkk).sqrt();
        if d == 0.0 {
            continue;
        }
        let h = knk / d;
        let outer = -4.0 * residual;
        // dH/dx = dKnk/d - h/2 * dKnn/Knn for elements of n (mirror for k)
        let [pn, pk] = pair.reports;
        let [sn0, sn1] = self_n.reports;
        let [sk0, sk1] = self_k.reports;
        terms[n].push((outer / d, pn));
        terms[n].push((-outer * h / (2.0 * knn), sn0));
        terms[n].push((-outer * h / (2.0 * knn), sn1));
        terms[k].push((outer / d, pk));
        terms[k].push((-outer * h / (2.0 * kkk), sk0));
        terms[k].push((-outer * h / (2.0 * kkk), sk1));
    }
    Ok(segs
        .iter()
        .zip(&terms)
        .map(|(g, t)| {
            let refs: Vec<(f64, &InfluenceReport)> = t.iter().map(|(c, r)| (*c, r)).collect();
            combine_reports(g, &refs, cfg.symmetrize)
        })
        .collect())
}

/// Which influence ranks the key elements compared between two segments.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum OverlapSource {
    /// Keys from the kernel influence of the two segments alone.
    #[default]
    Pair,
    /// Keys from the derivative of the line-graph loss.
    Loss,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", default)]
pub struct CollectiveParams {
    #[serde(flatten)]
    pub reason: ReasonParams,
    pub overlap_source: OverlapSource,
    /// Stop at the first inconsistent pair.
    pub early_exit: bool,
}

impl Default for CollectiveParams {
    fn default() -> Self {
        CollectiveParams {
            reason: ReasonParams::default(),
            overlap_source: OverlapSource::Pair,
            early_exit: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum PairStatus {
    /// Overlap below the threshold.
    Unrelated,
    /// Subjects do not subsume each other.
    Skipped,
    Consistent,
    Inconsistent,
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct PairCheck {
    pub edges: (usize, usize),
    pub overlap: OverlapRate,
    /// Overlap from the other influence source, for comparison.
    pub alternate_overlap: Option<OverlapRate>,
    pub status: PairStatus,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub subject_transfer: Option<TransferResult>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub object_transfer: Option<TransferResult>,
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct CollectiveEvidence {
    pub segments: Vec<SegmentJson>,
    pub merged: SegmentJson,
    pub influence: Vec<InfluenceReport>,
    pub key_elements: Vec<KeyElements>,
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct CollectiveVerdict {
    pub clues: Vec<Clue>,
    pub pairs: Vec<PairCheck>,
    pub inconsistent: bool,
    pub line_graphs: LineGraphPair,
    pub evidence: CollectiveEvidence,
}

impl CollectiveVerdict {
    pub fn pair(&self, n: usize, k: usize) -> Option<&PairCheck> {
        self.pairs.iter().find(|p| p.edges == (n, k))
    }
}

/// Full collective procedure over every pair of query edges.
pub fn reason_collective(
    graph: &KnowledgeGraph,
    model: &PredicateSimilarityModel,
    query: &QueryGraph,
    params: &CollectiveParams,
) -> Result<CollectiveVerdict> {
    let rp = &params.reason;
    rp.validate()?;
    query.validate()?;
    if query.edges.len() < 2 {
        return Err(Error::InvalidQuery("collective reasoning needs at least two query edges".into()));
    }
    let sub = extract_subgraph_segment(graph, model, query, &rp.edge_params())?;
    let partial = || {
        serde_json::json!({
            "segments": sub.edges.iter().map(|e| e.segment.as_ref().map(|s| SegmentJson::from_edge_segment(graph, s))).collect::<Vec<_>>(),
        })
    };
    if let Some(missing) = sub.edges.iter().find(|e| !e.is_ok()) {
        return Err(Error::NoPath {
            from: missing.clue.subject.clone(),
            to: missing.clue.object.clone(),
        }
        .with_evidence(partial()));
    }
    let edge_segments = sub.segments()?;
    let graphs: Vec<Option<AttributedGraph>> = edge_segments
        .iter()
        .map(|s| Some(AttributedGraph::from_segment(graph, &s.segment, rp.kernel.symmetrize)))
        .collect();
    let lines = build_line_graphs(query, &graphs, model, &rp.kernel)?;
    let reports = collective_influence(query, &lines, &graphs, &rp.kernel)?;
    let keys = reports
        .iter()
        .map(|r| key_elements(r, rp.key_fraction))
        .collect::<Result<Vec<_>>>()?;

    let clues = query.clues();
    let mut pairs = Vec::new();
    let mut inconsistent = false;
    'outer: for n in 0..clues.len() {
        for k in n + 1..clues.len() {
            let loss_overlap = overlap_rate(&keys[n], &keys[k]);
            let g = |i: usize| graphs[i].as_ref().expect("all segments present");
            let pair_overlap = compare_segments(g(n), g(k), rp)?.overlap;
            let (overlap, alternate) = match params.overlap_source {
                crate::collective::OverlapSource::Loss => (loss_overlap, pair_overlap),
                crate::collective::OverlapSource::Pair => (pair_overlap, loss_overlap),
            };
            let mut check = PairCheck {
                edges: (n, k),
                overlap,
                alternate_overlap: Some(alternate),
                status: PairStatus::Unrelated,
                subject_transfer: None,
                object_transfer: None,
            };
            if overlap.mean >= rp.same_thing_threshold {
                let subj = transferred_information(graph, model, &clues[n].subject, &clues[k].subject, rp)?;
                if !subj.subsumes() {
                    check.status = PairStatus::Skipped;
                } else {
                    let obj = transferred_information(graph, model, &clues[n].object, &clues[k].object, rp)?;
                    check.status = if obj.subsumes() {
                        PairStatus::Consistent
                    } else {
                        PairStatus::Inconsistent
                    };
                    check.object_transfer = Some(obj);
                }
                check.subject_transfer = Some(subj);
            }
            let bad = check.status == PairStatus::Inconsistent;
            inconsistent |= bad;
            pairs.push(check);
            if bad && params.early_exit {
                break 'outer;
            }
        }
    }
    Ok(CollectiveVerdict {
        clues,
        pairs,
        inconsistent,
        line_graphs: lines,
        evidence: CollectiveEvidence {
            segments: edge_segments
                .iter()
                .map(|s| SegmentJson::from_edge_segment(graph, s))
                .collect(),
            merged: SegmentJson::new(graph, &sub.merged),
            influence: reports,
            key_elements: keys,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path(labels: &[&str]) -> AttributedGraph {
        let mut g = AttributedGraph::with_nodes(labels);
        for i in 1..labels.len() {
            g.add_edge(i - 1, "p", i, true);
        }
        g
    }

    fn model() -> PredicateSimilarityModel {
        PredicateSimilarityModel::pinned(&["p", "q", "r"], &[("p", "q", 0.4), ("q", "r", 0.3)]).unwrap()
    }

    #[test]
    fn two_edge_closed_form() {
        let q = QueryGraph::from_clues(&[Clue::new("a", "p", "b"), Clue::new("b", "q", "c")]);
        let segs = vec![Some(path(&["a", "x", "b"])), Some(path(&["b", "c"]))];
        let cfg = KernelConfig::default();
        let lines = build_line_graphs(&q, &segs, &model(), &cfg).unwrap();
        assert_eq!(lines.adjacent, vec![(0, 1)]);
        let h2 = lines.h2.get(0, 1);
        assert!(h2 > 0.0 && h2 <= 1.0 + 1e-12);
        assert!((lines.loss - 2.0 * (0.4 - h2).powi(2)).abs() < 1e-15);
        assert!(lines.h1.is_symmetric(0.0) && lines.h2.is_symmetric(0.0));
    }

    #[test]
    fn equal_matrices_have_zero_loss() {
        let mut h = SquareMatrix::zeros(3);
        h.set(0, 1, 0.5);
        h.set(1, 0, 0.5);
        assert_eq!(frobenius_loss(&h, &h), 0.0);
    }

    #[test]
    fn isolated_line_node_has_zero_influence() {
        let q = QueryGraph::from_clues(&[
            Clue::new("a", "p", "b"),
            Clue::new("b", "q", "c"),
            Clue::new("d", "r", "e"),
        ]);
        let segs = vec![
            Some(path(&["a", "x", "b"])),
            Some(path(&["b", "c"])),
            Some(path(&["d", "a", "e"])),
        ];
        let cfg = KernelConfig::default();
        let lines = build_line_graphs(&q, &segs, &model(), &cfg).unwrap();
        let reports = collective_influence(&q, &lines, &segs, &cfg).unwrap();
        assert!(reports[2]
            .nodes
            .iter()
            .chain(&reports[2].edges)
            .chain(&reports[2].attributes)
            .all(|e| e.value == 0.0));
        assert!(reports[0].edges.iter().any(|e| e.value != 0.0));
    }

    #[test]
    fn missing_segment() {
        let q = QueryGraph::from_clues(&[Clue::new("a", "p", "b"), Clue::new("b", "q", "c")]);
        let segs = vec![Some(path(&["a", "b"])), None];
        assert!(matches!(
            build_line_graphs(&q, &segs, &model(), &KernelConfig::default()),
            Err(Error::MissingSegment(1))
        ));
    }
}
