//! Comparing two clues: case analysis, key-element overlap and transferred information.

mod opposition;

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

pub use opposition::{Opposition, OppositionTable};

use crate::error::{Error, Result};
use crate::kernel::{influence, key_elements, AttributedGraph, Category, InfluencePair, InfluenceReport, KernelConfig, KeyElements};
use crate::mining::PredicateSimilarityModel;
use crate::query::Clue;
use crate::segment::{extract_edge_segment, EdgeParams, EdgeSegment, PathJson, SegmentJson};
use crate::store::KnowledgeGraph;

/// Endpoint pattern of a clue pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum CaseLabel {
    /// No shared endpoints.
    C1,
    /// Same subject and object.
    C2,
    /// Same subject, different predicate and object.
    C3,
    /// Same subject and predicate, different object.
    C4,
    /// Same object, different subject.
    C5,
    /// Object of one is the subject of the other.
    C6,
}

impl fmt::Display for CaseLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

/// Priority C2 > C4 > C3 > C5 > C6 > C1, comparing labels.
pub fn classify(t1: &Clue, t2: &Clue) -> CaseLabel {
    let same_s = t1.subject == t2.subject;
    let same_o = t1.object == t2.object;
    if same_s && same_o {
        CaseLabel::C2
    } else if same_s && t1.predicate == t2.predicate {
        CaseLabel::C4
    } else if same_s {
        CaseLabel::C3
    } else if same_o {
        CaseLabel::C5
    } else if t1.object == t2.subject || t2.object == t1.subject {
        CaseLabel::C6
    } else {
        CaseLabel::C1
    }
}

/// How a key element "belongs to the commonality".
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum Membership {
    /// Present in the other segment's key set.
    #[default]
    KeyElements,
    /// Present anywhere in the other segment.
    Segment,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", default)]
pub struct ReasonParams {
    pub k: usize,
    /// Walk triples in both directions when extracting segments and transfer paths.
    pub bidirectional: bool,
    pub key_fraction: f64,
    pub same_thing_threshold: f64,
    pub transfer_threshold: f64,
    pub type_predicate: String,
    pub membership: Membership,
    pub kernel: KernelConfig,
}

impl Default for ReasonParams {
    fn default() -> Self {
        ReasonParams {
            k: 5,
            bidirectional: true,
            key_fraction: 0.5,
            same_thing_threshold: 0.6,
            transfer_threshold: 0.7,
            type_predicate: "isTypeOf".into(),
            membership: Membership::KeyElements,
            kernel: KernelConfig::default(),
        }
    }
}

impl ReasonParams {
    pub fn edge_params(&self) -> EdgeParams {
        EdgeParams {
            k: self.k,
            bidirectional: self.bidirectional,
            exclude_clue: true,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let unit = |v: f64| (0.0..=1.0).contains(&v);
        if self.k == 0 || !unit(self.same_thing_threshold) || !(self.transfer_threshold >= 0.0) {
            return Err(Error::InvalidParameter(
                "k must be positive and thresholds non-negative (overlap threshold at most 1)".into(),
            ));
        }
        if !(self.key_fraction > 0.0 && self.key_fraction <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "key fraction {} outside (0, 1]",
                self.key_fraction
            )));
        }
        Ok(())
    }
}

/// Per-category overlap; a category with an empty key set on either side is `None`
/// and left out of the mean.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OverlapRate {
    pub attribute: Option<f64>,
    pub node: Option<f64>,
    pub edge: Option<f64>,
    pub mean: f64,
}

impl OverlapRate {
    pub fn get(&self, c: Category) -> Option<f64> {
        match c {
            Category::Attribute => self.attribute,
            Category::Node => self.node,
            Category::Edge => self.edge,
        }
    }
}

fn combine(rates: [Option<f64>; 3]) -> OverlapRate {
    let present: Vec<f64> = rates.iter().flatten().copied().collect();
    let mean = if present.is_empty() {
        0.0
    } else {
        present.iter().sum::<f64>() / present.len() as f64
    };
    OverlapRate {
        attribute: rates[0],
        node: rates[1],
        edge: rates[2],
        mean,
    }
}

/// `|K_a & K_b| / min(|K_a|, |K_b|)` per category, matched by label.
pub fn overlap_rate(k1: &KeyElements, k2: &KeyElements) -> OverlapRate {
    let rate = |c: Category| {
        let (a, b) = (k1.category(c), k2.category(c));
        let denom = a.len().min(b.len());
        if denom == 0 {
            return None;
        }
        let b: BTreeSet<&String> = b.iter().collect();
        Some(a.iter().filter(|x| b.contains(x)).count() as f64 / denom as f64)
    };
    combine(Category::ALL.map(rate))
}

/// Overlap where a key element counts if it occurs anywhere in the other segment.
///
/// The smaller key set of each category is tested against the other side's
/// full element set `all`.
pub fn overlap_rate_against_segments(
    k1: &KeyElements,
    k2: &KeyElements,
    all1: &KeyElements,
    all2: &KeyElements,
) -> OverlapRate {
    let rate = |c: Category| {
        let (a, b) = (k1.category(c), k2.category(c));
        let (small, other) = if a.len() <= b.len() { (a, all2) } else { (b, all1) };
        if small.is_empty() || a.is_empty() || b.is_empty() {
            return None;
        }
        let other: BTreeSet<&String> = other.category(c).iter().collect();
        Some(small.iter().filter(|x| other.contains(x)).count() as f64 / small.len() as f64)
    };
    combine(Category::ALL.map(rate))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TransferVerdict {
    Subsumes,
    Disjoint,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct TransferResult {
    pub from: String,
    pub to: String,
    pub forward: f64,
    pub backward: f64,
    pub threshold: f64,
    pub verdict: TransferVerdict,
    /// Best path in each direction, when one exists.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub forward_path: Option<PathJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub backward_path: Option<PathJson>,
}

impl TransferResult {
    pub fn subsumes(&self) -> bool {
        self.verdict == TransferVerdict::Subsumes
    }
}

/// Largest product of `Sim(typePredicate, edge)` over the `k` cheapest paths.
///
/// `from == to` is 1, no path is 0. The type-predicate triple itself stays usable.
pub fn information_transfer(
    graph: &KnowledgeGraph,
    model: &PredicateSimilarityModel,
    from: &str,
    to: &str,
    type_predicate: &str,
    k: usize,
    bidirectional: bool,
) -> Result<(f64, Option<PathJson>)> {
    let params = EdgeParams {
        k,
        bidirectional,
        exclude_clue: false,
    };
    let clue = Clue::new(from, type_predicate, to);
    let (arcs, s, o, paths) = crate::segment::clue_paths(graph, model, &clue, &params)?;
    if s == o {
        return Ok((1.0, paths.first().map(|p| PathJson::new(graph, p))));
    }
    let mut best: Option<(f64, usize)> = None;
    for (i, path) in paths.iter().enumerate() {
        let value = path.hops.iter().fold(1.0, |acc, h| acc * arcs.sim(h.predicate));
        if best.is_none_or(|(b, _)| value > b) {
            best = Some((value, i));
        }
    }
    Ok(match best {
        Some((v, i)) => (v, Some(PathJson::new(graph, &paths[i]))),
        None => (0.0, None),
    })
}

/// Both transfer directions and the threshold decision `max(forward, backward) > T`.
pub fn transferred_information(
    graph: &KnowledgeGraph,
    model: &PredicateSimilarityModel,
    from: &str,
    to: &str,
    params: &ReasonParams,
) -> Result<TransferResult> {
    let tp = &params.type_predicate;
    let (forward, forward_path) = information_transfer(graph, model, from, to, tp, params.k, params.bidirectional)?;
    let (backward, backward_path) = information_transfer(graph, model, to, from, tp, params.k, params.bidirectional)?;
    let verdict = if forward.max(backward) > params.transfer_threshold {
        TransferVerdict::Subsumes
    } else {
        TransferVerdict::Disjoint
    };
    Ok(TransferResult {
        from: from.to_owned(),
        to: to.to_owned(),
        forward,
        backward,
        threshold: params.transfer_threshold,
        verdict,
        forward_path,
        backward_path,
    })
}

/// Shared nodes and edges of the clues and of their segments.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Commonality {
    pub clue_nodes: Vec<String>,
    pub segment_nodes: Vec<String>,
    pub segment_edges: Vec<String>,
}

fn clue_commonality(t1: &Clue, t2: &Clue) -> Vec<String> {
    let a: BTreeSet<&String> = [&t1.subject, &t1.object].into_iter().collect();
    let b: BTreeSet<&String> = [&t2.subject, &t2.object].into_iter().collect();
    a.intersection(&b).map(|s| (*s).clone()).collect()
}

/// Shared node labels and `<s, p, o>` edge labels of two segments.
pub fn segment_commonality(g1: &AttributedGraph, g2: &AttributedGraph) -> (Vec<String>, Vec<String>) {
    let nodes1: BTreeSet<&String> = g1.labels.iter().collect();
    let nodes = g2
        .labels
        .iter()
        .filter(|l| nodes1.contains(l))
        .collect::<BTreeSet<_>>()
        .into_iter()
        .cloned()
        .collect();
    let edges1: BTreeSet<String> = g1.edges.iter().map(|e| e.key()).collect();
    let edges = g2
        .edges
        .iter()
        .map(|e| e.key())
        .filter(|k| edges1.contains(k))
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    (nodes, edges)
}

/// Kernel influence of two segments, their key elements and overlap.
#[derive(Debug, Clone)]
pub struct KeyComparison {
    pub influence: InfluencePair,
    pub keys: [KeyElements; 2],
    pub overlap: OverlapRate,
}

pub fn compare_segments(g1: &AttributedGraph, g2: &AttributedGraph, params: &ReasonParams) -> Result<KeyComparison> {
    let pair = influence(g1, g2, &params.kernel)?;
    let keys = [
        key_elements(&pair.reports[0], params.key_fraction)?,
        key_elements(&pair.reports[1], params.key_fraction)?,
    ];
    let overlap = overlap_for(&pair.reports, &keys, params)?;
    Ok(KeyComparison {
        influence: pair,
        keys,
        overlap,
    })
}

pub(crate) fn overlap_for(reports: &[InfluenceReport; 2], keys: &[KeyElements; 2], params: &ReasonParams) -> Result<OverlapRate> {
    Ok(match params.membership {
        Membership::KeyElements => overlap_rate(&keys[0], &keys[1]),
        Membership::Segment => {
            let all1 = key_elements(&reports[0], 1.0)?;
            let all2 = key_elements(&reports[1], 1.0)?;
            overlap_rate_against_segments(&keys[0], &keys[1], &all1, &all2)
        }
    })
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct PairEvidence {
    pub segments: [SegmentJson; 2],
    pub similarity: f64,
    pub decay: f64,
    pub influence: [InfluenceReport; 2],
    pub key_elements: [KeyElements; 2],
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct PairwiseVerdict {
    pub case: CaseLabel,
    pub clues: [Clue; 2],
    pub commonality: Commonality,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub overlap_rate: Option<OverlapRate>,
    pub same_thing: bool,
    /// `None` when no consistency check applies.
    pub consistent: Option<bool>,
    pub inconsistent: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub opposition: Option<Opposition>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub transfer: Option<TransferResult>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub evidence: Option<PairEvidence>,
}

impl PairwiseVerdict {
    fn new(case: CaseLabel, t1: &Clue, t2: &Clue) -> Self {
        PairwiseVerdict {
            case,
            clues: [t1.clone(), t2.clone()],
            commonality: Commonality {
                clue_nodes: clue_commonality(t1, t2),
                ..Default::default()
            },
            overlap_rate: None,
            same_thing: false,
            consistent: None,
            inconsistent: false,
            opposition: None,
            transfer: None,
            evidence: None,
        }
    }
}

fn resolve_clue(graph: &KnowledgeGraph, model: &PredicateSimilarityModel, clue: &Clue) -> Result<()> {
    graph.entity(&clue.subject)?;
    graph.entity(&clue.object)?;
    if !model.contains(&clue.predicate) {
        return Err(Error::UnknownPredicate(clue.predicate.clone()));
    }
    Ok(())
}

/// Full pairwise procedure.
///
/// C1, C5 and C6 need no check; C2 consults `opposites`; C3 and C4 compare
/// key elements of the two edge segments and, when they describe the same
/// thing, test whether one object subsumes the other.
pub fn reason_pair(
    graph: &KnowledgeGraph,
    model: &PredicateSimilarityModel,
    t1: &Clue,
    t2: &Clue,
    opposites: &OppositionTable,
    params: &ReasonParams,
) -> Result<PairwiseVerdict> {
    params.validate()?;
    resolve_clue(graph, model, t1)?;
    resolve_clue(graph, model, t2)?;
    let case = classify(t1, t2);
    let mut verdict = PairwiseVerdict::new(case, t1, t2);
    match case {
        CaseLabel::C1 | CaseLabel::C5 | CaseLabel::C6 => return Ok(verdict),
        CaseLabel::C2 => {
            let o = opposites.check(&t1.predicate, &t2.predicate);
            verdict.opposition = Some(o);
            match o {
                Opposition::Consistent => {
                    verdict.same_thing = true;
                    verdict.consistent = Some(true);
                }
                Opposition::Inconsistent => {
                    verdict.same_thing = true;
                    verdict.consistent = Some(false);
                    verdict.inconsistent = true;
                }
                Opposition::Unrelated => {}
            }
            return Ok(verdict);
        }
        CaseLabel::C3 | CaseLabel::C4 => {}
    }

    let edge = params.edge_params();
    let seg1 = extract_edge_segment(graph, model, t1, &edge)?;
    let seg2 = extract_edge_segment(graph, model, t2, &edge).map_err(|e| {
        e.with_evidence(serde_json::json!({
            "case": case,
            "segments": [SegmentJson::from_edge_segment(graph, &seg1)],
        }))
    })?;
    let (g1, g2) = attributed(graph, &seg1, &seg2, &params.kernel);
    let cmp = compare_segments(&g1, &g2, params)?;
    let (nodes, edges) = segment_commonality(&g1, &g2);
    verdict.commonality.segment_nodes = nodes;
    verdict.commonality.segment_edges = edges;
    verdict.overlap_rate = Some(cmp.overlap);
    verdict.same_thing = cmp.overlap.mean >= params.same_thing_threshold;
    if verdict.same_thing {
        let transfer = transferred_information(graph, model, &t1.object, &t2.object, params)?;
        verdict.consistent = Some(transfer.subsumes());
        verdict.inconsistent = !transfer.subsumes();
        verdict.transfer = Some(transfer);
    }
    let [r1, r2] = cmp.influence.reports;
    verdict.evidence = Some(PairEvidence {
        segments: [
            SegmentJson::from_edge_segment(graph, &seg1),
            SegmentJson::from_edge_segment(graph, &seg2),
        ],
        similarity: cmp.influence.similarity,
        decay: cmp.influence.decay,
        influence: [r1, r2],
        key_elements: cmp.keys,
    });
    Ok(verdict)
}

pub(crate) fn attributed(
    graph: &KnowledgeGraph,
    s1: &EdgeSegment,
    s2: &EdgeSegment,
    kernel: &KernelConfig,
) -> (AttributedGraph, AttributedGraph) {
    (
        AttributedGraph::from_segment(graph, &s1.segment, kernel.symmetrize),
        AttributedGraph::from_segment(graph, &s2.segment, kernel.symmetrize),
    )
}
