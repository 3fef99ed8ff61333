//! Wire form of segments: labels resolved, ids are graph entity ids.

use serde::{Deserialize, Serialize};

use super::{EdgeSegment, KnowledgeSegment, NodeSegment, Path, Provenance, SubgraphSegment};
use crate::query::Clue;
use crate::store::KnowledgeGraph;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeJson {
    pub id: u32,
    pub label: String,
    /// One-hot identity attribute plus any extra attribute labels.
    pub attrs: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct EdgeJson {
    pub src: u32,
    pub pred: String,
    pub dst: u32,
    pub weight: f64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub query_edges: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathJson {
    pub nodes: Vec<String>,
    pub predicates: Vec<String>,
    pub cost: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SegmentJson {
    pub nodes: Vec<NodeJson>,
    pub edges: Vec<EdgeJson>,
    pub provenance: Provenance,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub paths: Vec<PathJson>,
    #[serde(default)]
    pub empty: bool,
}

impl PathJson {
    pub fn new(graph: &KnowledgeGraph, path: &Path) -> Self {
        PathJson {
            nodes: path.nodes.iter().map(|&n| graph.entity_label(n).to_owned()).collect(),
            predicates: path
                .hops
                .iter()
                .map(|h| graph.predicate_label(h.predicate).to_owned())
                .collect(),
            cost: path.cost,
        }
    }
}

impl SegmentJson {
    pub fn new(graph: &KnowledgeGraph, segment: &KnowledgeSegment) -> Self {
        let nodes = segment
            .nodes
            .iter()
            .map(|&n| {
                let label = graph.entity_label(n).to_owned();
                let mut attrs = vec![label.clone()];
                attrs.extend(graph.entity_types(n).iter().cloned());
                NodeJson { id: n.0, attrs, label }
            })
            .collect();
        let edges = segment
            .edges
            .iter()
            .map(|e| EdgeJson {
                src: segment.nodes[e.src].0,
                pred: graph.predicate_label(e.predicate).to_owned(),
                dst: segment.nodes[e.dst].0,
                weight: e.weight,
                query_edges: e.query_edges.clone(),
            })
            .collect();
        SegmentJson {
            nodes,
            edges,
            provenance: segment.provenance.clone(),
            paths: Vec::new(),
            empty: segment.empty,
        }
    }

    pub fn from_edge_segment(graph: &KnowledgeGraph, seg: &EdgeSegment) -> Self {
        let mut json = SegmentJson::new(graph, &seg.segment);
        json.paths = seg.paths.iter().map(|p| PathJson::new(graph, p)).collect();
        json
    }

    /// Triples as label tuples.
    pub fn triples(&self) -> Vec<(String, String, String)> {
        let label = |id: u32| {
            self.nodes
                .iter()
                .find(|n| n.id == id)
                .map(|n| n.label.clone())
                .unwrap_or_default()
        };
        self.edges
            .iter()
            .map(|e| (label(e.src), e.pred.clone(), label(e.dst)))
            .collect()
    }
}

/// Node segment with the diagnostics of its PageRank-Nibble run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct NodeSegmentJson {
    pub segment: SegmentJson,
    /// `null` when the seed is isolated.
    pub conductance: Option<f64>,
    pub pushes: usize,
    pub max_scaled_residual: f64,
}

impl NodeSegmentJson {
    pub fn new(graph: &KnowledgeGraph, seg: &NodeSegment) -> Self {
        NodeSegmentJson {
            segment: SegmentJson::new(graph, &seg.segment),
            conductance: seg.conductance.is_finite().then_some(seg.conductance),
            pushes: seg.pushes,
            max_scaled_residual: seg.max_scaled_residual,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeOutcomeJson {
    pub edge: usize,
    pub clue: Clue,
    /// `null` when no path connects the endpoints.
    pub segment: Option<SegmentJson>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SubgraphJson {
    pub edges: Vec<EdgeOutcomeJson>,
    pub merged: SegmentJson,
    pub all_found: bool,
}

impl SubgraphJson {
    pub fn new(graph: &KnowledgeGraph, seg: &SubgraphSegment) -> Self {
        SubgraphJson {
            edges: seg
                .edges
                .iter()
                .map(|e| EdgeOutcomeJson {
                    edge: e.edge,
                    clue: e.clue.clone(),
                    segment: e.segment.as_ref().map(|s| SegmentJson::from_edge_segment(graph, s)),
                })
                .collect(),
            merged: SegmentJson::new(graph, &seg.merged),
            all_found: seg.all_found(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mining::PredicateSimilarityModel;
    use crate::query::Clue;
    use crate::segment::{extract_edge_segment, EdgeParams};

    #[test]
    fn edge_segment_round_trip() {
        let g = KnowledgeGraph::from_triples([("a", "p", "b"), ("b", "p", "c")]);
        let m = PredicateSimilarityModel::pinned(&["p", "q"], &[("q", "p", 0.5)]).unwrap();
        let seg = extract_edge_segment(&g, &m, &Clue::new("a", "q", "c"), &EdgeParams::default()).unwrap();
        let json = SegmentJson::from_edge_segment(&g, &seg);
        assert_eq!(json.paths.len(), 1);
        assert_eq!(json.paths[0].nodes, ["a", "b", "c"]);
        assert_eq!(json.paths[0].cost, 4.0);
        assert_eq!(
            json.triples(),
            vec![
                ("a".into(), "p".into(), "b".into()),
                ("b".into(), "p".into(), "c".into())
            ]
        );
        let text = serde_json::to_string(&json).unwrap();
        let back: SegmentJson = serde_json::from_str(&text).unwrap();
        assert_eq!(back, json);
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["provenance"]["kind"], "edge");
        assert_eq!(v["nodes"][0]["attrs"][0], "a");
    }

    #[test]
    fn types_show_up_as_attrs() {
        let mut g = KnowledgeGraph::from_triples([("a", "p", "b")]);
        g.read_types("a\tCity\n".as_bytes()).unwrap();
        let m = PredicateSimilarityModel::pinned(&["p", "q"], &[("q", "p", 0.5)]).unwrap();
        let seg = extract_edge_segment(&g, &m, &Clue::new("a", "q", "b"), &EdgeParams::default()).unwrap();
        let json = SegmentJson::new(&g, &seg.segment);
        assert_eq!(json.nodes[0].attrs, ["a", "City"]);
        assert_eq!(json.nodes[1].attrs, ["b"]);
    }
}
