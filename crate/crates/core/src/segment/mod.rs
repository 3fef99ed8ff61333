//! Knowledge segments: small connection subgraphs that summarize a clue.
//!
//! * [`extract_node_segment`]: local cluster around an entity (PageRank-Nibble
//!   on the entropy-weighted graph).
//! * [`extract_edge_segment`]: union of the k cheapest simple paths between
//!   the endpoints of a triple, edge cost = 1 / predicate similarity.
//! * [`extract_subgraph_segment`]: one edge segment per query edge, merged.

mod extract;
mod json;
mod nibble;
mod paths;

use std::collections::{BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::query::Clue;
use crate::store::{EntityId, KnowledgeGraph, PredicateId, Triple};

pub use extract::{
    extract_edge_segment, extract_subgraph_segment, EdgeOutcome, EdgeParams, EdgeSegment,
    SubgraphSegment,
};
pub use json::{EdgeJson, EdgeOutcomeJson, NodeJson, NodeSegmentJson, PathJson, SegmentJson, SubgraphJson};
pub use nibble::{
    approximate_ppr, extract_node_segment, sweep_cut, NibbleParams, NodeSegment, PprVector,
    Sweep, WeightedView,
};
pub use paths::{k_shortest_paths, Arc, ArcSource, Hop, Path};
pub(crate) use extract::clue_paths;

/// What a segment was extracted for.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Provenance {
    Node { seed: String },
    Edge { clue: Clue },
    Subgraph { clues: Vec<Clue> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SegmentEdge {
    /// Local node index of the triple's subject.
    pub src: usize,
    /// Local node index of the triple's object.
    pub dst: usize,
    pub predicate: PredicateId,
    pub weight: f64,
    /// Query edges this triple was extracted for (merged segments only).
    pub query_edges: Vec<usize>,
}

/// A connection subgraph of the knowledge graph.
///
/// Node attributes are one-hot entity identities, so node `j`'s attribute is
/// the entity `nodes[j]` itself, plus any types the graph attaches to it.
#[derive(Debug, Clone, PartialEq)]
pub struct KnowledgeSegment {
    pub nodes: Vec<EntityId>,
    pub edges: Vec<SegmentEdge>,
    pub provenance: Provenance,
    /// Set when extraction found nothing beyond the seed.
    pub empty: bool,
}

impl KnowledgeSegment {
    pub fn new(provenance: Provenance) -> Self {
        KnowledgeSegment {
            nodes: Vec::new(),
            edges: Vec::new(),
            provenance,
            empty: false,
        }
    }

    /// Segment induced on `nodes`: every graph triple with both ends in the set.
    pub fn induced(
        graph: &KnowledgeGraph,
        nodes: Vec<EntityId>,
        weight: impl Fn(PredicateId) -> f64,
        provenance: Provenance,
    ) -> Self {
        let local: HashMap<EntityId, usize> =
            nodes.iter().enumerate().map(|(i, &e)| (e, i)).collect();
        let mut edges = Vec::new();
        for (i, &v) in nodes.iter().enumerate() {
            for &(p, o) in graph.out_edges(v) {
                if let Some(&j) = local.get(&o) {
                    edges.push(SegmentEdge {
                        src: i,
                        dst: j,
                        predicate: p,
                        weight: weight(p),
                        query_edges: Vec::new(),
                    });
                }
            }
        }
        KnowledgeSegment {
            nodes,
            edges,
            provenance,
            empty: false,
        }
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn node_index(&self, e: EntityId) -> Option<usize> {
        self.nodes.iter().position(|&n| n == e)
    }

    pub fn contains_node(&self, e: EntityId) -> bool {
        self.node_index(e).is_some()
    }

    pub fn triple(&self, edge: &SegmentEdge) -> Triple {
        Triple::new(self.nodes[edge.src], edge.predicate, self.nodes[edge.dst])
    }

    pub fn triples(&self) -> Vec<Triple> {
        self.edges.iter().map(|e| self.triple(e)).collect()
    }

    pub fn contains_triple(&self, t: &Triple) -> bool {
        self.edges.iter().any(|e| self.triple(e) == *t)
    }

    /// Adds a node if absent and returns its local index.
    pub fn add_node(&mut self, e: EntityId) -> usize {
        match self.node_index(e) {
            Some(i) => i,
            None => {
                self.nodes.push(e);
                self.nodes.len() - 1
            }
        }
    }

    /// Adds a triple if absent (nodes are added as needed); returns the edge index.
    pub fn add_triple(&mut self, t: Triple, weight: f64) -> usize {
        let src = self.add_node(t.subject);
        let dst = self.add_node(t.object);
        if let Some(i) = self
            .edges
            .iter()
            .position(|e| e.src == src && e.dst == dst && e.predicate == t.predicate)
        {
            return i;
        }
        self.edges.push(SegmentEdge {
            src,
            dst,
            predicate: t.predicate,
            weight,
            query_edges: Vec::new(),
        });
        self.edges.len() - 1
    }

    /// Undirected connectivity over all segment nodes.
    pub fn is_connected(&self) -> bool {
        let n = self.nodes.len();
        if n <= 1 {
            return true;
        }
        let mut adj = vec![Vec::new(); n];
        for e in &self.edges {
            adj[e.src].push(e.dst);
            adj[e.dst].push(e.src);
        }
        let mut seen = vec![false; n];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for &u in &adj[v] {
                if !seen[u] {
                    seen[u] = true;
                    stack.push(u);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    /// Distinct entity set.
    pub fn entity_set(&self) -> BTreeSet<EntityId> {
        self.nodes.iter().copied().collect()
    }
}
