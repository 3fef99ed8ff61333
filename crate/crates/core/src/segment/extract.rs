//! Edge- and subgraph-specific segments from k cheapest simple paths.

use serde::{Deserialize, Serialize};

use super::paths::{k_shortest_paths, Arc, ArcSource, Hop, Path};
use super::{KnowledgeSegment, Provenance};
use crate::error::{Error, Result};
use crate::mining::PredicateSimilarityModel;
use crate::query::{Clue, QueryGraph};
use crate::store::{EntityId, KnowledgeGraph, PredicateId, Triple};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", default)]
pub struct EdgeParams {
    pub k: usize,
    /// Also walk triples object -> subject at the same cost.
    pub bidirectional: bool,
    /// Keep the clue triple itself out of the paths.
    pub exclude_clue: bool,
}

impl Default for EdgeParams {
    fn default() -> Self {
        EdgeParams {
            k: 5,
            bidirectional: false,
            exclude_clue: true,
        }
    }
}

/// The graph seen through one query predicate: arc cost = 1 / Sim(query, edge).
/// Edges with zero similarity cannot be traversed.
pub(crate) struct SimilarityArcs<'g> {
    graph: &'g KnowledgeGraph,
    /// Similarity to the query predicate, by graph predicate id.
    sims: Vec<f64>,
    bidirectional: bool,
    excluded: Option<Triple>,
}

impl<'g> SimilarityArcs<'g> {
    pub(crate) fn new(
        graph: &'g KnowledgeGraph,
        model: &PredicateSimilarityModel,
        query_predicate: &str,
        bidirectional: bool,
    ) -> Result<Self> {
        let q = model
            .index_of(query_predicate)
            .ok_or_else(|| Error::UnknownPredicate(query_predicate.to_owned()))?;
        let sims = graph
            .predicates()
            .labels()
            .iter()
            .map(|l| model.index_of(l).map_or(0.0, |j| model.sim(q, j)))
            .collect();
        Ok(SimilarityArcs {
            graph,
            sims,
            bidirectional,
            excluded: None,
        })
    }

    pub(crate) fn sim(&self, p: PredicateId) -> f64 {
        self.sims[p.index()]
    }
}

impl ArcSource for SimilarityArcs<'_> {
    fn arcs(&self, node: EntityId, buf: &mut Vec<Arc>) {
        for &(p, o) in self.graph.out_edges(node) {
            let s = self.sims[p.index()];
            if s > 0.0 && self.excluded != Some(Triple::new(node, p, o)) {
                buf.push(Arc {
                    hop: Hop {
                        from: node,
                        to: o,
                        predicate: p,
                        reversed: false,
                    },
                    cost: 1.0 / s,
                });
            }
        }
        if self.bidirectional {
            for &(p, s_ent) in self.graph.in_edges(node) {
                let s = self.sims[p.index()];
                if s > 0.0 && self.excluded != Some(Triple::new(s_ent, p, node)) {
                    buf.push(Arc {
                        hop: Hop {
                            from: node,
                            to: s_ent,
                            predicate: p,
                            reversed: true,
                        },
                        cost: 1.0 / s,
                    });
                }
            }
        }
    }
    fn arcs_into(&self, node: EntityId, buf: &mut Vec<Arc>) {
        for &(p, s_ent) in self.graph.in_edges(node) {
            let s = self.sims[p.index()];
            if s > 0.0 && self.excluded != Some(Triple::new(s_ent, p, node)) {
                buf.push(Arc {
                    hop: Hop {
                        from: s_ent,
                        to: node,
                        predicate: p,
                        reversed: false,
                    },
                    cost: 1.0 / s,
                });
            }
        }
        if self.bidirectional {
            for &(p, o) in self.graph.out_edges(node) {
                let s = self.sims[p.index()];
                if s > 0.0 && self.excluded != Some(Triple::new(node, p, o)) {
                    buf.push(Arc {
                        hop: Hop {
                            from: o,
                            to: node,
                            predicate: p,
                            reversed: true,
                        },
                        cost: 1.0 / s,
                    });
                }
            }
        }
    }
}

/// Edge-specific segment and the paths it was assembled from.
#[derive(Debug, Clone)]
pub struct EdgeSegment {
    pub clue: Clue,
    pub segment: KnowledgeSegment,
    pub paths: Vec<Path>,
}

impl EdgeSegment {
    pub fn costs(&self) -> Vec<f64> {
        self.paths.iter().map(|p| p.cost).collect()
    }
}

/// Resolves the clue, runs the k-shortest-path search and returns the raw paths.
pub(crate) fn clue_paths<'g>(
    graph: &'g KnowledgeGraph,
    model: &PredicateSimilarityModel,
    clue: &Clue,
    params: &EdgeParams,
) -> Result<(SimilarityArcs<'g>, EntityId, EntityId, Vec<Path>)> {
    let s = graph.entity(&clue.subject)?;
    let o = graph.entity(&clue.object)?;
    let mut arcs = SimilarityArcs::new(graph, model, &clue.predicate, params.bidirectional)?;
    if params.exclude_clue {
        arcs.excluded = graph
            .resolve_predicate(&clue.predicate)
            .map(|p| Triple::new(s, p, o));
    }
    let paths = k_shortest_paths(&arcs, s, o, params.k);
    Ok((arcs, s, o, paths))
}

/// Union of the `k` cheapest simple paths from the clue's subject to its object.
pub fn extract_edge_segment(
    graph: &KnowledgeGraph,
    model: &PredicateSimilarityModel,
    clue: &Clue,
    params: &EdgeParams,
) -> Result<EdgeSegment> {
    if params.k == 0 {
        return Err(Error::InvalidParameter("k must be at least 1".into()));
    }
    let (arcs, s, _, paths) = clue_paths(graph, model, clue, params)?;
    if paths.is_empty() {
        return Err(Error::NoPath {
            from: clue.subject.clone(),
            to: clue.object.clone(),
        });
    }
    let mut segment = KnowledgeSegment::new(Provenance::Edge { clue: clue.clone() });
    segment.add_node(s);
    for path in &paths {
        for hop in &path.hops {
            // add nodes in walk order so local indices follow the paths
            segment.add_node(hop.from);
            segment.add_node(hop.to);
            segment.add_triple(hop.triple(), arcs.sim(hop.predicate));
        }
    }
    Ok(EdgeSegment {
        clue: clue.clone(),
        segment,
        paths,
    })
}

/// Per-query-edge outcome inside a subgraph extraction.
#[derive(Debug, Clone)]
pub struct EdgeOutcome {
    pub edge: usize,
    pub clue: Clue,
    /// `None` when no path connects the endpoints.
    pub segment: Option<EdgeSegment>,
}

impl EdgeOutcome {
    pub fn is_ok(&self) -> bool {
        self.segment.is_some()
    }
}

#[derive(Debug, Clone)]
pub struct SubgraphSegment {
    pub edges: Vec<EdgeOutcome>,
    /// Node/edge union of the edge segments that were found.
    pub merged: KnowledgeSegment,
}

impl SubgraphSegment {
    pub fn all_found(&self) -> bool {
        self.edges.iter().all(EdgeOutcome::is_ok)
    }

    /// Segments in query-edge order; fails on the first missing one.
    pub fn segments(&self) -> Result<Vec<&EdgeSegment>> {
        self.edges
            .iter()
            .map(|e| e.segment.as_ref().ok_or(Error::MissingSegment(e.edge)))
            .collect()
    }
}

/// One edge segment per query edge plus their merge.
///
/// Unresolvable nodes or predicates fail the whole call; an unreachable pair
/// only marks its own edge.
pub fn extract_subgraph_segment(
    graph: &KnowledgeGraph,
    model: &PredicateSimilarityModel,
    query: &QueryGraph,
    params: &EdgeParams,
) -> Result<SubgraphSegment> {
    query.validate()?;
    for label in &query.nodes {
        graph.entity(label)?;
    }
    let clues = query.clues();
    let mut outcomes = Vec::with_capacity(clues.len());
    let mut merged = KnowledgeSegment::new(Provenance::Subgraph {
        clues: clues.clone(),
    });
    for (i, clue) in clues.iter().enumerate() {
        let segment = match extract_edge_segment(graph, model, clue, params) {
            Ok(seg) => Some(seg),
            Err(Error::NoPath { .. }) => None,
            Err(e) => return Err(e),
        };
        if let Some(seg) = &segment {
            for &n in &seg.segment.nodes {
                merged.add_node(n);
            }
            for e in &seg.segment.edges {
                let idx = merged.add_triple(seg.segment.triple(e), e.weight);
                let origins = &mut merged.edges[idx].query_edges;
                if !origins.contains(&i) {
                    origins.push(i);
                }
            }
        }
        outcomes.push(EdgeOutcome {
            edge: i,
            clue: clue.clone(),
            segment,
        });
    }
    Ok(SubgraphSegment {
        edges: outcomes,
        merged,
    })
}
