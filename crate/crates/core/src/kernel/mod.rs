//! Node-attributed random-walk kernel between two segments and its influence functions.
//!
//! `Sim = q'(I - c N A)^-1 N p` over the product graph, where `A = A1 (x) A2` and
//! `N = diag(N1 N2')`. Nothing of size `n1*n2 x n1*n2` is ever built: products use
//! `(A1 (x) A2) vec(X) = vec(A1 X A2')` with row-major index `a*n2 + b`.

mod influence;
mod solve;

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::mining::SquareMatrix;
use crate::segment::KnowledgeSegment;
use crate::store::KnowledgeGraph;

pub use influence::{influence, key_elements, Category, Influence, InfluencePair, InfluenceReport, KeyElements};
pub use solve::{decay_bound, default_decay, kernel_similarity, KernelEvaluation};
pub(crate) use influence::combine_reports;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", default)]
pub struct KernelConfig {
    /// Decay. `None` picks `min(0.9 / ub, 0.9)` with `ub` the max row sum of `N A`.
    pub decay: Option<f64>,
    /// Add the disjoint background clique to both graphs before evaluating.
    pub background: bool,
    /// Treat segment edges as undirected.
    pub symmetrize: bool,
    /// Relative error bound for the fixed-point solves.
    pub tolerance: f64,
    pub max_iterations: usize,
}

impl Default for KernelConfig {
    fn default() -> Self {
        KernelConfig {
            decay: None,
            background: true,
            symmetrize: true,
            tolerance: 1e-10,
            max_iterations: 10_000,
        }
    }
}

impl KernelConfig {
    pub fn without_background(mut self) -> Self {
        self.background = false;
        self
    }

    pub fn with_decay(mut self, c: f64) -> Self {
        self.decay = Some(c);
        self
    }
}

/// A labelled triple of a segment, for reporting edge influence.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct EdgeLabel {
    pub src: usize,
    pub dst: usize,
    pub subject: String,
    pub predicate: String,
    pub object: String,
}

impl EdgeLabel {
    pub fn key(&self) -> String {
        format!("<{}, {}, {}>", self.subject, self.predicate, self.object)
    }
}

/// Segment as seen by the kernel: adjacency plus sparse attribute rows.
#[derive(Debug, Clone, PartialEq)]
pub struct AttributedGraph {
    pub labels: Vec<String>,
    pub adjacency: SquareMatrix,
    /// `attributes[i][label]` is the entry `N(i, label)`.
    pub attributes: Vec<BTreeMap<String, f64>>,
    /// Triples backing the adjacency entries. Background edges are not listed.
    pub edges: Vec<EdgeLabel>,
    pub background: Vec<bool>,
}

impl AttributedGraph {
    /// Nodes with one-hot identity attributes and no edges.
    pub fn with_nodes<S: AsRef<str>>(labels: &[S]) -> Self {
        let labels: Vec<String> = labels.iter().map(|s| s.as_ref().to_owned()).collect();
        let n = labels.len();
        AttributedGraph {
            attributes: labels
                .iter()
                .map(|l| BTreeMap::from([(l.clone(), 1.0)]))
                .collect(),
            labels,
            adjacency: SquareMatrix::zeros(n),
            edges: Vec::new(),
            background: vec![false; n],
        }
    }

    /// Adds an edge between local nodes; `symmetric` also sets the transpose entry.
    pub fn add_edge(&mut self, src: usize, predicate: &str, dst: usize, symmetric: bool) {
        self.adjacency.set(src, dst, 1.0);
        if symmetric {
            self.adjacency.set(dst, src, 1.0);
        }
        self.edges.push(EdgeLabel {
            src,
            dst,
            subject: self.labels[src].clone(),
            predicate: predicate.to_owned(),
            object: self.labels[dst].clone(),
        });
    }

    /// Identity attributes plus any type attributes the graph carries.
    pub fn from_segment(graph: &KnowledgeGraph, segment: &KnowledgeSegment, symmetrize: bool) -> Self {
        let labels: Vec<&str> = segment.nodes.iter().map(|&e| graph.entity_label(e)).collect();
        let mut g = AttributedGraph::with_nodes(&labels);
        for (i, &e) in segment.nodes.iter().enumerate() {
            for ty in graph.entity_types(e) {
                g.attributes[i].insert(ty.clone(), 1.0);
            }
        }
        for e in &segment.edges {
            g.add_edge(e.src, graph.predicate_label(e.predicate), e.dst, symmetrize);
        }
        g
    }

    pub fn node_count(&self) -> usize {
        self.labels.len()
    }

    /// Original (non-background) node count; originals always come first.
    pub fn original_count(&self) -> usize {
        self.background.iter().filter(|b| !**b).count()
    }

    pub fn is_symmetric(&self) -> bool {
        self.adjacency.is_symmetric(0.0)
    }

    pub fn attribute_labels(&self) -> BTreeSet<&str> {
        self.attributes
            .iter()
            .flat_map(|m| m.keys().map(String::as_str))
            .collect()
    }

    /// Undirected neighbours of `i` in the adjacency, including `i` for a self loop.
    pub fn incident(&self, i: usize) -> Vec<usize> {
        (0..self.node_count())
            .filter(|&j| self.adjacency.get(i, j) != 0.0 || self.adjacency.get(j, i) != 0.0)
            .collect()
    }
}

/// Gives each graph a disjoint clique over the union of node labels.
///
/// Background node `x` carries the attributes of the first original node labelled `x`
/// in either graph. The clique has no self loops.
pub fn augment_with_background(g1: &AttributedGraph, g2: &AttributedGraph) -> (AttributedGraph, AttributedGraph) {
    let mut vocab: Vec<(String, BTreeMap<String, f64>)> = Vec::new();
    for g in [g1, g2] {
        for i in 0..g.node_count() {
            if g.background[i] || vocab.iter().any(|(l, _)| *l == g.labels[i]) {
                continue;
            }
            vocab.push((g.labels[i].clone(), g.attributes[i].clone()));
        }
    }
    (append_clique(g1, &vocab), append_clique(g2, &vocab))
}

fn append_clique(g: &AttributedGraph, vocab: &[(String, BTreeMap<String, f64>)]) -> AttributedGraph {
    let n = g.node_count();
    let m = vocab.len();
    let mut adjacency = SquareMatrix::zeros(n + m);
    for i in 0..n {
        for j in 0..n {
            adjacency.set(i, j, g.adjacency.get(i, j));
        }
    }
    for i in n..n + m {
        for j in n..n + m {
            if i != j {
                adjacency.set(i, j, 1.0);
            }
        }
    }
    let mut out = g.clone();
    out.adjacency = adjacency;
    for (label, attrs) in vocab {
        out.labels.push(label.clone());
        out.attributes.push(attrs.clone());
        out.background.push(true);
    }
    out
}
