//! Clues and query graphs, addressed by label.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A `<subject, predicate, object>` clue given by labels.
///
/// Deserializes from either `{"subject":..,"predicate":..,"object":..}` or a
/// three-element array.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(from = "ClueRepr")]
pub struct Clue {
    pub subject: String,
    pub predicate: String,
    pub object: String,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum ClueRepr {
    Object {
        subject: String,
        predicate: String,
        object: String,
    },
    Array([String; 3]),
}

impl From<ClueRepr> for Clue {
    fn from(r: ClueRepr) -> Self {
        match r {
            ClueRepr::Object {
                subject,
                predicate,
                object,
            } => Clue::new(subject, predicate, object),
            ClueRepr::Array([s, p, o]) => Clue::new(s, p, o),
        }
    }
}

impl Clue {
    pub fn new(
        subject: impl Into<String>,
        predicate: impl Into<String>,
        object: impl Into<String>,
    ) -> Self {
        Clue {
            subject: subject.into(),
            predicate: predicate.into(),
            object: object.into(),
        }
    }

    /// Parses `subject|predicate|object` (a tab also works as separator).
    pub fn parse(text: &str) -> Result<Self> {
        let sep = if text.contains('\t') { '\t' } else { '|' };
        let parts: Vec<&str> = text.split(sep).map(str::trim).collect();
        match parts.as_slice() {
            [s, p, o] if !s.is_empty() && !p.is_empty() && !o.is_empty() => Ok(Clue::new(*s, *p, *o)),
            _ => Err(Error::InvalidQuery(format!(
                "expected `subject|predicate|object`, got `{text}`"
            ))),
        }
    }
}

impl fmt::Display for Clue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<{}, {}, {}>", self.subject, self.predicate, self.object)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QueryEdge {
    pub source: usize,
    pub predicate: String,
    pub target: usize,
}

/// Attributed query graph: labeled nodes and predicate-labeled edges between them.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct QueryGraph {
    pub nodes: Vec<String>,
    pub edges: Vec<QueryEdge>,
}

impl QueryGraph {
    /// Builds a query graph whose nodes are the distinct labels in first-seen order.
    pub fn from_clues(clues: &[Clue]) -> Self {
        let mut q = QueryGraph::default();
        for c in clues {
            let s = q.node_index_or_insert(&c.subject);
            let o = q.node_index_or_insert(&c.object);
            q.edges.push(QueryEdge {
                source: s,
                predicate: c.predicate.clone(),
                target: o,
            });
        }
        q
    }

    fn node_index_or_insert(&mut self, label: &str) -> usize {
        match self.nodes.iter().position(|n| n == label) {
            Some(i) => i,
            None => {
                self.nodes.push(label.to_owned());
                self.nodes.len() - 1
            }
        }
    }

    pub fn clue(&self, edge: usize) -> Clue {
        let e = &self.edges[edge];
        Clue::new(
            self.nodes[e.source].clone(),
            e.predicate.clone(),
            self.nodes[e.target].clone(),
        )
    }

    pub fn clues(&self) -> Vec<Clue> {
        (0..self.edges.len()).map(|i| self.clue(i)).collect()
    }

    /// Checks edge endpoints, non-emptiness and (weak) connectivity.
    pub fn validate(&self) -> Result<()> {
        if self.edges.is_empty() {
            return Err(Error::InvalidQuery("query graph has no edges".into()));
        }
        for (i, e) in self.edges.iter().enumerate() {
            if e.source >= self.nodes.len() || e.target >= self.nodes.len() {
                return Err(Error::InvalidQuery(format!(
                    "edge {i} points outside the node list"
                )));
            }
        }
        if !self.is_connected() {
            return Err(Error::InvalidQuery("query graph is disconnected".into()));
        }
        Ok(())
    }

    /// Weak connectivity over the nodes touched by edges plus any isolated nodes.
    pub fn is_connected(&self) -> bool {
        let n = self.nodes.len();
        if n == 0 {
            return true;
        }
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        for e in &self.edges {
            let (a, b) = (find(&mut parent, e.source), find(&mut parent, e.target));
            parent[a] = b;
        }
        let root = find(&mut parent, 0);
        (0..n).all(|i| find(&mut parent, i) == root)
    }

    /// Whether query edges `a` and `b` share an endpoint.
    pub fn edges_adjacent(&self, a: usize, b: usize) -> bool {
        let (x, y) = (&self.edges[a], &self.edges[b]);
        x.source == y.source || x.source == y.target || x.target == y.source || x.target == y.target
    }
}

/// Wire form of a query graph: a plain list of clues or explicit nodes and edges.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum QueryInput {
    Clues(Vec<Clue>),
    Graph(QueryGraph),
}

impl QueryInput {
    pub fn into_graph(self) -> QueryGraph {
        match self {
            QueryInput::Clues(c) => QueryGraph::from_clues(&c),
            QueryInput::Graph(g) => g,
        }
    }
}

impl From<QueryInput> for QueryGraph {
    fn from(q: QueryInput) -> Self {
        q.into_graph()
    }
}
