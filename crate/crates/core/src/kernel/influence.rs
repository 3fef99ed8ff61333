//! Closed-form derivatives of the kernel w.r.t. edges, nodes and attributes.
//!
//! With `y = Q N p`, `z = Q' q`, `U = N z` and `G = p + c A y` (all reshaped to
//! `n1 x n2`), the single-entry partials are
//! `dSim/dA1(i,j) = c (U (Y A2')')[i,j]`, `dSim/dA2(i,j) = c (U' A1 Y)[i,j]` and
//! `dSim/dN1(i,l) = sum_b Z[i,b] G[i,b] N2[b,l]`.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use super::solve::{decay, prepare, Product};
use super::{AttributedGraph, KernelConfig};
use crate::error::{Error, Result};
use crate::mining::SquareMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Category {
    Node,
    Edge,
    Attribute,
}

impl Category {
    pub const ALL: [Category; 3] = [Category::Attribute, Category::Node, Category::Edge];
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Influence {
    /// Entity label for nodes and attributes, `<s, p, o>` for edges.
    pub element: String,
    pub value: f64,
    pub node: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<usize>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub background: bool,
}

/// Influence of one graph's elements, each category sorted by `|value|` descending.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InfluenceReport {
    pub nodes: Vec<Influence>,
    pub edges: Vec<Influence>,
    pub attributes: Vec<Influence>,
    /// Single-entry partials `dSim/dA(i,j)`.
    #[serde(skip)]
    pub edge_partials: Option<SquareMatrix>,
    /// `dSim/dN(i, l)` with `l` indexing `vocabulary`.
    #[serde(skip)]
    pub attribute_partials: Vec<Vec<f64>>,
    #[serde(skip)]
    pub vocabulary: Vec<String>,
    /// Edge elements are undirected pairs when set.
    #[serde(skip)]
    pub paired: bool,
}

impl InfluenceReport {
    pub fn category(&self, c: Category) -> &[Influence] {
        match c {
            Category::Node => &self.nodes,
            Category::Edge => &self.edges,
            Category::Attribute => &self.attributes,
        }
    }

    fn partials(&self) -> &SquareMatrix {
        self.edge_partials.as_ref().expect("report built with partials")
    }

    /// Derivative w.r.t. the edge element between `i` and `j`: both entries
    /// `A(i,j)` and `A(j,i)` move together when edges are undirected.
    pub fn edge_derivative(&self, i: usize, j: usize) -> f64 {
        let m = self.partials();
        if self.paired && i != j {
            m.get(i, j) + m.get(j, i)
        } else {
            m.get(i, j)
        }
    }

    pub fn attribute_derivative(&self, i: usize, label: &str) -> f64 {
        match self.vocabulary.binary_search_by(|v| v.as_str().cmp(label)) {
            Ok(l) => self.attribute_partials[i][l],
            Err(_) => 0.0,
        }
    }

    /// Looks up a reported value by element label.
    pub fn value(&self, c: Category, element: &str) -> Option<f64> {
        self.category(c)
            .iter()
            .find(|e| !e.background && e.element == element)
            .map(|e| e.value)
    }
}

/// Influence reports for both operands of one kernel evaluation.
#[derive(Debug, Clone)]
pub struct InfluencePair {
    pub similarity: f64,
    pub decay: f64,
    pub reports: [InfluenceReport; 2],
    /// The operands after optional background augmentation; report indices refer to these.
    pub graphs: (AttributedGraph, AttributedGraph),
}

/// Influence of every edge, node and attribute of both graphs on their kernel.
pub fn influence(g1: &AttributedGraph, g2: &AttributedGraph, cfg: &KernelConfig) -> Result<InfluencePair> {
    let (g1, g2) = prepare(g1, g2, cfg)?;
    let prod = Product::new(&g1, &g2);
    let c = decay(&prod, cfg)?;
    let pq = prod.uniform();
    let (y, _) = prod.solve_right(c, &pq, cfg)?;
    let (z, _) = prod.solve_left(c, &pq, cfg)?;
    let similarity: f64 = pq.iter().zip(&y).map(|(q, y)| q * y).sum();

    let (n1, n2, m) = (prod.n1, prod.n2, prod.vocab.len());
    let u: Vec<f64> = z.iter().zip(&prod.nx).map(|(z, n)| z * n).collect();
    let mut ay = vec![0.0; prod.dim()];
    prod.kron(&y, &mut ay, false);
    let gvec: Vec<f64> = pq.iter().zip(&ay).map(|(p, a)| p + c * a).collect();

    // Y A2' (n1 x n2) and A1 Y (n1 x n2)
    let ya2 = mat_mul_right_t(&y, n1, n2, &g2.adjacency);
    let a1y = mat_mul_left(&g1.adjacency, &y, n1, n2);

    let mut m1 = SquareMatrix::zeros(n1);
    for i in 0..n1 {
        for j in 0..n1 {
            let s: f64 = (0..n2).map(|b| u[i * n2 + b] * ya2[j * n2 + b]).sum();
            m1.set(i, j, c * s);
        }
    }
    let mut m2 = SquareMatrix::zeros(n2);
    for i in 0..n2 {
        for j in 0..n2 {
            let s: f64 = (0..n1).map(|a| u[a * n2 + i] * a1y[a * n2 + j]).sum();
            m2.set(i, j, c * s);
        }
    }
    let mut attr1 = vec![vec![0.0; m]; n1];
    let mut attr2 = vec![vec![0.0; m]; n2];
    for a in 0..n1 {
        for b in 0..n2 {
            let w = z[a * n2 + b] * gvec[a * n2 + b];
            if w == 0.0 {
                continue;
            }
            for l in 0..m {
                attr1[a][l] += w * prod.attrs2[b * m + l];
                attr2[b][l] += w * prod.attrs1[a * m + l];
            }
        }
    }
    let r1 = build_report(&g1, m1, attr1, prod.vocab.clone(), cfg.symmetrize);
    let r2 = build_report(&g2, m2, attr2, prod.vocab.clone(), cfg.symmetrize);
    Ok(InfluencePair {
        similarity,
        decay: c,
        reports: [r1, r2],
        graphs: (g1, g2),
    })
}

/// Report for `g` whose partials are `sum coef * partial` over `terms`.
///
/// Every term's report must index `g`'s nodes identically; only the first
/// `g.node_count()` rows of each term are used, so background rows drop out.
pub(crate) fn combine_reports(g: &AttributedGraph, terms: &[(f64, &InfluenceReport)], paired: bool) -> InfluenceReport {
    let n = g.node_count();
    let mut vocabulary: Vec<String> = terms
        .iter()
        .flat_map(|(_, r)| r.vocabulary.iter().cloned())
        .collect();
    vocabulary.sort();
    vocabulary.dedup();
    let mut partials = SquareMatrix::zeros(n);
    let mut attrs = vec![vec![0.0; vocabulary.len()]; n];
    for &(coef, r) in terms {
        let m = r.partials();
        for i in 0..n {
            for j in 0..n {
                partials.add(i, j, coef * m.get(i, j));
            }
            for (l, label) in vocabulary.iter().enumerate() {
                attrs[i][l] += coef * r.attribute_derivative(i, label);
            }
        }
    }
    build_report(g, partials, attrs, vocabulary, paired)
}

fn mat_mul_right_t(y: &[f64], n1: usize, n2: usize, a2: &SquareMatrix) -> Vec<f64> {
    let mut out = vec![0.0; n1 * n2];
    for j in 0..n1 {
        for b in 0..n2 {
            out[j * n2 + b] = (0..n2).map(|bp| y[j * n2 + bp] * a2.get(b, bp)).sum();
        }
    }
    out
}

fn mat_mul_left(a1: &SquareMatrix, y: &[f64], n1: usize, n2: usize) -> Vec<f64> {
    let mut out = vec![0.0; n1 * n2];
    for a in 0..n1 {
        for ap in 0..n1 {
            let v = a1.get(a, ap);
            if v != 0.0 {
                for b in 0..n2 {
                    out[a * n2 + b] += v * y[ap * n2 + b];
                }
            }
        }
    }
    out
}

fn build_report(
    g: &AttributedGraph,
    partials: SquareMatrix,
    attribute_partials: Vec<Vec<f64>>,
    vocabulary: Vec<String>,
    paired: bool,
) -> InfluenceReport {
    let mut report = InfluenceReport {
        nodes: Vec::new(),
        edges: Vec::new(),
        attributes: Vec::new(),
        edge_partials: Some(partials),
        attribute_partials,
        vocabulary,
        paired,
    };
    for e in &g.edges {
        report.edges.push(Influence {
            element: e.key(),
            value: report.edge_derivative(e.src, e.dst),
            node: e.src,
            target: Some(e.dst),
            background: false,
        });
    }
    for i in 0..g.node_count() {
        let value = node_value(g, &report, i);
        report.nodes.push(Influence {
            element: g.labels[i].clone(),
            value,
            node: i,
            target: None,
            background: g.background[i],
        });
        for label in g.attributes[i].keys() {
            report.attributes.push(Influence {
                element: label.clone(),
                value: report.attribute_derivative(i, label),
                node: i,
                target: None,
                background: g.background[i],
            });
        }
    }
    for list in [&mut report.nodes, &mut report.edges, &mut report.attributes] {
        list.sort_by(rank_order);
    }
    report
}

/// Sum of the influences of the adjacency entries touching `i`.
fn node_value(g: &AttributedGraph, report: &InfluenceReport, i: usize) -> f64 {
    let a = &g.adjacency;
    let m = report.partials();
    g.incident(i)
        .into_iter()
        .map(|j| {
            if report.paired {
                report.edge_derivative(i, j)
            } else {
                let out = if a.get(i, j) != 0.0 { m.get(i, j) } else { 0.0 };
                let inc = if j != i && a.get(j, i) != 0.0 { m.get(j, i) } else { 0.0 };
                out + inc
            }
        })
        .sum()
}

/// `|value|` descending at 12 significant digits, then label ascending.
fn rank_order(a: &Influence, b: &Influence) -> Ordering {
    let key = |v: f64| -> f64 { format!("{:.11e}", v.abs()).parse().unwrap_or(0.0) };
    key(b.value)
        .total_cmp(&key(a.value))
        .then_with(|| a.element.cmp(&b.element))
        .then_with(|| a.node.cmp(&b.node))
}

/// Top `ceil(fraction * n)` labels per category, background excluded. `n` counts
/// distinct labels, so a type shared by several nodes is one element.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct KeyElements {
    pub attributes: Vec<String>,
    pub nodes: Vec<String>,
    pub edges: Vec<String>,
}

impl KeyElements {
    pub fn category(&self, c: Category) -> &[String] {
        match c {
            Category::Node => &self.nodes,
            Category::Edge => &self.edges,
            Category::Attribute => &self.attributes,
        }
    }
}

pub fn key_elements(report: &InfluenceReport, fraction: f64) -> Result<KeyElements> {
    if !(fraction > 0.0 && fraction <= 1.0) {
        return Err(Error::InvalidParameter(format!("key fraction {fraction} outside (0, 1]")));
    }
    let pick = |list: &[Influence]| -> Vec<String> {
        let mut own: Vec<&Influence> = list.iter().filter(|e| !e.background).collect();
        own.sort_by(|a, b| rank_order(a, b));
        let distinct = own.iter().map(|e| e.element.as_str()).collect::<std::collections::BTreeSet<_>>().len();
        let take = ((fraction * distinct as f64) - 1e-9).ceil().max(0.0) as usize;
        let mut out: Vec<String> = Vec::with_capacity(take);
        for e in own {
            if out.len() == take {
                break;
            }
            if !out.contains(&e.element) {
                out.push(e.element.clone());
            }
        }
        out
    };
    Ok(KeyElements {
        attributes: pick(&report.attributes),
        nodes: pick(&report.nodes),
        edges: pick(&report.edges),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path3() -> AttributedGraph {
        let mut g = AttributedGraph::with_nodes(&["a", "b", "c"]);
        g.add_edge(0, "p", 1, true);
        g.add_edge(1, "q", 2, true);
        g
    }

    #[test]
    fn node_is_sum_of_incident_edges() {
        let g1 = path3();
        let mut g2 = AttributedGraph::with_nodes(&["a", "b", "d"]);
        g2.add_edge(0, "p", 1, true);
        g2.add_edge(0, "r", 2, true);
        let pair = influence(&g1, &g2, &KernelConfig::default()).unwrap();
        for (report, g) in pair.reports.iter().zip([&pair.graphs.0, &pair.graphs.1]) {
            for node in &report.nodes {
                let sum: f64 = g
                    .incident(node.node)
                    .into_iter()
                    .map(|j| report.edge_derivative(node.node, j))
                    .sum();
                assert!((node.value - sum).abs() <= 1e-15 * sum.abs().max(1e-300));
            }
        }
        // b is the middle of the path
        let b = pair.reports[0].value(Category::Node, "b").unwrap();
        let e1 = pair.reports[0].value(Category::Edge, "<a, p, b>").unwrap();
        let e2 = pair.reports[0].value(Category::Edge, "<b, q, c>").unwrap();
        assert!((b - (e1 + e2)).abs() < 1e-15);
    }

    #[test]
    fn background_gives_unique_elements_influence() {
        let g1 = path3();
        let mut g2 = AttributedGraph::with_nodes(&["a", "b"]);
        g2.add_edge(0, "p", 1, true);
        // "c" exists only in g1; without background nothing in g2 can match its walks
        let plain = influence(&g1, &g2, &KernelConfig::default().without_background()).unwrap();
        assert_eq!(plain.reports[0].value(Category::Attribute, "c").unwrap(), 0.0);
        assert_eq!(plain.reports[0].value(Category::Edge, "<b, q, c>").unwrap(), 0.0);
        let bg = influence(&g1, &g2, &KernelConfig::default()).unwrap();
        assert!(bg.reports[0].value(Category::Attribute, "c").unwrap() > 0.0);
        assert!(bg.reports[0].value(Category::Edge, "<b, q, c>").unwrap() > 0.0);
    }

    #[test]
    fn key_element_counts_and_ties() {
        let g = AttributedGraph::with_nodes(&["g", "f", "e", "d", "c", "b", "a"]);
        let other = AttributedGraph::with_nodes(&["x"]);
        let pair = influence(&g, &other, &KernelConfig::default().without_background()).unwrap();
        let keys = key_elements(&pair.reports[0], 0.5).unwrap();
        // all zero: ceil(3.5) = 4, chosen by label
        assert_eq!(keys.attributes, ["a", "b", "c", "d"]);
        assert_eq!(keys.nodes, ["a", "b", "c", "d"]);
        assert!(keys.edges.is_empty());
        let six = AttributedGraph::with_nodes(&["a", "b", "c", "d", "e", "f"]);
        let pair = influence(&six, &other, &KernelConfig::default().without_background()).unwrap();
        assert_eq!(key_elements(&pair.reports[0], 0.5).unwrap().nodes.len(), 3);
        assert!(key_elements(&pair.reports[0], 0.0).is_err());
    }

    #[test]
    fn background_excluded_from_keys() {
        let g1 = path3();
        let g2 = path3();
        let pair = influence(&g1, &g2, &KernelConfig::default()).unwrap();
        assert!(pair.reports[0].nodes.iter().any(|n| n.background));
        let keys = key_elements(&pair.reports[0], 1.0).unwrap();
        assert_eq!(keys.nodes.len(), 3);
        assert_eq!(keys.attributes.len(), 3);
        assert_eq!(keys.edges.len(), 2);
    }
}
