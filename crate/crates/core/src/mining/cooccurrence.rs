use serde::{Deserialize, Serialize};

use crate::store::{EntityId, KnowledgeGraph, PredicateId};

/// Dense row-major square matrix indexed by predicate position.
#[derive(Debug, Clone, PartialEq)]
pub struct SquareMatrix {
    n: usize,
    data: Vec<f64>,
}

impl SquareMatrix {
    pub fn zeros(n: usize) -> Self {
        SquareMatrix {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] = v;
    }

    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] += v;
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        (0..self.n).all(|i| (0..i).all(|j| (self.get(i, j) - self.get(j, i)).abs() <= tol))
    }
}

/// How predicate co-occurrence is counted.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CooccurrenceMode {
    /// `C(i,j)` = number of unordered pairs of distinct adjacent triples with
    /// predicates `i` and `j`. Two triples are adjacent when they share an endpoint.
    #[default]
    Pairs,
    /// `C(i,j)` = number of triple neighborhoods (a triple plus its adjacent
    /// triples) that contain both `i` and `j`; for `i == j`, at least two `i` triples.
    Documents,
}

/// Per-entity predicate histogram over incident triples (self-loops counted once).
fn incident_histogram(graph: &KnowledgeGraph, v: EntityId, buf: &mut Vec<(PredicateId, u64)>) {
    buf.clear();
    let out = graph.out_edges(v).iter().map(|&(p, _)| p);
    let inc = graph
        .in_edges(v)
        .iter()
        .filter(|&&(_, s)| s != v)
        .map(|&(p, _)| p);
    let mut preds: Vec<PredicateId> = out.chain(inc).collect();
    preds.sort_unstable();
    for p in preds {
        match buf.last_mut() {
            Some((q, c)) if *q == p => *c += 1,
            _ => buf.push((p, 1)),
        }
    }
}

/// Predicates of the triples joining `v` to `u`, for every `u > v`, grouped by `u`.
fn shared_pair_groups(graph: &KnowledgeGraph, v: EntityId) -> Vec<(EntityId, Vec<PredicateId>)> {
    let mut links: Vec<(EntityId, PredicateId)> = graph
        .out_edges(v)
        .iter()
        .chain(graph.in_edges(v))
        .filter(|&&(_, u)| u > v)
        .map(|&(p, u)| (u, p))
        .collect();
    links.sort_unstable();
    let mut groups: Vec<(EntityId, Vec<PredicateId>)> = Vec::new();
    for (u, p) in links {
        match groups.last_mut() {
            Some((w, ps)) if *w == u => ps.push(p),
            _ => groups.push((u, vec![p])),
        }
    }
    groups.retain(|(_, ps)| ps.len() > 1);
    groups
}

fn add_pairs(c: &mut SquareMatrix, hist: &[(PredicateId, u64)], sign: f64) {
    for (a, &(p, hp)) in hist.iter().enumerate() {
        let same = (hp * hp.saturating_sub(1) / 2) as f64;
        c.add(p.index(), p.index(), sign * same);
        for &(q, hq) in &hist[a + 1..] {
            let v = sign * (hp * hq) as f64;
            c.add(p.index(), q.index(), v);
            c.add(q.index(), p.index(), v);
        }
    }
}

fn histogram_of(preds: &[PredicateId]) -> Vec<(PredicateId, u64)> {
    let mut sorted = preds.to_vec();
    sorted.sort_unstable();
    let mut h: Vec<(PredicateId, u64)> = Vec::new();
    for p in sorted {
        match h.last_mut() {
            Some((q, c)) if *q == p => *c += 1,
            _ => h.push((p, 1)),
        }
    }
    h
}

/// Symmetric predicate co-occurrence matrix indexed by graph predicate id.
pub fn compute_cooccurrence(graph: &KnowledgeGraph, mode: CooccurrenceMode) -> SquareMatrix {
    match mode {
        CooccurrenceMode::Pairs => pair_cooccurrence(graph),
        CooccurrenceMode::Documents => document_cooccurrence(graph),
    }
}

fn pair_cooccurrence(graph: &KnowledgeGraph) -> SquareMatrix {
    let mut c = SquareMatrix::zeros(graph.predicate_count());
    let mut hist = Vec::new();
    for v in 0..graph.entity_count() as u32 {
        let v = EntityId(v);
        incident_histogram(graph, v, &mut hist);
        add_pairs(&mut c, &hist, 1.0);
        // triples joining the same two entities were counted at both ends
        for (_, preds) in shared_pair_groups(graph, v) {
            add_pairs(&mut c, &histogram_of(&preds), -1.0);
        }
    }
    c
}

fn document_cooccurrence(graph: &KnowledgeGraph) -> SquareMatrix {
    let m = graph.predicate_count();
    let mut c = SquareMatrix::zeros(m);
    let hists: Vec<Vec<(PredicateId, u64)>> = (0..graph.entity_count() as u32)
        .map(|v| {
            let mut h = Vec::new();
            incident_histogram(graph, EntityId(v), &mut h);
            h
        })
        .collect();
    let mut counts = vec![0i64; m];
    let mut touched: Vec<usize> = Vec::new();
    for t in graph.triples() {
        touched.clear();
        let mut bump = |p: PredicateId, by: i64, counts: &mut Vec<i64>| {
            if counts[p.index()] == 0 {
                touched.push(p.index());
            }
            counts[p.index()] += by;
        };
        for &(p, n) in &hists[t.subject.index()] {
            bump(p, n as i64, &mut counts);
        }
        if t.object != t.subject {
            for &(p, n) in &hists[t.object.index()] {
                bump(p, n as i64, &mut counts);
            }
            // triples between subject and object sit in both incident sets
            let (lo, hi) = if t.subject < t.object {
                (t.subject, t.object)
            } else {
                (t.object, t.subject)
            };
            let between = graph
                .out_edges(lo)
                .iter()
                .chain(graph.in_edges(lo))
                .filter(|&&(_, u)| u == hi)
                .map(|&(p, _)| p);
            for p in between {
                counts[p.index()] -= 1;
            }
        }
        touched.sort_unstable();
        touched.dedup();
        for (a, &i) in touched.iter().enumerate() {
            if counts[i] >= 2 {
                c.add(i, i, 1.0);
            }
            for &j in &touched[a + 1..] {
                if counts[i] > 0 && counts[j] > 0 {
                    c.add(i, j, 1.0);
                    c.add(j, i, 1.0);
                }
            }
        }
        for &i in &touched {
            counts[i] = 0;
        }
    }
    c
}
