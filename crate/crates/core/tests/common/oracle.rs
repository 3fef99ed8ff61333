//! Brute-force references: quadratic pair counts, full simple-path enumeration
//! and prefix conductance recomputed from scratch.

use std::collections::HashSet;

use kgreason::store::{EntityId, KnowledgeGraph, Triple};

/// Pair-mode co-occurrence by checking every pair of distinct triples.
pub fn pair_cooccurrence(g: &KnowledgeGraph) -> Vec<Vec<f64>> {
    let m = g.predicate_count();
    let t: Vec<Triple> = g.triples().collect();
    let mut c = vec![vec![0.0; m]; m];
    for a in 0..t.len() {
        for b in a + 1..t.len() {
            let (x, y) = (t[a], t[b]);
            let shares = [x.subject, x.object]
                .iter()
                .any(|e| *e == y.subject || *e == y.object);
            if !shares {
                continue;
            }
            let (i, j) = (x.predicate.index(), y.predicate.index());
            c[i][j] += 1.0;
            if i != j {
                c[j][i] += 1.0;
            }
        }
    }
    c
}

/// Document-mode co-occurrence: for each triple, the multiset of predicates of
/// itself and every triple sharing an endpoint.
pub fn document_cooccurrence(g: &KnowledgeGraph) -> Vec<Vec<f64>> {
    let m = g.predicate_count();
    let t: Vec<Triple> = g.triples().collect();
    let mut c = vec![vec![0.0; m]; m];
    for x in &t {
        let mut count = vec![0usize; m];
        for y in &t {
            let shares = [x.subject, x.object]
                .iter()
                .any(|e| *e == y.subject || *e == y.object);
            if shares {
                count[y.predicate.index()] += 1;
            }
        }
        for i in 0..m {
            if count[i] >= 2 {
                c[i][i] += 1.0;
            }
            for j in 0..m {
                if i != j && count[i] > 0 && count[j] > 0 {
                    c[i][j] += 1.0;
                }
            }
        }
    }
    c
}

/// Every simple path from `s` to `t` as `(node sequence, arc indices, cost)`,
/// cost summed left to right.
pub fn simple_paths(arcs: &[(u32, u32, f64)], s: u32, t: u32) -> Vec<(Vec<u32>, Vec<usize>, f64)> {
    fn walk(
        arcs: &[(u32, u32, f64)],
        at: u32,
        t: u32,
        nodes: &mut Vec<u32>,
        used: &mut Vec<usize>,
        cost: f64,
        out: &mut Vec<(Vec<u32>, Vec<usize>, f64)>,
    ) {
        if at == t {
            out.push((nodes.clone(), used.clone(), cost));
            return;
        }
        for (i, &(a, b, c)) in arcs.iter().enumerate() {
            if a != at || nodes.contains(&b) {
                continue;
            }
            nodes.push(b);
            used.push(i);
            walk(arcs, b, t, nodes, used, cost + c, out);
            nodes.pop();
            used.pop();
        }
    }
    let mut out = Vec::new();
    walk(arcs, s, t, &mut vec![s], &mut Vec::new(), 0.0, &mut out);
    out.sort_by(|a, b| a.2.total_cmp(&b.2).then_with(|| a.0.cmp(&b.0)));
    out
}

/// Conductance of `set` in the undirected weighted graph given by `edges`.
pub fn conductance(edges: &[(EntityId, EntityId, f64)], set: &HashSet<EntityId>) -> f64 {
    let mut vol_in = 0.0;
    let mut vol_all = 0.0;
    let mut cut = 0.0;
    for &(a, b, w) in edges {
        if a == b {
            continue;
        }
        vol_all += 2.0 * w;
        let (ia, ib) = (set.contains(&a), set.contains(&b));
        vol_in += w * (ia as u8 + ib as u8) as f64;
        if ia != ib {
            cut += w;
        }
    }
    let denom = vol_in.min(vol_all - vol_in);
    if denom > 1e-12 * vol_all {
        cut / denom
    } else {
        f64::INFINITY
    }
}

/// Prefix conductances of `order` recomputed from scratch, and the length of the
/// first minimal prefix.
pub fn best_prefix(edges: &[(EntityId, EntityId, f64)], order: &[EntityId]) -> (usize, Vec<f64>) {
    let mut set = HashSet::new();
    let mut phis = Vec::new();
    for &v in order {
        set.insert(v);
        phis.push(conductance(edges, &set));
    }
    let mut best = 0;
    for (i, &p) in phis.iter().enumerate() {
        if p < phis[best] {
            best = i;
        }
    }
    (best + 1, phis)
}
