use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::store::{EntityId, KnowledgeGraph, PredicateId};

/// Out-degree histogram of one predicate and the weight derived from it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct PredicateStats {
    pub predicate: PredicateId,
    pub label: String,
    /// `d -> number of entities with exactly d out-links of this predicate`, d >= 1.
    pub degree_counts: BTreeMap<usize, usize>,
    /// Shannon entropy of the histogram, natural log.
    pub entropy: f64,
    pub weight: f64,
}

impl PredicateStats {
    /// Probability of each degree bucket, in ascending `d` order.
    pub fn probabilities(&self) -> Vec<(usize, f64)> {
        let total: usize = self.degree_counts.values().sum();
        self.degree_counts
            .iter()
            .map(|(&d, &c)| (d, c as f64 / total as f64))
            .collect()
    }
}

/// Entropy (nats) of the distribution proportional to `counts`. Zero counts are ignored.
pub fn histogram_entropy<I: IntoIterator<Item = usize>>(counts: I) -> f64 {
    let counts: Vec<usize> = counts.into_iter().filter(|&c| c > 0).collect();
    let total: usize = counts.iter().sum();
    if total == 0 {
        return 0.0;
    }
    let total = total as f64;
    let h: f64 = counts
        .iter()
        .map(|&c| {
            let p = c as f64 / total;
            -p * p.ln()
        })
        .sum();
    // a single bucket gives -1*ln(1) = -0.0
    h.max(0.0)
}

/// `2*sigmoid(1/entropy) - 1`, with the `entropy -> 0` limit of 1.
///
/// Uses the identity `2*sigmoid(x) - 1 = tanh(x/2)`.
pub fn entropy_weight(entropy: f64) -> f64 {
    if entropy <= 0.0 {
        1.0
    } else {
        (0.5 / entropy).tanh()
    }
}

/// One entry per predicate in the graph's dictionary, indexed by predicate id.
pub fn compute_predicate_stats(graph: &KnowledgeGraph) -> Vec<PredicateStats> {
    let m = graph.predicate_count();
    let mut hist: Vec<BTreeMap<usize, usize>> = vec![BTreeMap::new(); m];
    for e in 0..graph.entity_count() {
        let out = graph.out_edges(EntityId(e as u32));
        let mut i = 0;
        while i < out.len() {
            let p = out[i].0;
            let mut j = i;
            while j < out.len() && out[j].0 == p {
                j += 1;
            }
            *hist[p.index()].entry(j - i).or_insert(0) += 1;
            i = j;
        }
    }
    hist.into_iter()
        .enumerate()
        .map(|(i, degree_counts)| {
            let entropy = histogram_entropy(degree_counts.values().copied());
            let predicate = PredicateId(i as u32);
            PredicateStats {
                predicate,
                label: graph.predicate_label(predicate).to_owned(),
                degree_counts,
                entropy,
                weight: entropy_weight(entropy),
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sigmoid(x: f64) -> f64 {
        1.0 / (1.0 + (-x).exp())
    }

    #[test]
    fn degenerate_predicate_has_unit_weight() {
        // every holder has exactly three `p` links
        let g = KnowledgeGraph::from_triples([
            ("A", "p", "x1"),
            ("A", "p", "x2"),
            ("A", "p", "x3"),
            ("B", "p", "x1"),
            ("B", "p", "x2"),
            ("B", "p", "x4"),
        ]);
        let stats = compute_predicate_stats(&g);
        assert_eq!(stats[0].degree_counts, BTreeMap::from([(3, 2)]));
        assert_eq!(stats[0].entropy, 0.0);
        assert_eq!(stats[0].weight, 1.0);
    }

    #[test]
    fn half_and_half_histogram() {
        let g = KnowledgeGraph::from_triples([("A", "p", "x"), ("B", "p", "x"), ("B", "p", "y")]);
        let s = &compute_predicate_stats(&g)[0];
        assert!((s.entropy - std::f64::consts::LN_2).abs() < 1e-15);
        // direct evaluation of the sigmoid form
        let expected = 2.0 * sigmoid(1.0 / std::f64::consts::LN_2) - 1.0;
        assert!((s.weight - expected).abs() < 1e-15);
        // scalar evaluation gives 0.61774
        assert!((s.weight - 0.617743).abs() < 1e-6);
    }

    #[test]
    fn probabilities_sum_to_one() {
        let g = KnowledgeGraph::from_triples([
            ("A", "p", "x"),
            ("B", "p", "x"),
            ("B", "p", "y"),
            ("C", "p", "x"),
            ("C", "p", "y"),
            ("C", "p", "z"),
            ("C", "q", "z"),
        ]);
        for s in compute_predicate_stats(&g) {
            let total: f64 = s.probabilities().iter().map(|(_, p)| p).sum();
            assert!((total - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn weight_limit_and_monotonicity() {
        assert_eq!(entropy_weight(0.0), 1.0);
        assert!(entropy_weight(1e-6) > 0.999_999);
        let mut prev = entropy_weight(0.1);
        for k in 2..200 {
            let w = entropy_weight(0.1 * k as f64);
            assert!(w < prev && w > 0.0);
            prev = w;
        }
    }
}
