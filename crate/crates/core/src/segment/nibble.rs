//! PageRank-Nibble on the entropy-weighted, undirected view of the graph.

use std::collections::{HashMap, HashSet, VecDeque};

use serde::{Deserialize, Serialize};

use super::{KnowledgeSegment, Provenance};
use crate::error::{Error, Result};
use crate::mining::{PredicateSimilarityModel, PredicateStats};
use crate::store::{EntityId, KnowledgeGraph, PredicateId};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", default)]
pub struct NibbleParams {
    /// Teleport probability of the lazy walk.
    pub alpha: f64,
    /// Push threshold: pushing stops once `r(v) < epsilon * deg(v)` everywhere.
    pub epsilon: f64,
    pub max_size: usize,
}

impl Default for NibbleParams {
    fn default() -> Self {
        NibbleParams {
            alpha: 0.15,
            epsilon: 1e-5,
            max_size: 50,
        }
    }
}

impl NibbleParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "alpha must be in (0, 1), got {}",
                self.alpha
            )));
        }
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "epsilon must be positive, got {}",
                self.epsilon
            )));
        }
        if self.max_size == 0 {
            return Err(Error::InvalidParameter("max_size must be at least 1".into()));
        }
        Ok(())
    }
}

/// Undirected weighted view: each triple `(s, p, o)` with `s != o` is an
/// undirected edge of weight `w(p)`. Self-loops are dropped.
pub struct WeightedView<'g> {
    graph: &'g KnowledgeGraph,
    weights: Vec<f64>,
    total_volume: f64,
}

impl<'g> WeightedView<'g> {
    /// `weights` is indexed by graph predicate id; all entries must be positive.
    pub fn new(graph: &'g KnowledgeGraph, weights: Vec<f64>) -> Self {
        assert_eq!(weights.len(), graph.predicate_count());
        let total_volume = 2.0
            * graph
                .triples()
                .filter(|t| t.subject != t.object)
                .map(|t| weights[t.predicate.index()])
                .sum::<f64>();
        WeightedView {
            graph,
            weights,
            total_volume,
        }
    }

    pub fn from_stats(graph: &'g KnowledgeGraph, stats: &[PredicateStats]) -> Self {
        let w = (0..graph.predicate_count())
            .map(|i| stats.get(i).map_or(1.0, |s| s.weight))
            .collect();
        Self::new(graph, w)
    }

    /// Weights looked up by predicate label; predicates unknown to the model weigh 1.
    pub fn from_model(graph: &'g KnowledgeGraph, model: &PredicateSimilarityModel) -> Self {
        let w = graph
            .predicates()
            .labels()
            .iter()
            .map(|l| model.weight(l))
            .collect();
        Self::new(graph, w)
    }

    pub fn uniform(graph: &'g KnowledgeGraph) -> Self {
        Self::new(graph, vec![1.0; graph.predicate_count()])
    }

    pub fn graph(&self) -> &'g KnowledgeGraph {
        self.graph
    }

    pub fn weight(&self, p: PredicateId) -> f64 {
        self.weights[p.index()]
    }

    /// Sum of all weighted degrees (twice the total edge weight).
    pub fn total_volume(&self) -> f64 {
        self.total_volume
    }

    pub fn neighbors(&self, v: EntityId) -> impl Iterator<Item = (EntityId, f64)> + '_ {
        self.graph
            .out_edges(v)
            .iter()
            .chain(self.graph.in_edges(v))
            .filter(move |&&(_, u)| u != v)
            .map(|&(p, u)| (u, self.weights[p.index()]))
    }

    pub fn degree(&self, v: EntityId) -> f64 {
        self.neighbors(v).map(|(_, w)| w).sum()
    }
}

/// Sparse approximate personalized PageRank and its residual.
#[derive(Debug, Clone, Default)]
pub struct PprVector {
    pub p: HashMap<EntityId, f64>,
    pub r: HashMap<EntityId, f64>,
    pub pushes: usize,
}

impl PprVector {
    /// `max_v r(v) / deg(v)`; below epsilon at termination.
    pub fn max_scaled_residual(&self, view: &WeightedView) -> f64 {
        self.r
            .iter()
            .map(|(&v, &r)| {
                let d = view.degree(v);
                if d > 0.0 {
                    r / d
                } else if r > 0.0 {
                    f64::INFINITY
                } else {
                    0.0
                }
            })
            .fold(0.0, f64::max)
    }
}

/// Andersen-Chung-Lang push for the lazy walk with teleport `alpha`.
///
/// The seed must have positive weighted degree.
pub fn approximate_ppr(view: &WeightedView, seed: EntityId, alpha: f64, epsilon: f64) -> PprVector {
    let mut out = PprVector::default();
    let mut degree_cache: HashMap<EntityId, f64> = HashMap::new();
    let mut degree = |v: EntityId| *degree_cache.entry(v).or_insert_with(|| view.degree(v));
    if degree(seed) <= 0.0 {
        out.r.insert(seed, 1.0);
        return out;
    }
    out.r.insert(seed, 1.0);
    let mut queue = VecDeque::from([seed]);
    let mut queued: HashSet<EntityId> = HashSet::from([seed]);
    while let Some(u) = queue.pop_front() {
        queued.remove(&u);
        let du = degree(u);
        let ru = out.r.get(&u).copied().unwrap_or(0.0);
        if ru < epsilon * du {
            continue;
        }
        out.pushes += 1;
        *out.p.entry(u).or_insert(0.0) += alpha * ru;
        let keep = (1.0 - alpha) * ru / 2.0;
        out.r.insert(u, keep);
        for (v, w) in view.neighbors(u) {
            let rv = out.r.entry(v).or_insert(0.0);
            *rv += keep * w / du;
            let rv = *rv;
            if !queued.contains(&v) && rv >= epsilon * degree(v) {
                queued.insert(v);
                queue.push_back(v);
            }
        }
        if !queued.contains(&u) && keep >= epsilon * du {
            queued.insert(u);
            queue.push_back(u);
        }
    }
    out
}

/// Result of sweeping the PPR vector.
#[derive(Debug, Clone)]
pub struct Sweep {
    /// Nodes by decreasing `p(v) / deg(v)` (ties by entity id).
    pub order: Vec<EntityId>,
    /// Conductance of each prefix `order[..=i]`, infinite when undefined.
    pub conductance: Vec<f64>,
    /// Length of the minimum-conductance prefix.
    pub best_len: usize,
}

impl Sweep {
    pub fn best_conductance(&self) -> f64 {
        self.conductance[self.best_len - 1]
    }
}

/// Sweeps prefixes of the degree-normalized PPR order, up to `max_size` nodes.
pub fn sweep_cut(view: &WeightedView, ppr: &PprVector, max_size: usize) -> Sweep {
    let mut ranked: Vec<(EntityId, f64)> = ppr
        .p
        .iter()
        .filter(|(_, &p)| p > 0.0)
        .map(|(&v, &p)| (v, p / view.degree(v)))
        .collect();
    ranked.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    ranked.truncate(max_size);
    let order: Vec<EntityId> = ranked.into_iter().map(|(v, _)| v).collect();

    let total = view.total_volume();
    let mut inside: HashSet<EntityId> = HashSet::new();
    let mut volume = 0.0;
    let mut internal = 0.0;
    let mut conductance = Vec::with_capacity(order.len());
    for &v in &order {
        volume += view.degree(v);
        internal += view
            .neighbors(v)
            .filter(|(u, _)| inside.contains(u))
            .map(|(_, w)| w)
            .sum::<f64>();
        inside.insert(v);
        let cut = volume - 2.0 * internal;
        let denom = volume.min(total - volume);
        // the full vertex set leaves only rounding error in `total - volume`
        conductance.push(if denom > 1e-12 * total { cut.max(0.0) / denom } else { f64::INFINITY });
    }
    let mut best_len = 1;
    for (i, &phi) in conductance.iter().enumerate() {
        if phi < conductance[best_len - 1] {
            best_len = i + 1;
        }
    }
    Sweep {
        order,
        conductance,
        best_len,
    }
}

/// Node-specific segment plus the diagnostics of the run that produced it.
#[derive(Debug, Clone)]
pub struct NodeSegment {
    pub segment: KnowledgeSegment,
    pub conductance: f64,
    pub pushes: usize,
    pub max_scaled_residual: f64,
}

/// Local cluster around `seed`, induced on the minimum-conductance sweep prefix.
///
/// An isolated seed yields `{seed}` with [`KnowledgeSegment::empty`] set.
pub fn extract_node_segment(view: &WeightedView, seed: &str, params: &NibbleParams) -> Result<NodeSegment> {
    params.validate()?;
    let graph = view.graph();
    let s = graph.entity(seed)?;
    let provenance = Provenance::Node {
        seed: graph.entity_label(s).to_owned(),
    };
    if view.degree(s) <= 0.0 {
        let mut segment = KnowledgeSegment::new(provenance);
        segment.nodes.push(s);
        segment.empty = true;
        return Ok(NodeSegment {
            segment,
            conductance: f64::INFINITY,
            pushes: 0,
            max_scaled_residual: 0.0,
        });
    }
    let ppr = approximate_ppr(view, s, params.alpha, params.epsilon);
    let sweep = sweep_cut(view, &ppr, params.max_size);
    let mut nodes: Vec<EntityId> = sweep.order[..sweep.best_len].to_vec();
    if !nodes.contains(&s) {
        // the seed always carries the most mass; keep it even under ties
        nodes.insert(0, s);
        nodes.truncate(params.max_size);
    }
    let segment = KnowledgeSegment::induced(graph, nodes, |p| view.weight(p), provenance);
    Ok(NodeSegment {
        conductance: sweep.best_conductance(),
        pushes: ppr.pushes,
        max_scaled_residual: ppr.max_scaled_residual(view),
        segment,
    })
}
