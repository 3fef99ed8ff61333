//! Yen's k shortest simple paths over a lazily expanded multigraph.

use std::cmp::{Ordering, Reverse};
use std::collections::{BTreeSet, BinaryHeap, HashSet};

use crate::store::{EntityId, PredicateId, Triple};

/// One traversal step. `reversed` marks a triple walked object -> subject.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Hop {
    pub from: EntityId,
    pub to: EntityId,
    pub predicate: PredicateId,
    pub reversed: bool,
}

impl Hop {
    /// The underlying graph triple.
    pub fn triple(&self) -> Triple {
        if self.reversed {
            Triple::new(self.to, self.predicate, self.from)
        } else {
            Triple::new(self.from, self.predicate, self.to)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Arc {
    pub hop: Hop,
    /// Positive and finite.
    pub cost: f64,
}

/// Source of arcs; implementors decide direction and cost policy.
pub trait ArcSource {
    /// Arcs with `hop.from == node`.
    fn arcs(&self, node: EntityId, buf: &mut Vec<Arc>);
    /// Arcs with `hop.to == node`, the same arcs `arcs` yields from their tails.
    fn arcs_into(&self, node: EntityId, buf: &mut Vec<Arc>);
}

/// A simple path with per-hop costs.
#[derive(Debug, Clone, PartialEq)]
pub struct Path {
    pub nodes: Vec<EntityId>,
    pub hops: Vec<Hop>,
    pub hop_costs: Vec<f64>,
    /// Left-to-right sum of `hop_costs`.
    pub cost: f64,
}

impl Path {
    fn from_hops(source: EntityId, hops: Vec<Hop>, hop_costs: Vec<f64>) -> Path {
        let mut nodes = Vec::with_capacity(hops.len() + 1);
        nodes.push(source);
        nodes.extend(hops.iter().map(|h| h.to));
        let cost = hop_costs.iter().fold(0.0, |acc, c| acc + c);
        Path {
            nodes,
            hops,
            hop_costs,
            cost,
        }
    }

    pub fn len(&self) -> usize {
        self.hops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.hops.is_empty()
    }

    /// Candidate order: cost, then node sequence, then hop sequence.
    fn order(&self, other: &Path) -> Ordering {
        self.cost
            .total_cmp(&other.cost)
            .then_with(|| self.nodes.cmp(&other.nodes))
            .then_with(|| self.hops.cmp(&other.hops))
    }
}

struct Candidate(Path);

impl PartialEq for Candidate {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Candidate {}
impl PartialOrd for Candidate {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Candidate {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.order(&other.0)
    }
}

#[derive(PartialEq)]
struct HeapEntry(f64, EntityId);
impl Eq for HeapEntry {}
impl PartialOrd for HeapEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for HeapEntry {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0).then(self.1.cmp(&other.1))
    }
}

/// Per-node state of one search direction. `prev` points toward the root of that direction.
#[derive(Clone, Copy)]
struct Slot {
    dist: f64,
    prev: Hop,
    prev_cost: f64,
    /// Round in which `dist`/`done` were last reset.
    stamp: u32,
    /// Round in which the node is banned; only the forward slots use it.
    banned: u32,
    done: bool,
}

const EMPTY_SLOT: Slot = Slot {
    dist: f64::INFINITY,
    prev: Hop {
        from: EntityId(0),
        to: EntityId(0),
        predicate: PredicateId(0),
        reversed: false,
    },
    prev_cost: 0.0,
    stamp: 0,
    banned: 0,
    done: false,
};

#[derive(Default)]
struct Side {
    slots: Vec<Slot>,
    heap: BinaryHeap<Reverse<HeapEntry>>,
}

impl Side {
    fn slot(&mut self, v: EntityId, round: u32) -> &mut Slot {
        let i = v.index();
        if self.slots.len() <= i {
            self.slots.resize(i + 1, EMPTY_SLOT);
        }
        let slot = &mut self.slots[i];
        if slot.stamp != round {
            slot.stamp = round;
            slot.dist = f64::INFINITY;
            slot.done = false;
        }
        slot
    }

    fn dist(&self, v: EntityId, round: u32) -> f64 {
        match self.slots.get(v.index()) {
            Some(s) if s.stamp == round => s.dist,
            _ => f64::INFINITY,
        }
    }

    fn is_banned(&self, v: EntityId, round: u32) -> bool {
        self.slots.get(v.index()).is_some_and(|s| s.banned == round)
    }

    fn top(&self) -> f64 {
        self.heap.peek().map_or(f64::INFINITY, |Reverse(e)| e.0)
    }
}

/// Bidirectional Dijkstra scratch space indexed by entity id, reused across
/// the spur searches of one Yen run. A slot is live only when its stamp
/// equals the current round.
#[derive(Default)]
struct Search {
    round: u32,
    fwd: Side,
    bwd: Side,
    buf: Vec<Arc>,
}

impl Search {
    /// Shortest path from `source` to `target` avoiding `banned_nodes` and `banned_hops`.
    fn run<G: ArcSource>(
        &mut self,
        g: &G,
        source: EntityId,
        target: EntityId,
        banned_nodes: &[EntityId],
        banned_hops: &HashSet<Hop>,
    ) -> Option<(Vec<Hop>, Vec<f64>)> {
        self.round = self.round.wrapping_add(1);
        if self.round == 0 {
            self.fwd.slots.fill(EMPTY_SLOT);
            self.bwd.slots.fill(EMPTY_SLOT);
            self.round = 1;
        }
        let round = self.round;
        for &v in banned_nodes {
            self.fwd.slot(v, round).banned = round;
        }
        self.fwd.heap.clear();
        self.bwd.heap.clear();
        self.fwd.slot(source, round).dist = 0.0;
        self.bwd.slot(target, round).dist = 0.0;
        self.fwd.heap.push(Reverse(HeapEntry(0.0, source)));
        self.bwd.heap.push(Reverse(HeapEntry(0.0, target)));
        let mut best = f64::INFINITY;
        let mut meet: Option<Arc> = None;
        let mut buf = std::mem::take(&mut self.buf);
        loop {
            let (tf, tb) = (self.fwd.top(), self.bwd.top());
            if tf.is_infinite() || tb.is_infinite() || tf + tb >= best {
                break;
            }
            let forward = tf <= tb;
            let (this, other) = if forward {
                (&mut self.fwd, &self.bwd)
            } else {
                (&mut self.bwd, &self.fwd)
            };
            let Some(Reverse(HeapEntry(d, u))) = this.heap.pop() else {
                break;
            };
            let su = this.slot(u, round);
            if su.done {
                continue;
            }
            su.done = true;
            buf.clear();
            if forward {
                g.arcs(u, &mut buf);
            } else {
                g.arcs_into(u, &mut buf);
            }
            for arc in &buf {
                let v = if forward { arc.hop.to } else { arc.hop.from };
                let banned = if forward {
                    this.is_banned(v, round)
                } else {
                    other.is_banned(v, round)
                };
                if banned || (!banned_hops.is_empty() && banned_hops.contains(&arc.hop)) {
                    continue;
                }
                let nd = d + arc.cost;
                let sv = this.slot(v, round);
                if sv.done {
                    continue;
                }
                if nd < sv.dist || (nd == sv.dist && arc.hop < sv.prev) {
                    sv.dist = nd;
                    sv.prev = arc.hop;
                    sv.prev_cost = arc.cost;
                    this.heap.push(Reverse(HeapEntry(nd, v)));
                }
                let through = nd + other.dist(v, round);
                if through < best {
                    best = through;
                    meet = Some(*arc);
                }
            }
        }
        self.buf = buf;
        let meet = meet?;
        let mut hops = Vec::new();
        let mut costs = Vec::new();
        let mut at = meet.hop.from;
        while at != source {
            let slot = &self.fwd.slots[at.index()];
            hops.push(slot.prev);
            costs.push(slot.prev_cost);
            at = slot.prev.from;
        }
        hops.reverse();
        costs.reverse();
        hops.push(meet.hop);
        costs.push(meet.cost);
        let mut at = meet.hop.to;
        while at != target {
            let slot = &self.bwd.slots[at.index()];
            hops.push(slot.prev);
            costs.push(slot.prev_cost);
            at = slot.prev.to;
        }
        Some((hops, costs))
    }
}

/// Up to `k` simple paths from `source` to `target` in nondecreasing cost.
///
/// Equal-cost candidates are ordered by node sequence, then hop sequence.
/// `source == target` yields the single empty path.
pub fn k_shortest_paths<G: ArcSource>(g: &G, source: EntityId, target: EntityId, k: usize) -> Vec<Path> {
    if k == 0 {
        return Vec::new();
    }
    if source == target {
        return vec![Path::from_hops(source, Vec::new(), Vec::new())];
    }
    let mut search = Search::default();
    let Some((hops, costs)) = search.run(g, source, target, &[], &HashSet::new()) else {
        return Vec::new();
    };
    let mut accepted = vec![Path::from_hops(source, hops, costs)];
    let mut candidates: BTreeSet<Candidate> = BTreeSet::new();
    let mut seen: HashSet<Vec<Hop>> = HashSet::from([accepted[0].hops.clone()]);

    while accepted.len() < k {
        let last = accepted.last().expect("non-empty").clone();
        for i in 0..last.hops.len() {
            let spur = last.nodes[i];
            let root_hops = &last.hops[..i];
            let banned_hops: HashSet<Hop> = accepted
                .iter()
                .filter(|p| p.hops.len() > i && &p.hops[..i] == root_hops)
                .map(|p| p.hops[i])
                .collect();
            if let Some((spur_hops, spur_costs)) = search.run(g, spur, target, &last.nodes[..i], &banned_hops)
            {
                let mut hops = root_hops.to_vec();
                hops.extend(spur_hops);
                let mut costs = last.hop_costs[..i].to_vec();
                costs.extend(spur_costs);
                if seen.insert(hops.clone()) {
                    candidates.insert(Candidate(Path::from_hops(source, hops, costs)));
                }
            }
        }
        match candidates.pop_first() {
            Some(Candidate(p)) => accepted.push(p),
            None => break,
        }
    }
    accepted
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Directed graph given as `(from, to, cost)` with predicate = arc index.
    struct Toy(Vec<(u32, u32, f64)>);

    impl ArcSource for Toy {
        fn arcs(&self, node: EntityId, buf: &mut Vec<Arc>) {
            for (i, &(a, b, c)) in self.0.iter().enumerate() {
                if a == node.0 {
                    buf.push(Arc {
                        hop: Hop {
                            from: EntityId(a),
                            to: EntityId(b),
                            predicate: PredicateId(i as u32),
                            reversed: false,
                        },
                        cost: c,
                    });
                }
            }
        }

        fn arcs_into(&self, node: EntityId, buf: &mut Vec<Arc>) {
            for (i, &(a, b, c)) in self.0.iter().enumerate() {
                if b == node.0 {
                    buf.push(Arc {
                        hop: Hop {
                            from: EntityId(a),
                            to: EntityId(b),
                            predicate: PredicateId(i as u32),
                            reversed: false,
                        },
                        cost: c,
                    });
                }
            }
        }
    }

    fn node_seqs(paths: &[Path]) -> Vec<Vec<u32>> {
        paths.iter().map(|p| p.nodes.iter().map(|e| e.0).collect()).collect()
    }

    #[test]
    fn classic_yen_example() {
        // C=0 D=1 E=2 F=3 G=4 H=5
        let g = Toy(vec![
            (0, 1, 3.0),
            (0, 2, 2.0),
            (1, 3, 4.0),
            (2, 1, 1.0),
            (2, 3, 2.0),
            (2, 4, 3.0),
            (3, 4, 2.0),
            (3, 5, 1.0),
            (4, 5, 2.0),
        ]);
        let paths = k_shortest_paths(&g, EntityId(0), EntityId(5), 3);
        assert_eq!(node_seqs(&paths), vec![vec![0, 2, 3, 5], vec![0, 2, 4, 5], vec![0, 1, 3, 5]]);
        let costs: Vec<f64> = paths.iter().map(|p| p.cost).collect();
        assert_eq!(costs, vec![5.0, 7.0, 8.0]);
    }

    #[test]
    fn parallel_arcs_are_distinct_paths() {
        let g = Toy(vec![(0, 1, 1.0), (0, 1, 2.0), (1, 2, 1.0)]);
        let paths = k_shortest_paths(&g, EntityId(0), EntityId(2), 5);
        assert_eq!(paths.len(), 2);
        assert_eq!(paths[0].cost, 2.0);
        assert_eq!(paths[1].cost, 3.0);
    }

    #[test]
    fn unreachable_and_trivial() {
        let g = Toy(vec![(0, 1, 1.0)]);
        assert!(k_shortest_paths(&g, EntityId(1), EntityId(0), 3).is_empty());
        let same = k_shortest_paths(&g, EntityId(0), EntityId(0), 3);
        assert_eq!(same.len(), 1);
        assert!(same[0].is_empty());
        assert_eq!(same[0].cost, 0.0);
        assert!(k_shortest_paths(&g, EntityId(0), EntityId(1), 0).is_empty());
    }
}
