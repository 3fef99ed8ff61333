//! Explicit arc lists as a path-search graph.

use kgreason::segment::{Arc, ArcSource, Hop};
use kgreason::store::{EntityId, PredicateId};

/// Arcs listed as `(from, to, cost)`; the predicate id is the arc index.
pub struct Arcs(pub Vec<(u32, u32, f64)>);

impl Arcs {
    fn collect(&self, buf: &mut Vec<Arc>, keep: impl Fn(u32, u32) -> bool) {
        for (i, &(a, b, c)) in self.0.iter().enumerate() {
            if keep(a, b) {
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

impl ArcSource for Arcs {
    fn arcs(&self, node: EntityId, buf: &mut Vec<Arc>) {
        self.collect(buf, |a, _| a == node.0);
    }

    fn arcs_into(&self, node: EntityId, buf: &mut Vec<Arc>) {
        self.collect(buf, |_, b| b == node.0);
    }
}
