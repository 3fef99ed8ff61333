//! Shared snapshot, response cache and job table.

use std::collections::HashMap;
use std::num::NonZeroUsize;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex, OnceLock, RwLock};
use std::time::{Duration, Instant};

use kgreason::mining::{compute_predicate_stats, PredicateSimilarityModel, PredicateStats};
use kgreason::pairwise::OppositionTable;
use kgreason::store::KnowledgeGraph;
use lru::LruCache;

use crate::envelope::Outcome;

/// Everything a request is computed from. Immutable once shared.
pub struct Snapshot {
    pub graph: KnowledgeGraph,
    pub model: PredicateSimilarityModel,
    pub opposites: OppositionTable,
    mined: OnceLock<Vec<PredicateStats>>,
}

impl Snapshot {
    pub fn new(graph: KnowledgeGraph, model: PredicateSimilarityModel, opposites: OppositionTable) -> Self {
        Snapshot {
            graph,
            model,
            opposites,
            mined: OnceLock::new(),
        }
    }

    /// Entropy statistics of the loaded graph, computed on first use.
    pub fn mined_stats(&self) -> &[PredicateStats] {
        self.mined.get_or_init(|| compute_predicate_stats(&self.graph))
    }
}

#[derive(Debug, Clone)]
pub struct ServiceConfig {
    pub cache_size: usize,
    /// Requests running longer than this turn into polled jobs; zero makes every
    /// compute request a job.
    pub job_after: Duration,
}

impl Default for ServiceConfig {
    fn default() -> Self {
        ServiceConfig {
            cache_size: 1024,
            job_after: Duration::from_secs(2),
        }
    }
}

pub(crate) enum Job {
    Running(Instant),
    Done(Outcome),
}

pub struct AppState {
    snapshot: RwLock<Arc<Snapshot>>,
    cache: Option<Mutex<LruCache<String, Outcome>>>,
    jobs: Mutex<HashMap<u64, Job>>,
    next_job: AtomicU64,
    pub(crate) config: ServiceConfig,
}

impl AppState {
    pub fn new(snapshot: Snapshot, config: ServiceConfig) -> Arc<Self> {
        Arc::new(AppState {
            snapshot: RwLock::new(Arc::new(snapshot)),
            cache: NonZeroUsize::new(config.cache_size).map(|n| Mutex::new(LruCache::new(n))),
            jobs: Mutex::new(HashMap::new()),
            next_job: AtomicU64::new(1),
            config,
        })
    }

    pub fn snapshot(&self) -> Arc<Snapshot> {
        self.snapshot.read().expect("snapshot lock").clone()
    }

    /// Swaps in a new graph and model. In-flight requests keep the old one;
    /// the cache is dropped because its entries describe the old snapshot.
    pub fn replace(&self, snapshot: Snapshot) {
        let mut guard = self.snapshot.write().expect("snapshot lock");
        *guard = Arc::new(snapshot);
        if let Some(cache) = &self.cache {
            cache.lock().expect("cache lock").clear();
        }
    }

    pub fn cached(&self, key: &str) -> Option<Outcome> {
        self.cache.as_ref()?.lock().expect("cache lock").get(key).cloned()
    }

    /// Caches `outcome` unless the snapshot it was computed from has been replaced.
    pub fn remember(&self, key: String, outcome: &Outcome, from: &Arc<Snapshot>) {
        if let Some(cache) = &self.cache {
            if outcome.cacheable() && Arc::ptr_eq(&self.snapshot(), from) {
                cache.lock().expect("cache lock").put(key, outcome.clone());
            }
        }
    }

    pub fn cache_len(&self) -> usize {
        self.cache.as_ref().map_or(0, |c| c.lock().expect("cache lock").len())
    }

    pub(crate) fn start_job(&self) -> u64 {
        let id = self.next_job.fetch_add(1, Ordering::Relaxed);
        self.jobs.lock().expect("job lock").insert(id, Job::Running(Instant::now()));
        id
    }

    pub(crate) fn finish_job(&self, id: u64, outcome: Outcome) {
        self.jobs.lock().expect("job lock").insert(id, Job::Done(outcome));
    }

    /// `None` for an unknown id; `Err(elapsed)` while running.
    pub(crate) fn job(&self, id: u64) -> Option<Result<Outcome, Duration>> {
        match self.jobs.lock().expect("job lock").get(&id)? {
            Job::Running(start) => Some(Err(start.elapsed())),
            Job::Done(o) => Some(Ok(o.clone())),
        }
    }
}
