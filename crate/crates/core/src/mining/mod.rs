//! Offline mining: predicate entropy weights and TF-IDF predicate similarity.

mod cooccurrence;
mod entropy;
mod model;

pub use cooccurrence::{compute_cooccurrence, CooccurrenceMode, SquareMatrix};
pub use entropy::{compute_predicate_stats, entropy_weight, histogram_entropy, PredicateStats};
pub use model::{compute_similarity_model, PredicateSimilarityModel, MODEL_FORMAT, MODEL_VERSION};
