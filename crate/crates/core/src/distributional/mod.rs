//! Per-word distributional profiles: sentence co-occurrence context vectors,
//! skip-gram embeddings and category (domain) distributions, with the
//! similarity measures defined over each.

mod cooccur;
mod divergence;
mod domains;
mod embeddings;

pub use cooccur::{
    build_context_vectors, context_vectors_from_counts, jaccard, ContextVector, ContextVectors,
    CooccurrenceCounts,
};
pub(crate) use cooccur::jaccard_sorted;
pub use divergence::{distribution_similarity, js_distance, js_divergence};
pub use domains::{DomainDistribution, DomainTable};
pub use embeddings::{cosine, train_skipgram, EmbeddingTable, SkipGramConfig, TrainingReport};
