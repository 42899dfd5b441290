//! Topology-aware hashing for control flow graph similarity.
//!
//! The pipeline turns a [`Cfg`] into a sparse [`GraphSignature`] of blended
//! n-gram features over degree-based node types, compares signatures exactly
//! ([`exact_similarity`]) or compresses them into fixed-size [`FuzzyHash`]
//! values by random hyperplane projection ([`hash_similarity`]).
//!
//! [`eval`] holds the clustering-based evaluation harness and [`baseline`] a
//! maximum common subgraph comparator plus a brute-force walk oracle.

pub mod baseline;
pub mod cfg;
pub mod error;
pub mod eval;
pub mod features;
pub mod fuzzy;
pub mod similarity;

#[cfg(test)]
pub(crate) mod testutil;

pub use cfg::{parse_cfg, serialize_cfg, Cfg, DegreePair, Format, NodeId};
pub use error::{Error, Result};
pub use features::{
    abstract_node, canonical_key, decode_key, extract_features, feature_space_size,
    is_valid_feature, GraphSignature, NGramFeature, NodeType, DEFAULT_GRAM,
};
pub use fuzzy::{
    decode_hash, decode_hash_with, encode_hash, estimate_cosine, gaussian_component,
    hamming_similarity, hash_similarity, project, FuzzyHash, ProjectionParams, DEFAULT_BITS,
    DEFAULT_SEED,
};
pub use similarity::{cosine, exact_distance, exact_similarity, rectification, SimilarityScore};
