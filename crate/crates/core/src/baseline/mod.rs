//! Reference comparators and oracles that sit beside the hashing pipeline.

pub mod mcs;
pub mod walks;

pub use mcs::{mcs_similarity, mcs_size, McsResult, DEFAULT_NODE_BUDGET, MAX_NODE_BUDGET};
pub use walks::{enumerate_walks_oracle, ORACLE_NODE_LIMIT};
