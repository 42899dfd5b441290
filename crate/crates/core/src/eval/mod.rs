//! Clustering-based evaluation: labelled datasets, distance matrices,
//! agglomerative clustering and precision/recall sweeps.

pub mod bench;
pub mod dataset;
pub mod hac;
pub mod matrix;
pub mod metrics;

pub use bench::{bench, BenchRow};
pub use dataset::{
    dedup_by_signature, enumerate_variants, generate_seed_cfg, EditOp, GenerateOptions,
    GroundTruthDataset, LabeledCfg, Variant, LABELS_FILE,
};
pub use hac::{hac_cluster, Dendrogram, Linkage, Merge, Partition};
pub use matrix::{distance_matrix, Comparator, ComparatorConfig, DistanceMatrix, Prepared};
pub use metrics::{
    f_score, precision_recall, threshold_sweep, thresholds, CdfPoint, ClusteringReport,
    DistanceRange, PairCategory, PairDistances, ReportRow, DEFAULT_STEP,
};
