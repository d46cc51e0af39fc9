//! Cluster profiling: PCA biplots, per-cluster box statistics, expression
//! markers and cross-clustering matching into behavioural groups.

mod groups;
mod markers;
mod pca;
mod summary;
pub mod svg;

pub use groups::{jaccard, match_groups, BehaviouralGroup, ClusterRef, GroupLabel, SourcedProfile};
pub use markers::{expression_markers, format_signature, ExpressionProfile, Sign, Signature};
pub use pca::{pca_project, PcaProjection};
pub use summary::{cluster_summary, global_summary, quantile, BoxRow, BoxStats};
