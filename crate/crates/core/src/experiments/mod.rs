//! Dataset construction, feature ranking and evaluation experiments.

pub mod dataset;
pub mod evaluation;
pub mod output;
pub mod ranking;

pub use dataset::{build_dataset, is_excluded_negative, Batch, DatasetSplits, EvalSet, SplitSpec};
pub use evaluation::{
    evaluate, incremental_eval, learning_curve, scatter_export, CurveRow, Metrics, Scatter, ScatterRow,
};
pub use ranking::{pearson, rank_features, top_features, RankedFeature};
