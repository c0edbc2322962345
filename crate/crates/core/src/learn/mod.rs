//! Classifiers, oversampling, metrics and the evaluation protocols.

pub mod forest;
pub mod metrics;
pub mod protocol;
pub mod smote;
pub mod tree;

pub use forest::{fit_forest, ForestModel, ForestParams};
pub use metrics::{
    auc, confusion, prf, roc_points, slice_from_predictions, slice_from_scores, SliceMetrics,
};
pub use protocol::{
    eval_kfold, eval_temporal, stratified_folds, BaselineMethod, CandidatePool, ClassifierKind,
    ClassifierParams, EvalReport, KfoldOutcome, KfoldParams, MonthDetail, TemporalOutcome,
    TemporalParams,
};
pub use smote::smote;
pub use tree::{fit_tree, TreeModel, TreeParams};
