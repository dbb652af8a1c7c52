//! Statistical analyses over word–color embeddings: binned similarity
//! trends, concreteness regressions, PCA, gradient-boosted classification of
//! metaphorical pairs, and rank tests.

use thiserror::Error;

pub mod gbt;
pub mod metaphor;
pub mod pca;
pub mod rank;
pub mod regression;
pub mod similarity;
pub mod trend;

pub use gbt::{gbt_predict, gbt_train, GbtModel, GbtParams};
pub use metaphor::{metaphor_pipeline, ClassifierReport, LabeledPair, MetaphorOptions, MetaphorOutcome, PairLabel};
pub use pca::{pca_fit, pca_transform, PcaModel};
pub use rank::{jonckheere_terpstra, spearman, wilcoxon_rank_sum, JtResult, RankSumResult};
pub use regression::{compare_models, fit_regression, ModelKind, RegressionReport};
pub use similarity::PairSimilarityRecord;
pub use trend::{binned_trend, TrendPoint};

#[derive(Debug, Error, PartialEq)]
pub enum AnalysisError {
    #[error("insufficient data: need {needed}, got {got}")]
    InsufficientData { needed: usize, got: usize },
    #[error("singular design matrix (collinear inputs)")]
    SingularDesign,
    #[error("sample mismatch: {a} vs {b} observations")]
    SampleMismatch { a: usize, b: usize },
    #[error("degenerate labels: {positives} positive, {negatives} negative (need at least 2 of each)")]
    DegenerateLabels { positives: usize, negatives: usize },
    #[error("only {joined} pairs joinable ({dropped} dropped), need at least {needed}")]
    InsufficientJoin { joined: usize, dropped: usize, needed: usize },
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub(crate) fn mean(v: &[f64]) -> f64 {
    crate::embedding::pairwise_sum(v) / v.len() as f64
}

pub(crate) fn check_finite(name: &str, v: &[f64]) -> Result<(), AnalysisError> {
    match v.iter().position(|x| !x.is_finite()) {
        Some(i) => Err(AnalysisError::InvalidInput(format!("{name}[{i}] is not finite"))),
        None => Ok(()),
    }
}
