//! Metaphorical vs. literal adjective–noun classification from color and
//! text embeddings, swept over PCA dimension.

use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::gbt::{accuracy, gbt_predict, gbt_train, GbtParams};
use super::pca::{pca_fit, pca_transform};
use super::rank::{wilcoxon_rank_sum, RankSumResult};
use super::AnalysisError;
use crate::embedding::js_divergence;
use crate::store::{EmbeddingTable, StoreError, TextVectorTable};

pub const MIN_JOINED_PAIRS: usize = 50;
pub const TEST_FRACTION: f64 = 0.2;
pub const COLOR_BACKEND: &str = "color";
pub const TEXT_BACKEND: &str = "text";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PairLabel {
    Metaphorical,
    Literal,
}

impl PairLabel {
    pub fn is_metaphorical(self) -> bool {
        self == PairLabel::Metaphorical
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabeledPair {
    pub adjective: String,
    pub noun: String,
    pub label: PairLabel,
}

#[derive(Debug, Deserialize)]
struct PairRow {
    adjective: String,
    noun: String,
    label: String,
}

/// Reads `adjective,noun,label` CSV; labels are matched case-insensitively.
pub fn parse_labeled_pairs(text: &str) -> Result<Vec<LabeledPair>, StoreError> {
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
    let mut out = Vec::new();
    for (i, row) in reader.deserialize::<PairRow>().enumerate() {
        let line = i + 2;
        let row = row.map_err(|e| StoreError::Parse { line, message: e.to_string() })?;
        let label = match row.label.to_ascii_lowercase().as_str() {
            "metaphorical" => PairLabel::Metaphorical,
            "literal" => PairLabel::Literal,
            other => return Err(StoreError::Parse { line, message: format!("unknown label {other:?}") }),
        };
        out.push(LabeledPair { adjective: row.adjective.to_lowercase(), noun: row.noun.to_lowercase(), label });
    }
    Ok(out)
}

pub fn load_labeled_pairs(path: &Path) -> Result<Vec<LabeledPair>, StoreError> {
    let text = std::fs::read_to_string(path).map_err(|e| StoreError::Io { path: path.display().to_string(), source: e })?;
    parse_labeled_pairs(&text)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassifierReport {
    pub embedding_name: String,
    pub pca_dims: usize,
    /// Dimension actually used after truncation to the numerical rank.
    pub effective_dims: usize,
    pub train_accuracy: f64,
    pub test_accuracy: f64,
    pub seed: u64,
}

#[derive(Debug, Clone)]
pub struct MetaphorOptions {
    pub dims_sweep: Vec<usize>,
    pub seed: u64,
    pub gbt: GbtParams,
    pub min_pairs: usize,
}

impl Default for MetaphorOptions {
    fn default() -> Self {
        Self {
            dims_sweep: vec![1, 2, 4, 6, 8, 10, 12, 14, 16],
            seed: 0,
            gbt: GbtParams::default(),
            min_pairs: MIN_JOINED_PAIRS,
        }
    }
}

/// Per-pair similarities of the joined pairs.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairScore {
    pub adjective: String,
    pub noun: String,
    pub label: PairLabel,
    pub js: f64,
    pub cos: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct MetaphorOutcome {
    pub reports: Vec<ClassifierReport>,
    pub joined: usize,
    pub dropped: usize,
    pub n_train: usize,
    pub n_test: usize,
    pub scores: Vec<PairScore>,
    /// Literal vs. metaphorical JS divergence.
    pub js_test: RankSumResult,
    /// Literal vs. metaphorical cosine similarity.
    pub cos_test: RankSumResult,
}

/// Stratified split: each class is shuffled (literal first, one RNG) and
/// its first `round(test_fraction · n)` members go to the test set. Both
/// index lists come back sorted.
pub fn stratified_split(labels: &[bool], test_fraction: f64, seed: u64) -> (Vec<usize>, Vec<usize>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut train, mut test) = (Vec::new(), Vec::new());
    for class in [false, true] {
        let mut idx: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == class).collect();
        idx.shuffle(&mut rng);
        let n_test = (test_fraction * idx.len() as f64).round() as usize;
        test.extend_from_slice(&idx[..n_test]);
        train.extend_from_slice(&idx[n_test..]);
    }
    train.sort_unstable();
    test.sort_unstable();
    (train, test)
}

/// Color pair features: both words' mean distributions and their JS
/// divergence.
pub fn color_pair_features(colors: &EmbeddingTable, adjective: &str, noun: &str) -> Option<Vec<f64>> {
    let (a, n) = (colors.get(adjective)?, colors.get(noun)?);
    let mut f = Vec::with_capacity(17);
    f.extend_from_slice(a.jzazbz_dist.mass());
    f.extend_from_slice(n.jzazbz_dist.mass());
    f.push(js_divergence(&a.jzazbz_dist, &n.jzazbz_dist));
    Some(f)
}

/// Text pair features: adjective vector minus noun vector.
pub fn text_pair_features(text: &TextVectorTable, adjective: &str, noun: &str) -> Option<Vec<f64>> {
    let (a, n) = (text.get(adjective)?, text.get(noun)?);
    Some(a.as_slice().iter().zip(n.as_slice()).map(|(x, y)| x - y).collect())
}

fn select(rows: &[Vec<f64>], idx: &[usize]) -> Vec<Vec<f64>> {
    idx.iter().map(|&i| rows[i].clone()).collect()
}

fn sweep(
    name: &str,
    rows: &[Vec<f64>],
    labels: &[bool],
    train: &[usize],
    test: &[usize],
    opts: &MetaphorOptions,
) -> Result<Vec<ClassifierReport>, AnalysisError> {
    let (xtr, xte) = (select(rows, train), select(rows, test));
    let ytr: Vec<bool> = train.iter().map(|&i| labels[i]).collect();
    let yte: Vec<bool> = test.iter().map(|&i| labels[i]).collect();
    let model = pca_fit(&xtr)?;
    let mut out = Vec::with_capacity(opts.dims_sweep.len());
    for &d in &opts.dims_sweep {
        let ptr = pca_transform(&model, &xtr, d)?;
        let pte = pca_transform(&model, &xte, d)?;
        let params = GbtParams { seed: opts.seed, ..opts.gbt.clone() };
        let gbt = gbt_train(&ptr, &ytr, &params)?;
        out.push(ClassifierReport {
            embedding_name: name.to_string(),
            pca_dims: d,
            effective_dims: model.effective_dims(d),
            train_accuracy: accuracy(&gbt_predict(&gbt, &ptr), &ytr),
            test_accuracy: accuracy(&gbt_predict(&gbt, &pte), &yte),
            seed: opts.seed,
        });
    }
    Ok(out)
}

/// For each backend (color, then text) and each swept dimension: PCA fitted
/// on the training split, boosted trees trained, accuracies reported.
pub fn metaphor_pipeline(
    pairs: &[LabeledPair],
    colors: &EmbeddingTable,
    text: &TextVectorTable,
    opts: &MetaphorOptions,
) -> Result<MetaphorOutcome, AnalysisError> {
    if opts.dims_sweep.is_empty() || opts.dims_sweep.contains(&0) {
        return Err(AnalysisError::InvalidInput("dims sweep must be non-empty and positive".into()));
    }
    let mut color_rows = Vec::new();
    let mut text_rows = Vec::new();
    let mut labels = Vec::new();
    let mut scores = Vec::new();
    for p in pairs {
        let (a, n) = (p.adjective.to_lowercase(), p.noun.to_lowercase());
        let (Some(c), Some(t)) = (color_pair_features(colors, &a, &n), text_pair_features(text, &a, &n)) else {
            continue;
        };
        let cos = text.get(&a).and_then(|u| u.cosine(text.get(&n)?).ok()).unwrap_or(f64::NAN);
        scores.push(PairScore { adjective: a, noun: n, label: p.label, js: c[16], cos });
        color_rows.push(c);
        text_rows.push(t);
        labels.push(p.label.is_metaphorical());
    }
    let joined = labels.len();
    let dropped = pairs.len() - joined;
    if joined < opts.min_pairs {
        return Err(AnalysisError::InsufficientJoin { joined, dropped, needed: opts.min_pairs });
    }
    let (train, test) = stratified_split(&labels, TEST_FRACTION, opts.seed);
    let mut reports = sweep(COLOR_BACKEND, &color_rows, &labels, &train, &test, opts)?;
    reports.extend(sweep(TEXT_BACKEND, &text_rows, &labels, &train, &test, opts)?);

    let by_label = |lit: bool, f: fn(&PairScore) -> f64| -> Vec<f64> {
        scores.iter().filter(|s| s.label.is_metaphorical() != lit).map(f).filter(|v| v.is_finite()).collect()
    };
    let js_test = wilcoxon_rank_sum(&by_label(true, |s| s.js), &by_label(false, |s| s.js))?;
    let cos_test = wilcoxon_rank_sum(&by_label(true, |s| s.cos), &by_label(false, |s| s.cos))?;
    Ok(MetaphorOutcome { reports, joined, dropped, n_train: train.len(), n_test: test.len(), scores, js_test, cos_test })
}
