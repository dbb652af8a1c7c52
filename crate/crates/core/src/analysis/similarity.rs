//! Word-pair similarities and the analyses built on them: similarity
//! against text-vector similarity, and similarity against concreteness.

use std::collections::BTreeSet;

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::rank::{jonckheere_terpstra, spearman, JtResult};
use super::regression::{compare_models, fit_regression, ModelKind, RegressionReport};
use super::trend::{binned_trend, TrendPoint, DEFAULT_BINS};
use super::AnalysisError;
use crate::embedding::{js_divergence, ColorDistribution, TextVector};
use crate::store::{ConcretenessTable, EmbeddingTable, TextVectorTable};

pub const DEFAULT_REFERENCE_WORDS: usize = 500;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairSimilarityRecord {
    pub word_a: String,
    pub word_b: String,
    /// JS divergence; lower means more similar.
    pub js_sim: f64,
    pub cos_sim: Option<f64>,
    pub concreteness_sum: Option<f64>,
}

pub fn pair_similarity(
    a: &str,
    b: &str,
    colors: &EmbeddingTable,
    text: Option<&TextVectorTable>,
    concreteness: Option<&ConcretenessTable>,
) -> Option<PairSimilarityRecord> {
    let (ea, eb) = (colors.get(a)?, colors.get(b)?);
    let cos_sim = match text {
        Some(t) => Some(t.get(a)?.cosine(t.get(b)?).ok()?),
        None => None,
    };
    let concreteness_sum = match concreteness {
        Some(c) => Some(c.get(a)?.mean + c.get(b)?.mean),
        None => None,
    };
    Some(PairSimilarityRecord {
        word_a: a.to_string(),
        word_b: b.to_string(),
        js_sim: js_divergence(&ea.jzazbz_dist, &eb.jzazbz_dist),
        cos_sim,
        concreteness_sum,
    })
}

/// Words present in every supplied table, in sorted order.
#[derive(Debug)]
pub struct JoinedWords<'a> {
    pub words: Vec<&'a str>,
    pub colors: Vec<&'a ColorDistribution>,
    pub text: Option<Vec<&'a TextVector>>,
    pub concreteness: Option<Vec<f64>>,
    pub dropped: usize,
}

impl<'a> JoinedWords<'a> {
    pub fn new(
        colors: &'a EmbeddingTable,
        text: Option<&'a TextVectorTable>,
        concreteness: Option<&'a ConcretenessTable>,
    ) -> Self {
        let mut out = JoinedWords {
            words: Vec::new(),
            colors: Vec::new(),
            text: text.map(|_| Vec::new()),
            concreteness: concreteness.map(|_| Vec::new()),
            dropped: 0,
        };
        for (w, e) in colors {
            let tv = text.map(|t| t.get(w));
            let cv = concreteness.map(|c| c.get(w));
            if matches!(tv, Some(None)) || matches!(cv, Some(None)) {
                out.dropped += 1;
                continue;
            }
            out.words.push(w);
            out.colors.push(&e.jzazbz_dist);
            if let (Some(v), Some(Some(t))) = (out.text.as_mut(), tv) {
                v.push(t);
            }
            if let (Some(v), Some(Some(c))) = (out.concreteness.as_mut(), cv) {
                v.push(c.mean);
            }
        }
        out
    }

    pub fn index_of(&self, word: &str) -> Option<usize> {
        self.words.binary_search(&word).ok()
    }
}

/// Sorted indices of `n_ref` words drawn without replacement.
pub fn sample_references(n_words: usize, n_ref: usize, seed: u64) -> Vec<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut idx = sample(&mut rng, n_words, n_ref.min(n_words)).into_vec();
    idx.sort_unstable();
    idx
}

/// Every word paired with every reference word, each unordered pair once.
pub fn reference_pairs(n_words: usize, refs: &[usize]) -> Vec<(u32, u32)> {
    let is_ref: BTreeSet<usize> = refs.iter().copied().collect();
    refs.par_iter()
        .map(|&r| {
            (0..n_words)
                .filter(|&w| w != r && !(is_ref.contains(&w) && w < r))
                .map(|w| (r as u32, w as u32))
                .collect::<Vec<_>>()
        })
        .flatten()
        .collect()
}

/// Per-pair measurements as parallel columns. Columns for tables that were
/// not joined are empty.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PairColumns {
    pub js: Vec<f64>,
    pub cos: Vec<f64>,
    pub concreteness_sum: Vec<f64>,
}

impl PairColumns {
    pub fn len(&self) -> usize {
        self.js.len()
    }

    pub fn is_empty(&self) -> bool {
        self.js.is_empty()
    }
}

pub fn pair_columns(joined: &JoinedWords<'_>, pairs: &[(u32, u32)]) -> PairColumns {
    let rows: Vec<(f64, f64, f64)> = pairs
        .par_iter()
        .map(|&(a, b)| {
            let (a, b) = (a as usize, b as usize);
            let js = js_divergence(joined.colors[a], joined.colors[b]);
            let cos = joined.text.as_ref().map_or(f64::NAN, |t| t[a].cosine(t[b]).unwrap_or(f64::NAN));
            let conc = joined.concreteness.as_ref().map_or(f64::NAN, |c| c[a] + c[b]);
            (js, cos, conc)
        })
        .collect();
    let mut out = PairColumns::default();
    for (js, cos, conc) in rows {
        out.js.push(js);
        if joined.text.is_some() {
            out.cos.push(cos);
        }
        if joined.concreteness.is_some() {
            out.concreteness_sum.push(conc);
        }
    }
    out
}

/// Resolves explicit word pairs against the join; returns index pairs and
/// the number of pairs dropped.
pub fn resolve_pairs(joined: &JoinedWords<'_>, pairs: &[(String, String)]) -> (Vec<(u32, u32)>, usize) {
    let mut out = Vec::with_capacity(pairs.len());
    for (a, b) in pairs {
        if let (Some(i), Some(j)) = (joined.index_of(&a.to_lowercase()), joined.index_of(&b.to_lowercase())) {
            out.push((i as u32, j as u32));
        }
    }
    let dropped = pairs.len() - out.len();
    (out, dropped)
}

#[derive(Debug, Clone)]
pub struct PairSelection {
    pub n_reference: usize,
    pub seed: u64,
    /// Explicit pairs replace the reference sample when given.
    pub pairs: Option<Vec<(String, String)>>,
    pub n_bins: usize,
}

impl Default for PairSelection {
    fn default() -> Self {
        Self { n_reference: DEFAULT_REFERENCE_WORDS, seed: 0, pairs: None, n_bins: DEFAULT_BINS }
    }
}

fn select_pairs(joined: &JoinedWords<'_>, sel: &PairSelection) -> Result<(Vec<(u32, u32)>, usize), AnalysisError> {
    if joined.words.len() < 2 {
        return Err(AnalysisError::InsufficientJoin { joined: joined.words.len(), dropped: joined.dropped, needed: 2 });
    }
    let (pairs, dropped) = match &sel.pairs {
        Some(p) => resolve_pairs(joined, p),
        None => {
            let refs = sample_references(joined.words.len(), sel.n_reference, sel.seed);
            (reference_pairs(joined.words.len(), &refs), 0)
        }
    };
    if pairs.len() < sel.n_bins {
        return Err(AnalysisError::InsufficientJoin { joined: pairs.len(), dropped, needed: sel.n_bins });
    }
    Ok((pairs, dropped))
}

fn xs(t: &[TrendPoint]) -> Vec<f64> {
    t.iter().map(|p| p.mean_x).collect()
}

fn ys(t: &[TrendPoint]) -> Vec<f64> {
    t.iter().map(|p| p.mean_y).collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct SimilarityTrend {
    pub words_joined: usize,
    pub words_dropped: usize,
    pub pairs: usize,
    pub pairs_dropped: usize,
    /// Mean JS divergence in quantile bins of cosine similarity.
    pub trend: Vec<TrendPoint>,
    pub spearman: f64,
    /// Trend test over the bin means taken as singleton groups in bin order.
    pub jt: JtResult,
}

/// Color similarity against text-vector similarity.
pub fn similarity_trend(
    colors: &EmbeddingTable,
    text: &TextVectorTable,
    sel: &PairSelection,
) -> Result<SimilarityTrend, AnalysisError> {
    let joined = JoinedWords::new(colors, Some(text), None);
    let (pairs, pairs_dropped) = select_pairs(&joined, sel)?;
    let cols = pair_columns(&joined, &pairs);
    let trend = binned_trend(&cols.cos, &cols.js, sel.n_bins)?;
    let groups: Vec<Vec<f64>> = trend.iter().map(|p| vec![p.mean_y]).collect();
    Ok(SimilarityTrend {
        words_joined: joined.words.len(),
        words_dropped: joined.dropped,
        pairs: pairs.len(),
        pairs_dropped,
        spearman: spearman(&xs(&trend), &ys(&trend))?,
        jt: jonckheere_terpstra(&groups)?,
        trend,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct ModelComparison {
    pub label: String,
    pub delta_log_likelihood: f64,
    pub delta_bic: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConcretenessAnalysis {
    pub words_joined: usize,
    pub words_dropped: usize,
    pub pairs: usize,
    pub pairs_dropped: usize,
    /// Mean JS divergence in quantile bins of summed concreteness.
    pub color_trend: Vec<TrendPoint>,
    pub text_trend: Option<Vec<TrendPoint>>,
    pub color_spearman: f64,
    pub text_spearman: Option<f64>,
    /// Bin-mean concreteness regressed on bin-mean JS divergence.
    pub color_models: Vec<RegressionReport>,
    /// Bin-mean concreteness regressed on bin-mean cosine similarity.
    pub text_models: Vec<RegressionReport>,
    pub comparisons: Vec<ModelComparison>,
}

const KINDS: [ModelKind; 2] = [ModelKind::Linear, ModelKind::Poly3];

fn fit_both(trend: &[TrendPoint]) -> Result<Vec<RegressionReport>, AnalysisError> {
    KINDS.iter().map(|&k| fit_regression(&ys(trend), &xs(trend), k)).collect()
}

/// Color (and optionally text) similarity against summed concreteness.
pub fn concreteness_analysis(
    colors: &EmbeddingTable,
    concreteness: &ConcretenessTable,
    text: Option<&TextVectorTable>,
    sel: &PairSelection,
) -> Result<ConcretenessAnalysis, AnalysisError> {
    let joined = JoinedWords::new(colors, text, Some(concreteness));
    let (pairs, pairs_dropped) = select_pairs(&joined, sel)?;
    let cols = pair_columns(&joined, &pairs);
    let color_trend = binned_trend(&cols.concreteness_sum, &cols.js, sel.n_bins)?;
    let color_models = fit_both(&color_trend)?;
    let color_spearman = spearman(&xs(&color_trend), &ys(&color_trend))?;
    let (text_trend, text_models, text_spearman) = if text.is_some() {
        let t = binned_trend(&cols.concreteness_sum, &cols.cos, sel.n_bins)?;
        let models = fit_both(&t)?;
        let rho = spearman(&xs(&t), &ys(&t))?;
        (Some(t), models, Some(rho))
    } else {
        (None, Vec::new(), None)
    };
    let mut comparisons = Vec::new();
    for c in &color_models {
        for t in &text_models {
            let (dl, db) = compare_models(c, t)?;
            comparisons.push(ModelComparison {
                label: format!("color {} vs text {}", c.model_kind.name(), t.model_kind.name()),
                delta_log_likelihood: dl,
                delta_bic: db,
            });
        }
    }
    Ok(ConcretenessAnalysis {
        words_joined: joined.words.len(),
        words_dropped: joined.dropped,
        pairs: pairs.len(),
        pairs_dropped,
        color_trend,
        text_trend,
        color_spearman,
        text_spearman,
        color_models,
        text_models,
        comparisons,
    })
}
