//! Gradient-boosted regression trees for binary classification under
//! logistic loss.
//!
//! Trees are grown level by level with exact greedy splits over pre-sorted
//! feature columns and second-order (Newton) leaf values. After each round
//! the new tree's contribution is halved until the training loss does not
//! increase, so the recorded loss curve is monotone.

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::AnalysisError;

const MIN_GAIN: f64 = 1e-12;
const MAX_BACKTRACK: usize = 30;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GbtParams {
    pub rounds: usize,
    pub max_depth: usize,
    pub learning_rate: f64,
    /// L2 penalty on leaf values.
    pub lambda: f64,
    /// Minimum hessian sum in each child of a split.
    pub min_child_weight: f64,
    /// Fraction of features offered to each tree; 1.0 disables sampling.
    pub colsample: f64,
    pub seed: u64,
}

impl Default for GbtParams {
    fn default() -> Self {
        Self {
            rounds: 200,
            max_depth: 3,
            learning_rate: 0.1,
            lambda: 1.0,
            min_child_weight: 1.0,
            colsample: 1.0,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Node {
    Leaf { value: f64 },
    Split { feature: usize, threshold: f64, left: usize, right: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Tree {
    nodes: Vec<Node>,
}

impl Tree {
    pub fn predict(&self, row: &[f64]) -> f64 {
        let mut i = 0;
        loop {
            match self.nodes[i] {
                Node::Leaf { value } => return value,
                Node::Split { feature, threshold, left, right } => {
                    i = if row[feature] <= threshold { left } else { right };
                }
            }
        }
    }

    pub fn leaf_count(&self) -> usize {
        self.nodes.iter().filter(|n| matches!(n, Node::Leaf { .. })).count()
    }

    fn scale(&mut self, f: f64) {
        for n in &mut self.nodes {
            if let Node::Leaf { value } = n {
                *value *= f;
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GbtModel {
    pub base_score: f64,
    pub trees: Vec<Tree>,
    pub n_features: usize,
    /// Mean training log-loss before the first tree and after every round.
    pub training_loss: Vec<f64>,
}

impl GbtModel {
    pub fn margin(&self, row: &[f64]) -> f64 {
        self.trees.iter().fold(self.base_score, |f, t| f + t.predict(row))
    }

    pub fn probability(&self, row: &[f64]) -> f64 {
        sigmoid(self.margin(row))
    }
}

fn sigmoid(z: f64) -> f64 {
    1.0 / (1.0 + (-z).exp())
}

fn softplus(z: f64) -> f64 {
    z.max(0.0) + (-z.abs()).exp().ln_1p()
}

/// Mean logistic loss of margins `f` against boolean labels.
pub fn log_loss(f: &[f64], labels: &[bool]) -> f64 {
    let total: f64 = f.iter().zip(labels).map(|(&m, &y)| if y { softplus(-m) } else { softplus(m) }).sum();
    total / f.len() as f64
}

pub fn accuracy(pred: &[bool], labels: &[bool]) -> f64 {
    if pred.is_empty() {
        return 0.0;
    }
    pred.iter().zip(labels).filter(|(a, b)| a == b).count() as f64 / pred.len() as f64
}

struct Candidate {
    gain: f64,
    threshold: f64,
}

fn best_splits_for_feature(
    col: &[f64],
    sorted: &[u32],
    slot_of_node: &[Option<usize>],
    node_of: &[usize],
    grad: &[f64],
    hess: &[f64],
    totals: &[(f64, f64)],
    p: &GbtParams,
) -> Vec<Option<Candidate>> {
    let slots = totals.len();
    let mut gl = vec![0.0; slots];
    let mut hl = vec![0.0; slots];
    let mut last: Vec<Option<f64>> = vec![None; slots];
    let mut best: Vec<Option<Candidate>> = (0..slots).map(|_| None).collect();
    for &i in sorted {
        let i = i as usize;
        let Some(s) = slot_of_node[node_of[i]] else { continue };
        let v = col[i];
        if let Some(a) = last[s] {
            if v > a {
                let (g, h) = totals[s];
                let (gr, hr) = (g - gl[s], h - hl[s]);
                if hl[s] >= p.min_child_weight && hr >= p.min_child_weight {
                    let gain = gl[s] * gl[s] / (hl[s] + p.lambda) + gr * gr / (hr + p.lambda) - g * g / (h + p.lambda);
                    if gain > MIN_GAIN && best[s].as_ref().is_none_or(|b| gain > b.gain) {
                        let mut threshold = a * 0.5 + v * 0.5;
                        if !(threshold < v) || threshold < a {
                            threshold = a;
                        }
                        best[s] = Some(Candidate { gain, threshold });
                    }
                }
            }
        }
        gl[s] += grad[i];
        hl[s] += hess[i];
        last[s] = Some(v);
    }
    best
}

/// Grows one tree; returns it with each sample's leaf value.
fn build_tree(
    cols: &[Vec<f64>],
    sorted: &[Vec<u32>],
    features: &[usize],
    grad: &[f64],
    hess: &[f64],
    p: &GbtParams,
) -> (Tree, Vec<f64>) {
    let n = grad.len();
    let mut nodes = vec![Node::Leaf { value: 0.0 }];
    let mut node_of = vec![0usize; n];
    let mut active = vec![0usize];
    let node_totals = |node_of: &[usize], count: usize| {
        let mut t = vec![(0.0, 0.0); count];
        for i in 0..n {
            t[node_of[i]].0 += grad[i];
            t[node_of[i]].1 += hess[i];
        }
        t
    };
    let mut totals = node_totals(&node_of, 1);
    for _ in 0..p.max_depth {
        if active.is_empty() {
            break;
        }
        let mut slot_of_node = vec![None; nodes.len()];
        for (s, &node) in active.iter().enumerate() {
            slot_of_node[node] = Some(s);
        }
        let slot_totals: Vec<(f64, f64)> = active.iter().map(|&node| totals[node]).collect();
        let per_feature: Vec<Vec<Option<Candidate>>> = features
            .par_iter()
            .map(|&f| best_splits_for_feature(&cols[f], &sorted[f], &slot_of_node, &node_of, grad, hess, &slot_totals, p))
            .collect();
        let mut chosen: Vec<Option<(usize, f64, f64)>> = vec![None; active.len()];
        for (&f, cands) in features.iter().zip(&per_feature) {
            for (s, c) in cands.iter().enumerate() {
                if let Some(c) = c {
                    if chosen[s].is_none_or(|(_, _, g)| c.gain > g) {
                        chosen[s] = Some((f, c.threshold, c.gain));
                    }
                }
            }
        }
        let mut next = Vec::new();
        let mut split_of = vec![None; nodes.len()];
        for (s, &node) in active.iter().enumerate() {
            if let Some((feature, threshold, _)) = chosen[s] {
                let (left, right) = (nodes.len(), nodes.len() + 1);
                nodes.push(Node::Leaf { value: 0.0 });
                nodes.push(Node::Leaf { value: 0.0 });
                nodes[node] = Node::Split { feature, threshold, left, right };
                split_of[node] = Some((feature, threshold, left, right));
                next.extend([left, right]);
            }
        }
        for i in 0..n {
            if let Some((f, thr, l, r)) = split_of[node_of[i]] {
                node_of[i] = if cols[f][i] <= thr { l } else { r };
            }
        }
        totals = node_totals(&node_of, nodes.len());
        active = next;
    }
    for (idx, node) in nodes.iter_mut().enumerate() {
        if let Node::Leaf { value } = node {
            let (g, h) = totals[idx];
            *value = -p.learning_rate * g / (h + p.lambda);
        }
    }
    let values = node_of
        .iter()
        .map(|&k| match nodes[k] {
            Node::Leaf { value } => value,
            Node::Split { .. } => unreachable!("samples end in leaves"),
        })
        .collect();
    (Tree { nodes }, values)
}

pub fn gbt_train(features: &[Vec<f64>], labels: &[bool], params: &GbtParams) -> Result<GbtModel, AnalysisError> {
    if features.len() != labels.len() {
        return Err(AnalysisError::InvalidInput(format!(
            "{} feature rows but {} labels",
            features.len(),
            labels.len()
        )));
    }
    let positives = labels.iter().filter(|&&y| y).count();
    let negatives = labels.len() - positives;
    if positives < 2 || negatives < 2 {
        return Err(AnalysisError::DegenerateLabels { positives, negatives });
    }
    let nf = features[0].len();
    if nf == 0 {
        return Err(AnalysisError::InvalidInput("rows have no features".into()));
    }
    for (i, r) in features.iter().enumerate() {
        if r.len() != nf || r.iter().any(|v| !v.is_finite()) {
            return Err(AnalysisError::InvalidInput(format!("row {i} is ragged or non-finite")));
        }
    }
    if !(params.learning_rate > 0.0 && params.lambda >= 0.0 && params.colsample > 0.0 && params.colsample <= 1.0) {
        return Err(AnalysisError::InvalidInput("invalid boosting parameters".into()));
    }
    let n = labels.len();
    let cols: Vec<Vec<f64>> = (0..nf).map(|f| features.iter().map(|r| r[f]).collect()).collect();
    let sorted: Vec<Vec<u32>> = cols
        .par_iter()
        .map(|c| {
            let mut idx: Vec<u32> = (0..n as u32).collect();
            idx.sort_by(|&a, &b| c[a as usize].total_cmp(&c[b as usize]).then(a.cmp(&b)));
            idx
        })
        .collect();

    let base_score = (positives as f64).ln() - (negatives as f64).ln();
    let mut margin = vec![base_score; n];
    let mut loss = log_loss(&margin, labels);
    let mut training_loss = vec![loss];
    let mut trees = Vec::with_capacity(params.rounds);
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let n_sampled = ((params.colsample * nf as f64).round() as usize).clamp(1, nf);
    let mut grad = vec![0.0; n];
    let mut hess = vec![0.0; n];
    for _ in 0..params.rounds {
        for i in 0..n {
            let (p, q) = (sigmoid(margin[i]), sigmoid(-margin[i]));
            grad[i] = if labels[i] { -q } else { p };
            hess[i] = p * q;
        }
        let feats: Vec<usize> = if n_sampled < nf {
            let mut f = sample(&mut rng, nf, n_sampled).into_vec();
            f.sort_unstable();
            f
        } else {
            (0..nf).collect()
        };
        let (mut tree, delta) = build_tree(&cols, &sorted, &feats, &grad, &hess, params);
        let mut step = 1.0;
        let mut accepted = None;
        for _ in 0..MAX_BACKTRACK {
            let trial: Vec<f64> = margin.iter().zip(&delta).map(|(m, d)| m + step * d).collect();
            let trial_loss = log_loss(&trial, labels);
            if trial_loss <= loss {
                accepted = Some((trial, trial_loss));
                break;
            }
            step *= 0.5;
        }
        match accepted {
            Some((m, l)) => {
                tree.scale(step);
                margin = m;
                loss = l;
            }
            None => tree.scale(0.0),
        }
        trees.push(tree);
        training_loss.push(loss);
    }
    Ok(GbtModel { base_score, trees, n_features: nf, training_loss })
}

pub fn gbt_predict(model: &GbtModel, rows: &[Vec<f64>]) -> Vec<bool> {
    rows.iter().map(|r| model.margin(r) > 0.0).collect()
}
