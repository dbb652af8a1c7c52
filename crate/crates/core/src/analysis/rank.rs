//! Rank-based tests: Wilcoxon–Mann–Whitney rank sum, Jonckheere–Terpstra
//! trend, and Spearman correlation.

use serde::Serialize;
use statrs::function::erf::erfc;

use super::{check_finite, AnalysisError};

/// Combined sample sizes up to this use the exact null distribution.
pub const EXACT_MAX_TOTAL: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RankSumResult {
    /// Mann–Whitney U: pairs with `a > b`, ties counting one half.
    pub statistic: f64,
    pub p_two_sided: f64,
    pub exact: bool,
}

/// Midranks (1-based) of `values`, ties sharing the average rank.
pub fn midranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        let r = (i + j + 2) as f64 / 2.0;
        for &k in &order[i..=j] {
            ranks[k] = r;
        }
        i = j + 1;
    }
    ranks
}

/// Sizes of groups of equal values.
fn tie_sizes(values: &[f64]) -> Vec<usize> {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let mut out = Vec::new();
    let mut i = 0;
    while i < v.len() {
        let j = v[i..].iter().take_while(|&&x| x == v[i]).count();
        out.push(j);
        i += j;
    }
    out
}

fn normal_upper(z: f64) -> f64 {
    0.5 * erfc(z / std::f64::consts::SQRT_2)
}

/// Two-sided exact p-value by dynamic programming over the doubled
/// midranks of the pooled sample.
fn exact_p(doubled: &[u64], n_a: usize, doubled_sum_a: u64) -> f64 {
    let max_sum: u64 = doubled.iter().sum();
    let width = max_sum as usize + 1;
    // ways[k][s]: subsets of size k with doubled-rank sum s
    let mut ways = vec![vec![0f64; width]; n_a + 1];
    ways[0][0] = 1.0;
    for &d in doubled {
        for k in (1..=n_a).rev() {
            let (lo, hi) = ways.split_at_mut(k);
            for s in (d as usize..width).rev() {
                hi[0][s] += lo[k - 1][s - d as usize];
            }
        }
    }
    let dist = &ways[n_a];
    let total: f64 = dist.iter().sum();
    let obs = doubled_sum_a as usize;
    let lower: f64 = dist[..=obs].iter().sum();
    let upper: f64 = dist[obs..].iter().sum();
    (2.0 * lower.min(upper) / total).min(1.0)
}

pub fn wilcoxon_rank_sum(a: &[f64], b: &[f64]) -> Result<RankSumResult, AnalysisError> {
    if a.is_empty() || b.is_empty() {
        return Err(AnalysisError::InsufficientData { needed: 1, got: 0 });
    }
    check_finite("a", a)?;
    check_finite("b", b)?;
    let (na, nb) = (a.len(), b.len());
    let pooled: Vec<f64> = a.iter().chain(b).copied().collect();
    let ranks = midranks(&pooled);
    let rank_sum_a: f64 = ranks[..na].iter().sum();
    let statistic = rank_sum_a - (na * (na + 1)) as f64 / 2.0;
    let n = na + nb;
    if n <= EXACT_MAX_TOTAL {
        let doubled: Vec<u64> = ranks.iter().map(|r| (2.0 * r).round() as u64).collect();
        let obs = doubled[..na].iter().sum();
        return Ok(RankSumResult { statistic, p_two_sided: exact_p(&doubled, na, obs), exact: true });
    }
    let (na_f, nb_f, n_f) = (na as f64, nb as f64, n as f64);
    let ties: f64 = tie_sizes(&pooled).iter().map(|&t| (t * t * t - t) as f64).sum();
    let var = na_f * nb_f / 12.0 * ((n_f + 1.0) - ties / (n_f * (n_f - 1.0)));
    let p = if var > 0.0 {
        let z = ((statistic - na_f * nb_f / 2.0).abs() - 0.5).max(0.0) / var.sqrt();
        (2.0 * normal_upper(z)).min(1.0)
    } else {
        1.0
    };
    Ok(RankSumResult { statistic, p_two_sided: p, exact: false })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct JtResult {
    pub statistic: f64,
    pub expected: f64,
    pub variance: f64,
    pub z: f64,
    /// One-sided p for values increasing with group order.
    pub p: f64,
}

impl JtResult {
    /// One-sided p for values decreasing with group order.
    pub fn p_decreasing(&self) -> f64 {
        if self.variance > 0.0 {
            normal_upper(-self.z)
        } else {
            1.0
        }
    }
}

/// Jonckheere–Terpstra statistic over ordered groups: for every pair of
/// groups i < j, the count of (x in i, y in j) with y > x, ties one half.
/// The p-value uses the tie-corrected normal approximation.
pub fn jonckheere_terpstra(groups: &[Vec<f64>]) -> Result<JtResult, AnalysisError> {
    if groups.len() < 3 {
        return Err(AnalysisError::InsufficientData { needed: 3, got: groups.len() });
    }
    if let Some(i) = groups.iter().position(|g| g.is_empty()) {
        return Err(AnalysisError::InvalidInput(format!("group {i} is empty")));
    }
    for g in groups {
        check_finite("group", g)?;
    }
    let pooled: Vec<f64> = groups.iter().flatten().copied().collect();
    let mut distinct = pooled.clone();
    distinct.sort_by(f64::total_cmp);
    distinct.dedup();
    // Fenwick tree of counts over distinct values seen in earlier groups
    let mut tree = vec![0u64; distinct.len() + 1];
    let prefix = |tree: &[u64], mut i: usize| {
        let mut s = 0;
        while i > 0 {
            s += tree[i];
            i &= i - 1;
        }
        s
    };
    let mut doubled_stat: u64 = 0;
    for g in groups {
        for &y in g {
            let r = distinct.partition_point(|&v| v < y);
            let less = prefix(&tree, r);
            let equal = prefix(&tree, r + 1) - less;
            doubled_stat += 2 * less + equal;
        }
        for &y in g {
            let mut i = distinct.partition_point(|&v| v < y) + 1;
            while i < tree.len() {
                tree[i] += 1;
                i += i & i.wrapping_neg();
            }
        }
    }
    let statistic = doubled_stat as f64 / 2.0;

    let n = pooled.len() as f64;
    let sizes: Vec<f64> = groups.iter().map(|g| g.len() as f64).collect();
    let ties: Vec<f64> = tie_sizes(&pooled).into_iter().map(|t| t as f64).collect();
    let sum_sq: f64 = sizes.iter().map(|s| s * s).sum();
    let expected = (n * n - sum_sq) / 4.0;
    let f1 = |v: &[f64]| v.iter().map(|t| t * (t - 1.0) * (2.0 * t + 5.0)).sum::<f64>();
    let f2 = |v: &[f64]| v.iter().map(|t| t * (t - 1.0) * (t - 2.0)).sum::<f64>();
    let f3 = |v: &[f64]| v.iter().map(|t| t * (t - 1.0)).sum::<f64>();
    let variance = (n * (n - 1.0) * (2.0 * n + 5.0) - f1(&sizes) - f1(&ties)) / 72.0
        + f2(&sizes) * f2(&ties) / (36.0 * n * (n - 1.0) * (n - 2.0))
        + f3(&sizes) * f3(&ties) / (8.0 * n * (n - 1.0));
    let (z, p) = if variance > 0.0 {
        let z = (statistic - expected) / variance.sqrt();
        (z, normal_upper(z))
    } else {
        (0.0, 1.0)
    };
    Ok(JtResult { statistic, expected, variance, z, p })
}

/// Spearman rank correlation (Pearson correlation of midranks).
pub fn spearman(x: &[f64], y: &[f64]) -> Result<f64, AnalysisError> {
    if x.len() != y.len() {
        return Err(AnalysisError::InvalidInput(format!("x has {} values, y has {}", x.len(), y.len())));
    }
    if x.len() < 2 {
        return Err(AnalysisError::InsufficientData { needed: 2, got: x.len() });
    }
    check_finite("x", x)?;
    check_finite("y", y)?;
    let (rx, ry) = (midranks(x), midranks(y));
    let m = (x.len() + 1) as f64 / 2.0;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in rx.iter().zip(&ry) {
        sxy += (a - m) * (b - m);
        sxx += (a - m) * (a - m);
        syy += (b - m) * (b - m);
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(AnalysisError::InvalidInput("constant input has no rank correlation".into()));
    }
    Ok(sxy / (sxx * syy).sqrt())
}
