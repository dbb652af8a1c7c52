//! Equal-count (quantile) binning of a response against a predictor.

use serde::Serialize;

use super::{check_finite, mean, AnalysisError};

pub const DEFAULT_BINS: usize = 40;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TrendPoint {
    pub mean_x: f64,
    pub mean_y: f64,
    pub count: usize,
}

/// Bin sizes for `n` points in `n_bins` bins: the remainder goes one extra
/// point per bin starting from the first.
pub fn bin_sizes(n: usize, n_bins: usize) -> Vec<usize> {
    let (base, rem) = (n / n_bins, n % n_bins);
    (0..n_bins).map(|i| base + usize::from(i < rem)).collect()
}

/// Sorts points by `x` (ties by input order) and averages both coordinates
/// within `n_bins` consecutive bins of near-equal count.
pub fn binned_trend(x: &[f64], y: &[f64], n_bins: usize) -> Result<Vec<TrendPoint>, AnalysisError> {
    if x.len() != y.len() {
        return Err(AnalysisError::InvalidInput(format!("x has {} values, y has {}", x.len(), y.len())));
    }
    if n_bins == 0 {
        return Err(AnalysisError::InvalidInput("n_bins must be positive".into()));
    }
    if x.len() < n_bins {
        return Err(AnalysisError::InsufficientData { needed: n_bins, got: x.len() });
    }
    check_finite("x", x)?;
    check_finite("y", y)?;
    let mut order: Vec<usize> = (0..x.len()).collect();
    order.sort_by(|&a, &b| x[a].total_cmp(&x[b]).then(a.cmp(&b)));
    let mut out = Vec::with_capacity(n_bins);
    let mut start = 0;
    let mut bx = Vec::new();
    let mut by = Vec::new();
    for size in bin_sizes(x.len(), n_bins) {
        bx.clear();
        by.clear();
        for &i in &order[start..start + size] {
            bx.push(x[i]);
            by.push(y[i]);
        }
        out.push(TrendPoint { mean_x: mean(&bx), mean_y: mean(&by), count: size });
        start += size;
    }
    Ok(out)
}
