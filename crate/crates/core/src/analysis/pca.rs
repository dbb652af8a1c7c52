//! Principal component analysis via eigendecomposition of the sample
//! covariance.

use nalgebra::{DMatrix, SymmetricEigen};

use super::AnalysisError;

/// Eigenvalues below this fraction of the largest count as zero when
/// deciding numerical rank.
pub const RANK_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct PcaModel {
    pub mean: Vec<f64>,
    /// Unit-norm principal axes, by descending eigenvalue. The
    /// largest-magnitude loading of each axis is positive.
    pub components: Vec<Vec<f64>>,
    /// Sample-covariance eigenvalues (divisor n − 1), descending.
    pub eigenvalues: Vec<f64>,
    pub rank: usize,
    pub n_samples: usize,
}

impl PcaModel {
    pub fn n_features(&self) -> usize {
        self.mean.len()
    }

    /// Dimension actually used for a requested `k`.
    pub fn effective_dims(&self, k: usize) -> usize {
        k.min(self.rank)
    }

    /// Maps component scores back to feature space.
    pub fn inverse_transform(&self, scores: &[Vec<f64>]) -> Vec<Vec<f64>> {
        scores
            .iter()
            .map(|s| {
                let mut row = self.mean.clone();
                for (c, &v) in self.components.iter().zip(s) {
                    for (r, w) in row.iter_mut().zip(c) {
                        *r += v * w;
                    }
                }
                row
            })
            .collect()
    }
}

fn check_rows(rows: &[Vec<f64>], cols: usize) -> Result<(), AnalysisError> {
    for (i, r) in rows.iter().enumerate() {
        if r.len() != cols {
            return Err(AnalysisError::InvalidInput(format!("row {i} has {} columns, expected {cols}", r.len())));
        }
        if r.iter().any(|v| !v.is_finite()) {
            return Err(AnalysisError::InvalidInput(format!("row {i} has a non-finite value")));
        }
    }
    Ok(())
}

pub fn pca_fit(data: &[Vec<f64>]) -> Result<PcaModel, AnalysisError> {
    if data.len() < 2 {
        return Err(AnalysisError::InsufficientData { needed: 2, got: data.len() });
    }
    let cols = data[0].len();
    if cols == 0 {
        return Err(AnalysisError::InvalidInput("rows have no columns".into()));
    }
    check_rows(data, cols)?;
    let n = data.len();
    let mean: Vec<f64> = (0..cols)
        .map(|j| {
            let col: Vec<f64> = data.iter().map(|r| r[j]).collect();
            super::mean(&col)
        })
        .collect();
    let centered = DMatrix::from_fn(n, cols, |i, j| data[i][j] - mean[j]);
    let cov = (centered.transpose() * &centered) / (n - 1) as f64;
    let eig = SymmetricEigen::new(cov);
    let mut order: Vec<usize> = (0..cols).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]).then(a.cmp(&b)));
    let eigenvalues: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i].max(0.0)).collect();
    let components: Vec<Vec<f64>> = order
        .iter()
        .map(|&i| {
            let mut v: Vec<f64> = eig.eigenvectors.column(i).iter().copied().collect();
            let lead = v
                .iter()
                .enumerate()
                .fold(0, |best, (j, x)| if x.abs() > v[best].abs() { j } else { best });
            if v[lead] < 0.0 {
                v.iter_mut().for_each(|x| *x = -*x);
            }
            v
        })
        .collect();
    let top = eigenvalues[0];
    let rank = if top > 0.0 {
        eigenvalues.iter().filter(|&&l| l > RANK_TOLERANCE * top).count().min(n - 1)
    } else {
        0
    };
    Ok(PcaModel { mean, components, eigenvalues, rank, n_samples: n })
}

/// Projects mean-centred rows onto the top `k` components. A `k` above the
/// numerical rank is truncated with a warning.
pub fn pca_transform(model: &PcaModel, rows: &[Vec<f64>], k: usize) -> Result<Vec<Vec<f64>>, AnalysisError> {
    if k == 0 {
        return Err(AnalysisError::InvalidInput("k must be positive".into()));
    }
    check_rows(rows, model.n_features())?;
    let k_eff = model.effective_dims(k);
    if k_eff < k {
        log::warn!("requested {k} components but numerical rank is {}; using {k_eff}", model.rank);
    }
    Ok(rows
        .iter()
        .map(|r| {
            model.components[..k_eff]
                .iter()
                .map(|c| r.iter().zip(&model.mean).zip(c).map(|((x, m), w)| (x - m) * w).sum())
                .collect()
        })
        .collect())
}
