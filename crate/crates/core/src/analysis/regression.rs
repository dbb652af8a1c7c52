//! Least-squares polynomial fits with Gaussian likelihood and BIC.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use super::{check_finite, mean, AnalysisError};
use crate::embedding::pairwise_sum;

/// Lower bound on the noise variance so a perfect fit has a finite
/// log-likelihood.
pub const VARIANCE_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum ModelKind {
    Linear,
    Poly3,
}

impl ModelKind {
    pub fn degree(self) -> usize {
        match self {
            ModelKind::Linear => 1,
            ModelKind::Poly3 => 3,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ModelKind::Linear => "LINEAR",
            ModelKind::Poly3 => "POLY3",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegressionReport {
    pub model_kind: ModelKind,
    /// Intercept first, then ascending powers of x.
    pub coefficients: Vec<f64>,
    pub r_squared: f64,
    pub log_likelihood: f64,
    pub bic: f64,
    pub n: usize,
}

impl RegressionReport {
    /// Coefficients plus the noise variance.
    pub fn parameter_count(&self) -> usize {
        self.coefficients.len() + 1
    }

    pub fn predict(&self, x: f64) -> f64 {
        self.coefficients.iter().rev().fold(0.0, |acc, c| acc * x + c)
    }
}

pub fn bic(parameter_count: usize, n: usize, log_likelihood: f64) -> f64 {
    parameter_count as f64 * (n as f64).ln() - 2.0 * log_likelihood
}

/// Gaussian log-likelihood of residuals with sum of squares `ssr` at the
/// (floored) maximum-likelihood variance.
pub fn gaussian_log_likelihood(ssr: f64, n: usize) -> f64 {
    let n = n as f64;
    let var = (ssr / n).max(VARIANCE_FLOOR);
    -0.5 * n * (2.0 * std::f64::consts::PI * var).ln() - ssr / (2.0 * var)
}

pub fn fit_regression(x: &[f64], y: &[f64], kind: ModelKind) -> Result<RegressionReport, AnalysisError> {
    if x.len() != y.len() {
        return Err(AnalysisError::InvalidInput(format!("x has {} values, y has {}", x.len(), y.len())));
    }
    let p = kind.degree() + 1;
    if x.len() < p + 2 {
        return Err(AnalysisError::InsufficientData { needed: p + 2, got: x.len() });
    }
    check_finite("x", x)?;
    check_finite("y", y)?;
    let n = x.len();
    let mut design = DMatrix::from_fn(n, p, |i, j| x[i].powi(j as i32));
    // column scaling only conditions the solve; coefficients are unscaled below
    let scales: Vec<f64> = (0..p)
        .map(|j| design.column(j).amax())
        .map(|s| if s > 0.0 { s } else { 1.0 })
        .collect();
    for (j, s) in scales.iter().enumerate() {
        design.column_mut(j).unscale_mut(*s);
    }
    let qr = design.clone().qr();
    let (q, r) = (qr.q(), qr.r());
    let diag_max = (0..p).map(|j| r[(j, j)].abs()).fold(0.0, f64::max);
    if (0..p).any(|j| r[(j, j)].abs() <= 1e-10 * diag_max.max(f64::MIN_POSITIVE)) {
        return Err(AnalysisError::SingularDesign);
    }
    let rhs = DVector::from_column_slice(y);
    let beta = r.solve_upper_triangular(&(q.transpose() * &rhs)).ok_or(AnalysisError::SingularDesign)?;
    let coefficients: Vec<f64> = beta.iter().zip(&scales).map(|(b, s)| b / s).collect();

    let residuals: Vec<f64> = (design * &beta - rhs).iter().map(|e| e * e).collect();
    let ssr = pairwise_sum(&residuals);
    let ybar = mean(y);
    let dev: Vec<f64> = y.iter().map(|v| (v - ybar) * (v - ybar)).collect();
    let sst = pairwise_sum(&dev);
    let r_squared = if sst > 0.0 { 1.0 - ssr / sst } else { 1.0 };
    let log_likelihood = gaussian_log_likelihood(ssr, n);
    Ok(RegressionReport {
        model_kind: kind,
        bic: bic(p + 1, n, log_likelihood),
        coefficients,
        r_squared,
        log_likelihood,
        n,
    })
}

/// Signed differences `a − b` of log-likelihood and BIC.
pub fn compare_models(a: &RegressionReport, b: &RegressionReport) -> Result<(f64, f64), AnalysisError> {
    if a.n != b.n {
        return Err(AnalysisError::SampleMismatch { a: a.n, b: b.n });
    }
    Ok((a.log_likelihood - b.log_likelihood, a.bic - b.bic))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Normal equations solved by Gaussian elimination with partial pivoting.
    fn normal_equations(x: &[f64], y: &[f64], p: usize) -> Vec<f64> {
        let mut a = vec![vec![0.0; p + 1]; p];
        for (xi, yi) in x.iter().zip(y) {
            for r in 0..p {
                for c in 0..p {
                    a[r][c] += xi.powi((r + c) as i32);
                }
                a[r][p] += xi.powi(r as i32) * yi;
            }
        }
        for col in 0..p {
            let piv = (col..p).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs())).unwrap();
            a.swap(col, piv);
            for row in 0..p {
                if row != col {
                    let f = a[row][col] / a[col][col];
                    for k in col..=p {
                        a[row][k] -= f * a[col][k];
                    }
                }
            }
        }
        (0..p).map(|i| a[i][p] / a[i][i]).collect()
    }

    const XS: [f64; 10] = [0.3, 1.1, 1.9, 2.4, 3.7, 4.2, 5.5, 6.1, 7.8, 8.6];
    const YS: [f64; 10] = [1.2, 2.9, 3.1, 4.8, 5.0, 7.3, 7.1, 9.6, 10.2, 12.5];

    #[test]
    fn matches_normal_equations() {
        for kind in [ModelKind::Linear, ModelKind::Poly3] {
            let fit = fit_regression(&XS, &YS, kind).unwrap();
            let want = normal_equations(&XS, &YS, kind.degree() + 1);
            for (g, w) in fit.coefficients.iter().zip(&want) {
                assert!((g - w).abs() < 1e-8, "{kind:?}: {g} vs {w}");
            }
        }
    }

    #[test]
    fn perfect_fits() {
        let x: Vec<f64> = (0..30).map(|i| i as f64 * 0.1 - 1.0).collect();
        let y: Vec<f64> = x.iter().map(|v| 3.0 - 2.0 * v).collect();
        let lin = fit_regression(&x, &y, ModelKind::Linear).unwrap();
        assert!((lin.r_squared - 1.0).abs() < 1e-9);
        assert!(lin.log_likelihood.is_finite());
        let cube: Vec<f64> = x.iter().map(|v| v * v * v).collect();
        let p3 = fit_regression(&x, &cube, ModelKind::Poly3).unwrap();
        assert!((p3.r_squared - 1.0).abs() < 1e-9);
        assert!((p3.coefficients[3] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn bic_formula() {
        let fit = fit_regression(&XS, &YS, ModelKind::Linear).unwrap();
        let expect = 3.0 * 10f64.ln() - 2.0 * fit.log_likelihood;
        assert!((fit.bic - expect).abs() < 1e-12);
        assert_eq!(fit.parameter_count(), 3);
    }

    #[test]
    fn compare() {
        let a = fit_regression(&XS, &YS, ModelKind::Linear).unwrap();
        assert_eq!(compare_models(&a, &a).unwrap(), (0.0, 0.0));
        let mut b = a.clone();
        b.coefficients.extend([0.0, 0.0]);
        b.n = 100;
        b.bic = bic(b.parameter_count(), 100, b.log_likelihood);
        let mut c = a.clone();
        c.n = 100;
        c.bic = bic(c.parameter_count(), 100, c.log_likelihood);
        let (dl, db) = compare_models(&b, &c).unwrap();
        assert_eq!(dl, 0.0);
        assert!((db - 2.0 * 100f64.ln()).abs() < 1e-9);
        assert!(matches!(compare_models(&a, &c), Err(AnalysisError::SampleMismatch { a: 10, b: 100 })));
    }

    #[test]
    fn singular_and_short_inputs() {
        assert_eq!(fit_regression(&[2.0; 8], &XS[..8], ModelKind::Linear), Err(AnalysisError::SingularDesign));
        let x = [1.0, 2.0, 3.0, 1.0, 2.0, 3.0, 1.0];
        assert_eq!(fit_regression(&x, &x, ModelKind::Poly3), Err(AnalysisError::SingularDesign));
        assert!(matches!(
            fit_regression(&XS[..5], &YS[..5], ModelKind::Poly3),
            Err(AnalysisError::InsufficientData { needed: 6, got: 5 })
        ));
    }

    #[test]
    fn predict_evaluates_polynomial() {
        let r = RegressionReport {
            model_kind: ModelKind::Poly3,
            coefficients: vec![1.0, 2.0, 3.0, 4.0],
            r_squared: 1.0,
            log_likelihood: 0.0,
            bic: 0.0,
            n: 10,
        };
        assert_eq!(r.predict(2.0), 1.0 + 4.0 + 12.0 + 32.0);
    }

    proptest! {
        #[test]
        fn poly3_never_worse(seed in any::<u64>()) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let x: Vec<f64> = (0..40).map(|_| rng.gen_range(-3.0..3.0)).collect();
            let y: Vec<f64> = x.iter().map(|v| v.sin() + rng.gen_range(-0.5..0.5)).collect();
            let lin = fit_regression(&x, &y, ModelKind::Linear).unwrap();
            let p3 = fit_regression(&x, &y, ModelKind::Poly3).unwrap();
            prop_assert!(p3.r_squared >= lin.r_squared - 1e-12);
            prop_assert!(lin.r_squared <= 1.0 && p3.r_squared <= 1.0);
        }
    }
}
