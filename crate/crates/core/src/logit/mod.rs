//! Penalized logistic regression for post-screening.
//!
//! The objective is
//! `−(1/n) Σ [y_i η_i − log(1 + e^{η_i})] + λ Σ_j f_j [(1−α)/2 β_j² + α |β_j|]`
//! with `η_i = β_0 + x_i'β`, an unpenalized intercept, and per-feature
//! penalty factors `f_j`. Columns are standardized (mean 0, `1/n` variance 1)
//! before fitting, so the penalty acts on standardized coefficients; results
//! are reported on the original scale.
//!
//! This module works in `f64` only: the KKT tolerances it guarantees sit
//! below `f32` resolution of the objective.

mod cv;
mod irls;
mod path;

pub use cv::{
    adaptive_factors, adaptive_lasso, cv_select, default_alpha_grid, elastic_net_grid,
    stratified_folds, CvOptions,
};
pub use irls::{logistic_irls, LogisticFit};
pub use path::{fit_glm_path, kkt_violation, lambda_max, GlmPath, PathOptions};

use serde::{Deserialize, Serialize};

use crate::data::NumericMatrix;
use crate::error::{Error, Result};
use crate::scalar::{sigmoid, softplus};

/// Default path length.
pub const PATH_COUNT: usize = 100;
/// Default ratio `λ_min / λ_max`.
pub const PATH_RATIO: f64 = 1e-4;
/// Penalty factor for features whose ridge coefficient is numerically zero.
pub const EXCLUDED_FACTOR: f64 = 1e10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum LambdaSpec {
    Fixed(f64),
    Path { count: usize, ratio: f64 },
}

impl Default for LambdaSpec {
    fn default() -> Self {
        LambdaSpec::Path {
            count: PATH_COUNT,
            ratio: PATH_RATIO,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PenaltySpec {
    pub alpha: f64,
    pub lambda: LambdaSpec,
    /// One non-negative weight per feature; `None` means all ones.
    pub penalty_factors: Option<Vec<f64>>,
}

impl PenaltySpec {
    pub fn lasso() -> Self {
        Self::elastic_net(1.0)
    }

    pub fn ridge() -> Self {
        Self::elastic_net(0.0)
    }

    pub fn elastic_net(alpha: f64) -> Self {
        Self {
            alpha,
            lambda: LambdaSpec::default(),
            penalty_factors: None,
        }
    }

    pub fn with_lambda(mut self, lambda: LambdaSpec) -> Self {
        self.lambda = lambda;
        self
    }

    pub fn with_factors(mut self, factors: Vec<f64>) -> Self {
        self.penalty_factors = Some(factors);
        self
    }

    pub fn validate(&self, p: usize) -> Result<()> {
        if !(0.0..=1.0).contains(&self.alpha) {
            return Err(Error::Config(format!(
                "alpha must lie in [0, 1], got {}",
                self.alpha
            )));
        }
        match self.lambda {
            LambdaSpec::Fixed(l) if !(l >= 0.0 && l.is_finite()) => {
                return Err(Error::Config("fixed lambda must be finite and >= 0".into()))
            }
            LambdaSpec::Path { count, ratio } => {
                if count < 2 {
                    return Err(Error::Config("lambda path needs at least 2 values".into()));
                }
                if !(ratio > 0.0 && ratio < 1.0) {
                    return Err(Error::Config("lambda ratio must lie in (0, 1)".into()));
                }
            }
            _ => {}
        }
        if let Some(f) = &self.penalty_factors {
            if f.len() != p {
                return Err(Error::Dimension {
                    what: "penalty factors",
                    expected: p,
                    found: f.len(),
                });
            }
            if f.iter().any(|&v| !(v >= 0.0 && v.is_finite())) {
                return Err(Error::Config("penalty factors must be finite and >= 0".into()));
            }
        }
        Ok(())
    }

    pub fn factors(&self, p: usize) -> Vec<f64> {
        self.penalty_factors.clone().unwrap_or_else(|| vec![1.0; p])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitMetrics {
    pub misclassification: f64,
    pub pseudo_r2: f64,
    pub aic: f64,
    pub log_likelihood: f64,
    pub null_log_likelihood: f64,
    pub model_size: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PenalizedFit {
    pub intercept: f64,
    pub coefficients: Vec<f64>,
    pub chosen_lambda: f64,
    pub chosen_alpha: f64,
    pub lambda_path: Vec<f64>,
    /// Pooled cross-validated misclassification per path point.
    pub cv_curve: Vec<f64>,
    pub penalty_factors: Vec<f64>,
    pub metrics: FitMetrics,
    /// Folds whose training split held a single class.
    pub flagged_folds: Vec<usize>,
    pub converged: bool,
}

impl PenalizedFit {
    pub fn cv_error(&self) -> f64 {
        self.cv_curve.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn active_set(&self) -> Vec<usize> {
        nonzero(&self.coefficients)
    }

    pub fn predict_proba(&self, x: &NumericMatrix<f64>) -> Vec<f64> {
        linear_predictor(x, self.intercept, &self.coefficients)
            .into_iter()
            .map(sigmoid)
            .collect()
    }
}

pub(crate) fn nonzero(beta: &[f64]) -> Vec<usize> {
    (0..beta.len()).filter(|&j| beta[j] != 0.0).collect()
}

pub fn linear_predictor(x: &NumericMatrix<f64>, intercept: f64, beta: &[f64]) -> Vec<f64> {
    let mut eta = vec![intercept; x.n()];
    for (j, &b) in beta.iter().enumerate() {
        if b != 0.0 {
            for (e, &v) in eta.iter_mut().zip(x.column(j)) {
                *e += b * v;
            }
        }
    }
    eta
}

/// Bernoulli log-likelihood `Σ [y η − log(1 + e^η)]`.
pub fn log_likelihood(eta: &[f64], y: &[f64]) -> f64 {
    eta.iter().zip(y).map(|(&e, &v)| v * e - softplus(e)).sum()
}

/// Log-likelihood of the intercept-only model, `n [ȳ log ȳ + (1−ȳ) log(1−ȳ)]`.
pub fn null_log_likelihood(y: &[f64]) -> f64 {
    let n = y.len() as f64;
    let ybar = y.iter().sum::<f64>() / n;
    if ybar <= 0.0 || ybar >= 1.0 {
        return 0.0;
    }
    n * (ybar * ybar.ln() + (1.0 - ybar) * (1.0 - ybar).ln())
}

/// Misclassification at threshold 0.5, McFadden pseudo-R², and
/// `AIC = 2k − 2ℓ` with `k` = nonzero coefficients + 1.
pub fn fit_metrics(x: &NumericMatrix<f64>, y: &[u8], intercept: f64, beta: &[f64]) -> FitMetrics {
    let yf: Vec<f64> = y.iter().map(|&v| f64::from(v)).collect();
    let eta = linear_predictor(x, intercept, beta);
    let errors = eta
        .iter()
        .zip(y)
        .filter(|(&e, &v)| u8::from(sigmoid(e) >= 0.5) != v)
        .count();
    let ll = log_likelihood(&eta, &yf);
    let ll0 = null_log_likelihood(&yf);
    let model_size = nonzero(beta).len();
    FitMetrics {
        misclassification: errors as f64 / y.len() as f64,
        pseudo_r2: if ll0 < 0.0 { 1.0 - ll / ll0 } else { 0.0 },
        aic: 2.0 * (model_size as f64 + 1.0) - 2.0 * ll,
        log_likelihood: ll,
        null_log_likelihood: ll0,
        model_size,
    }
}

pub(crate) fn check_xy(x: &NumericMatrix<f64>, y: &[u8]) -> Result<()> {
    if x.n() == 0 {
        return Err(Error::NoObservations);
    }
    if y.len() != x.n() {
        return Err(Error::Dimension {
            what: "response length",
            expected: x.n(),
            found: y.len(),
        });
    }
    if y.iter().any(|&v| v > 1) {
        return Err(Error::NotBinary);
    }
    if !x.is_finite() {
        return Err(Error::NonFinite("design matrix"));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn intercept_only_metrics() {
        let x = NumericMatrix::from_columns(vec![vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0]]).unwrap();
        let y = [0u8, 0, 1, 1, 1, 1];
        let ybar: f64 = 4.0 / 6.0;
        let m = fit_metrics(&x, &y, (ybar / (1.0 - ybar)).ln(), &[0.0]);
        assert_abs_diff_eq!(m.pseudo_r2, 0.0, epsilon = 1e-12);
        assert_eq!(m.model_size, 0);
        assert_abs_diff_eq!(m.misclassification, 2.0 / 6.0);
    }

    #[test]
    fn hand_computed_metrics() {
        // η = x − 3.5 on x = 1..6; ℓ = Σ y η − log(1 + e^η).
        let xs = [1.0, 2.0, 3.0, 4.0, 5.0, 6.0];
        let y = [0u8, 1, 0, 1, 1, 0];
        let x = NumericMatrix::from_columns(vec![xs.to_vec()]).unwrap();
        let mut ll = 0.0;
        let mut wrong = 0;
        for (&xv, &yv) in xs.iter().zip(&y) {
            let eta: f64 = xv - 3.5;
            ll += f64::from(yv) * eta - (1.0 + eta.exp()).ln();
            if (eta >= 0.0) != (yv == 1) {
                wrong += 1;
            }
        }
        let ll0 = 6.0 * 0.5f64.ln();
        let m = fit_metrics(&x, &y, -3.5, &[1.0]);
        assert_abs_diff_eq!(m.log_likelihood, ll, epsilon = 1e-12);
        assert_abs_diff_eq!(m.null_log_likelihood, ll0, epsilon = 1e-12);
        assert_abs_diff_eq!(m.pseudo_r2, 1.0 - ll / ll0, epsilon = 1e-12);
        assert_abs_diff_eq!(m.aic, 4.0 - 2.0 * ll, epsilon = 1e-12);
        assert_abs_diff_eq!(m.misclassification, wrong as f64 / 6.0);
    }

    #[test]
    fn perfect_predictor_has_no_errors() {
        let x = NumericMatrix::from_columns(vec![vec![-2.0, -1.0, 1.0, 2.0]]).unwrap();
        let m = fit_metrics(&x, &[0, 0, 1, 1], 0.0, &[5.0]);
        assert_eq!(m.misclassification, 0.0);
    }

    #[test]
    fn spec_validation() {
        assert!(PenaltySpec::elastic_net(1.5).validate(2).is_err());
        assert!(PenaltySpec::lasso()
            .with_lambda(LambdaSpec::Path { count: 1, ratio: 0.1 })
            .validate(2)
            .is_err());
        assert!(PenaltySpec::lasso().with_factors(vec![1.0]).validate(2).is_err());
        assert!(PenaltySpec::lasso()
            .with_factors(vec![1.0, -1.0])
            .validate(2)
            .is_err());
        assert!(PenaltySpec::ridge().validate(2).is_ok());
    }
}
