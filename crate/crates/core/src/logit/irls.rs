//! Unpenalized logistic regression by Newton-Raphson (IRLS), with a
//! ridge-stabilized refit when the plain fit fails.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::{check_xy, log_likelihood};
use crate::data::NumericMatrix;
use crate::error::Result;
use crate::scalar::sigmoid;

const MAX_ITER: usize = 50;
const TOL: f64 = 1e-10;
/// Standardized coefficients beyond this size are taken as separation.
const DIVERGENCE: f64 = 1e3;
/// Ridge weight of the fallback fit on the mean-loss scale.
const FALLBACK_RIDGE: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogisticFit {
    pub intercept: f64,
    pub coefficients: Vec<f64>,
    pub converged: bool,
    pub iterations: usize,
    /// Ridge weight used; 0 for the plain maximum-likelihood fit.
    pub ridge: f64,
}

impl LogisticFit {
    pub fn fallback(&self) -> bool {
        self.ridge > 0.0
    }

    pub fn predict_proba(&self, x: &NumericMatrix<f64>) -> Vec<f64> {
        super::linear_predictor(x, self.intercept, &self.coefficients)
            .into_iter()
            .map(sigmoid)
            .collect()
    }
}

struct Standardized {
    cols: Vec<Vec<f64>>,
    /// Indices into the original columns of the non-constant features.
    keep: Vec<usize>,
    mean: Vec<f64>,
    sd: Vec<f64>,
}

fn standardize(x: &NumericMatrix<f64>) -> Standardized {
    let n = x.n() as f64;
    let mut out = Standardized {
        cols: Vec::new(),
        keep: Vec::new(),
        mean: Vec::new(),
        sd: Vec::new(),
    };
    for j in 0..x.p() {
        let c = x.column(j);
        let m = c.iter().sum::<f64>() / n;
        let s = (c.iter().map(|&v| (v - m) * (v - m)).sum::<f64>() / n).sqrt();
        if s > 1e-12 * (1.0 + m.abs()) {
            out.cols.push(c.iter().map(|&v| (v - m) / s).collect());
            out.keep.push(j);
            out.mean.push(m);
            out.sd.push(s);
        }
    }
    out
}

fn objective(z: &Standardized, y: &[f64], theta: &DVector<f64>, ridge: f64) -> f64 {
    let eta = eta_of(z, theta, y.len());
    let pen: f64 = theta.iter().skip(1).map(|b| b * b).sum();
    -log_likelihood(&eta, y) / y.len() as f64 + 0.5 * ridge * pen
}

fn eta_of(z: &Standardized, theta: &DVector<f64>, n: usize) -> Vec<f64> {
    let mut eta = vec![theta[0]; n];
    for (k, col) in z.cols.iter().enumerate() {
        let b = theta[k + 1];
        for (e, &v) in eta.iter_mut().zip(col) {
            *e += b * v;
        }
    }
    eta
}

fn newton(z: &Standardized, y: &[f64], ridge: f64) -> (DVector<f64>, bool, usize) {
    let n = y.len();
    let q = z.cols.len() + 1;
    let nf = n as f64;
    let ybar = (y.iter().sum::<f64>() / nf).clamp(1e-10, 1.0 - 1e-10);
    let mut theta = DVector::zeros(q);
    theta[0] = (ybar / (1.0 - ybar)).ln();
    let mut obj = objective(z, y, &theta, ridge);

    for it in 1..=MAX_ITER {
        let eta = eta_of(z, &theta, n);
        let mu: Vec<f64> = eta.iter().map(|&e| sigmoid(e)).collect();
        let w: Vec<f64> = mu.iter().map(|&m| (m * (1.0 - m)).max(1e-12)).collect();
        let mut design = DMatrix::from_element(n, q, 1.0);
        for (k, col) in z.cols.iter().enumerate() {
            design.column_mut(k + 1).copy_from_slice(col);
        }
        let resid = DVector::from_iterator(n, y.iter().zip(&mu).map(|(&v, &m)| v - m));
        let mut grad = design.tr_mul(&resid) / nf;
        let mut weighted = design.clone();
        for (i, &wi) in w.iter().enumerate() {
            weighted.row_mut(i).scale_mut(wi);
        }
        let mut hess = design.tr_mul(&weighted) / nf;
        for k in 1..q {
            grad[k] -= ridge * theta[k];
            hess[(k, k)] += ridge;
        }
        let Some(chol) = hess.cholesky() else {
            return (theta, false, it);
        };
        let step = chol.solve(&grad);

        let mut scale = 1.0;
        let mut next = &theta + &step;
        let mut next_obj = objective(z, y, &next, ridge);
        while !(next_obj <= obj) && scale > 1e-6 {
            scale *= 0.5;
            next = &theta + &step * scale;
            next_obj = objective(z, y, &next, ridge);
        }
        if !(next_obj <= obj) {
            return (theta, false, it);
        }
        theta = next;
        obj = next_obj;
        if theta.iter().skip(1).any(|b| b.abs() > DIVERGENCE) {
            return (theta, false, it);
        }
        if (step * scale).amax() < TOL {
            return (theta, true, it);
        }
    }
    (theta, false, MAX_ITER)
}

fn unstandardize(z: &Standardized, p: usize, theta: &DVector<f64>) -> (f64, Vec<f64>) {
    let mut beta = vec![0.0; p];
    let mut intercept = theta[0];
    for (k, &j) in z.keep.iter().enumerate() {
        beta[j] = theta[k + 1] / z.sd[k];
        intercept -= beta[j] * z.mean[k];
    }
    (intercept, beta)
}

/// Maximum-likelihood logistic fit with intercept.
///
/// Constant columns get a zero coefficient. If Newton fails (singular
/// Hessian, separation, or no convergence), the fit is redone with a small
/// ridge penalty on standardized coefficients and `ridge` records its weight.
pub fn logistic_irls(x: &NumericMatrix<f64>, y: &[u8]) -> Result<LogisticFit> {
    check_xy(x, y)?;
    let yf: Vec<f64> = y.iter().map(|&v| f64::from(v)).collect();
    let z = standardize(x);
    let (mut theta, mut converged, mut iterations) = newton(&z, &yf, 0.0);
    let mut ridge = 0.0;
    if !converged {
        ridge = FALLBACK_RIDGE;
        (theta, converged, iterations) = newton(&z, &yf, ridge);
    }
    let (intercept, coefficients) = unstandardize(&z, x.p(), &theta);
    Ok(LogisticFit {
        intercept,
        coefficients,
        converged,
        iterations,
        ridge,
    })
}
