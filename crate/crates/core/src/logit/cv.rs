//! Cross-validated tuning: lasso/elastic-net `λ` selection, the adaptive
//! lasso, and the elastic-net `α` grid.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::path::{PathOptions, Problem};
use super::{check_xy, fit_metrics, linear_predictor, PenalizedFit, PenaltySpec, EXCLUDED_FACTOR};
use crate::data::NumericMatrix;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CvOptions {
    pub folds: usize,
    pub seed: u64,
    pub path: PathOptions,
}

impl Default for CvOptions {
    fn default() -> Self {
        Self {
            folds: 10,
            seed: 0,
            path: PathOptions::default(),
        }
    }
}

impl CvOptions {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_folds(mut self, folds: usize) -> Self {
        self.folds = folds;
        self
    }
}

/// Fold label per observation; each class is shuffled and dealt round-robin
/// so every fold gets a near-equal share of both classes.
pub fn stratified_folds(y: &[u8], folds: usize, seed: u64) -> Vec<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = vec![0; y.len()];
    let mut next = 0;
    for class in [0u8, 1] {
        let mut idx: Vec<usize> = (0..y.len()).filter(|&i| y[i] == class).collect();
        idx.shuffle(&mut rng);
        for i in idx {
            out[i] = next % folds;
            next += 1;
        }
    }
    out
}

/// Misclassified held-out observations per path point for one fold.
#[allow(clippy::too_many_arguments)]
fn fold_errors(
    x: &NumericMatrix<f64>,
    y: &[u8],
    fold_of: &[usize],
    fold: usize,
    factors: &[f64],
    alpha: f64,
    lambdas: &[f64],
    opts: &PathOptions,
) -> (Vec<usize>, bool) {
    let train: Vec<usize> = (0..y.len()).filter(|&i| fold_of[i] != fold).collect();
    let test: Vec<usize> = (0..y.len()).filter(|&i| fold_of[i] == fold).collect();
    let y_train: Vec<u8> = train.iter().map(|&i| y[i]).collect();
    let y_test: Vec<u8> = test.iter().map(|&i| y[i]).collect();
    let ones = y_train.iter().filter(|&&v| v == 1).count();
    if ones == 0 || ones == y_train.len() {
        let guess = u8::from(ones > 0);
        let wrong = y_test.iter().filter(|&&v| v != guess).count();
        return (vec![wrong; lambdas.len()], true);
    }
    let pr = Problem::new(&x.select_rows(&train), &y_train, factors.to_vec());
    let path = pr.path(alpha, lambdas, opts);
    let x_test = x.select_rows(&test);
    let errors = (0..lambdas.len())
        .map(|k| {
            linear_predictor(&x_test, path.intercepts[k], &path.coefficients[k])
                .iter()
                .zip(&y_test)
                .filter(|(&eta, &v)| u8::from(eta >= 0.0) != v)
                .count()
        })
        .collect();
    (errors, false)
}

/// Stratified `k`-fold cross-validation over the `λ` path.
///
/// The path is computed once on the full data and reused by every fold. The
/// chosen `λ` minimizes pooled misclassification; ties go to the largest
/// `λ`. The returned coefficients are the full-data solution at that `λ`.
pub fn cv_select(
    x: &NumericMatrix<f64>,
    y: &[u8],
    pen: &PenaltySpec,
    opts: &CvOptions,
) -> Result<PenalizedFit> {
    check_xy(x, y)?;
    pen.validate(x.p())?;
    if opts.folds < 2 {
        return Err(Error::Config("cross-validation needs at least 2 folds".into()));
    }
    let n = x.n();
    if n < opts.folds {
        return Err(Error::TooFewObservations {
            need: opts.folds,
            got: n,
        });
    }
    let factors = pen.factors(x.p());
    let pr = Problem::new(x, y, factors.clone());
    let lambdas = pr.lambdas(pen.alpha, pen.lambda);
    let full = pr.path(pen.alpha, &lambdas, &opts.path);

    let fold_of = stratified_folds(y, opts.folds, opts.seed);
    let per_fold: Vec<(Vec<usize>, bool)> = (0..opts.folds)
        .into_par_iter()
        .map(|f| fold_errors(x, y, &fold_of, f, &factors, pen.alpha, &lambdas, &opts.path))
        .collect();
    let mut totals = vec![0usize; lambdas.len()];
    for (errs, _) in &per_fold {
        for (t, e) in totals.iter_mut().zip(errs) {
            *t += e;
        }
    }
    let flagged_folds = (0..opts.folds).filter(|&f| per_fold[f].1).collect();
    let best = totals.iter().copied().min().unwrap_or(0);
    let chosen = totals.iter().position(|&t| t == best).unwrap_or(0);

    let intercept = full.intercepts[chosen];
    let coefficients = full.coefficients[chosen].clone();
    let metrics = fit_metrics(x, y, intercept, &coefficients);
    Ok(PenalizedFit {
        intercept,
        coefficients,
        chosen_lambda: lambdas[chosen],
        chosen_alpha: pen.alpha,
        cv_curve: totals.iter().map(|&t| t as f64 / n as f64).collect(),
        lambda_path: lambdas,
        penalty_factors: factors,
        metrics,
        flagged_folds,
        converged: full.converged[chosen],
    })
}

/// Column standard deviations with `1/n` normalization.
fn column_sd(x: &NumericMatrix<f64>) -> Vec<f64> {
    let n = x.n() as f64;
    (0..x.p())
        .map(|j| {
            let c = x.column(j);
            let m = c.iter().sum::<f64>() / n;
            (c.iter().map(|&v| (v - m) * (v - m)).sum::<f64>() / n).sqrt()
        })
        .collect()
}

/// Adaptive-lasso penalty factors `1/|β̂_j|` from standardized-scale ridge
/// coefficients; numerically zero coefficients get [`EXCLUDED_FACTOR`].
pub fn adaptive_factors(x: &NumericMatrix<f64>, ridge_beta: &[f64]) -> Vec<f64> {
    column_sd(x)
        .iter()
        .zip(ridge_beta)
        .map(|(&s, &b)| {
            let bs = (b * s).abs();
            if bs < 1e-10 {
                EXCLUDED_FACTOR
            } else {
                1.0 / bs
            }
        })
        .collect()
}

/// Ridge fit with cross-validated `λ`, then a cross-validated lasso whose
/// penalty factors come from the ridge coefficients.
pub fn adaptive_lasso(x: &NumericMatrix<f64>, y: &[u8], opts: &CvOptions) -> Result<PenalizedFit> {
    let ridge = cv_select(x, y, &PenaltySpec::ridge(), opts)?;
    let factors = adaptive_factors(x, &ridge.coefficients);
    cv_select(x, y, &PenaltySpec::lasso().with_factors(factors), opts)
}

/// The `α = k/100` grid, `k = 1..=99`.
pub fn default_alpha_grid() -> Vec<f64> {
    (1..100).map(|k| k as f64 / 100.0).collect()
}

/// Cross-validated elastic net at every `α` in `grid`; the fit with the
/// lowest CV misclassification wins, ties going to the smaller `α`.
pub fn elastic_net_grid(
    x: &NumericMatrix<f64>,
    y: &[u8],
    grid: &[f64],
    opts: &CvOptions,
) -> Result<PenalizedFit> {
    if grid.is_empty() {
        return Err(Error::Config("alpha grid must not be empty".into()));
    }
    let fits: Vec<PenalizedFit> = grid
        .par_iter()
        .map(|&a| cv_select(x, y, &PenaltySpec::elastic_net(a), opts))
        .collect::<Result<_>>()?;
    let best = (0..fits.len())
        .min_by(|&a, &b| {
            fits[a]
                .cv_error()
                .total_cmp(&fits[b].cv_error())
                .then(grid[a].total_cmp(&grid[b]))
        })
        .unwrap_or(0);
    Ok(fits.into_iter().nth(best).expect("grid is non-empty"))
}
