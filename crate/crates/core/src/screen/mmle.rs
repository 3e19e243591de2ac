//! MMLE: magnitude of the slope from a marginal logistic regression of the
//! response on each scored feature (with intercept).
//!
//! For a categorical feature the likelihood depends only on the per-level
//! trial and success counts, so the Newton iterations run over `K_j` grouped
//! points instead of `n` observations.

use super::{check_inputs, is_constant, score_features, FeatureScore, ScreenerConfig};
use crate::data::{CellTable, Design, Method, ResponseVector, ScreenResult};
use crate::error::Result;
use crate::scalar::{sigmoid, softplus, Scalar};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MarginalFit<T> {
    pub intercept: T,
    pub slope: T,
    pub converged: bool,
    pub iterations: usize,
}

fn log_likelihood<T: Scalar>(x: &[T], trials: &[T], successes: &[T], a: T, b: T) -> T {
    x.iter()
        .zip(trials)
        .zip(successes)
        .map(|((&xv, &t), &s)| {
            let eta = a + b * xv;
            s * eta - t * softplus(eta)
        })
        .sum()
}

/// Newton-Raphson fit of `logit P(Y=1) = a + b·x` on grouped binomial data.
///
/// Iteration stops when both parameter updates fall below `tol`, when the
/// slope magnitude exceeds `cap` (treated as separation), or after
/// `max_iter` steps. Step halving keeps the log-likelihood non-decreasing.
pub fn marginal_logistic<T: Scalar>(
    x: &[T],
    trials: &[T],
    successes: &[T],
    max_iter: usize,
    tol: T,
    cap: T,
) -> MarginalFit<T> {
    let total: T = trials.iter().copied().sum();
    let succ: T = successes.iter().copied().sum();
    let ybar = succ / total;
    let mut a = (ybar / (T::one() - ybar)).ln();
    let mut b = T::zero();
    let mut ll = log_likelihood(x, trials, successes, a, b);
    let half = T::lit(0.5);

    for it in 1..=max_iter {
        let (mut g0, mut g1) = (T::zero(), T::zero());
        let (mut h00, mut h01, mut h11) = (T::zero(), T::zero(), T::zero());
        for ((&xv, &t), &s) in x.iter().zip(trials).zip(successes) {
            let mu = sigmoid(a + b * xv);
            let r = s - t * mu;
            let w = t * mu * (T::one() - mu);
            g0 += r;
            g1 += r * xv;
            h00 += w;
            h01 += w * xv;
            h11 += w * xv * xv;
        }
        let det = h00 * h11 - h01 * h01;
        if !(det > T::epsilon() * h00 * h11) {
            return MarginalFit {
                intercept: a,
                slope: b,
                converged: false,
                iterations: it,
            };
        }
        let da = (h11 * g0 - h01 * g1) / det;
        let db = (h00 * g1 - h01 * g0) / det;

        let mut step = T::one();
        let mut next = (a + da, b + db);
        let mut next_ll = log_likelihood(x, trials, successes, next.0, next.1);
        while next_ll < ll && step > T::lit(1e-4) {
            step = step * half;
            next = (a + step * da, b + step * db);
            next_ll = log_likelihood(x, trials, successes, next.0, next.1);
        }
        a = next.0;
        b = next.1;
        ll = next_ll;

        if b.abs() > cap {
            return MarginalFit {
                intercept: a,
                slope: b,
                converged: false,
                iterations: it,
            };
        }
        if (step * da).abs() < tol && (step * db).abs() < tol {
            return MarginalFit {
                intercept: a,
                slope: b,
                converged: true,
                iterations: it,
            };
        }
    }
    MarginalFit {
        intercept: a,
        slope: b,
        converged: false,
        iterations: max_iter,
    }
}

fn slope_score<T: Scalar>(fit: MarginalFit<T>, cap: T) -> FeatureScore<T> {
    if fit.converged && fit.slope.abs() <= cap {
        FeatureScore::ok(fit.slope.abs())
    } else {
        FeatureScore {
            score: cap,
            degenerate: false,
            flagged: true,
        }
    }
}

/// Scores each feature by `|β̂_j|` from its marginal logistic fit.
///
/// Separation or non-convergence clamps the score to the coefficient cap and
/// sets the feature's `flagged` bit.
pub fn mmle<T: Scalar>(
    design: &Design<T>,
    y: &ResponseVector<T>,
    cfg: &ScreenerConfig,
) -> Result<ScreenResult<T>> {
    cfg.validate()?;
    check_inputs(design, y)?;
    let labels = y.labels()?;
    let tol = T::lit(cfg.mmle_tol);
    let cap = T::lit(cfg.mmle_coef_cap);
    let max_iter = cfg.mmle_max_iter;
    let p = design.p();

    match design {
        Design::Categorical(d) => Ok(score_features(Method::Mmle, p, |j| {
            let cells = CellTable::tabulate(d.column(j), &labels, d.level_scores(j));
            if cells.occupied_levels() < 2 {
                return FeatureScore::degenerate();
            }
            let occupied: Vec<usize> = (0..cells.levels())
                .filter(|&k| cells.level_total(k) > 0)
                .collect();
            let x: Vec<T> = occupied.iter().map(|&k| cells.scores()[k]).collect();
            let t: Vec<T> = occupied
                .iter()
                .map(|&k| T::from_usize_lossy(cells.level_total(k)))
                .collect();
            let s: Vec<T> = occupied
                .iter()
                .map(|&k| T::from_usize_lossy(cells.count(k, 1)))
                .collect();
            slope_score(marginal_logistic(&x, &t, &s, max_iter, tol, cap), cap)
        })),
        Design::Numeric(m) => {
            let ones = vec![T::one(); m.n()];
            let yv = y.values();
            Ok(score_features(Method::Mmle, p, |j| {
                let x = m.column(j);
                if is_constant(x) {
                    return FeatureScore::degenerate();
                }
                slope_score(marginal_logistic(x, &ones, yv, max_iter, tol, cap), cap)
            }))
        }
    }
}
