//! Regularization path by iteratively reweighted least squares (outer) and
//! cyclic coordinate descent with soft-thresholding (inner).

use serde::{Deserialize, Serialize};

use super::{check_xy, null_log_likelihood, LambdaSpec, PenaltySpec};
use crate::data::NumericMatrix;
use crate::error::Result;
use crate::scalar::{sigmoid, softplus};

/// Floor on IRLS weights, keeping the quadratic model well posed when
/// fitted probabilities approach 0 or 1.
const MIN_WEIGHT: f64 = 1e-5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PathOptions {
    pub max_outer: usize,
    /// Cap on coordinate-descent passes per outer iteration.
    pub max_passes: usize,
    /// Target for the largest KKT residual at each returned solution.
    pub kkt_tol: f64,
    /// Once the deviance ratio reaches this value the remaining (smaller)
    /// `λ` values reuse the last solution.
    pub saturation: f64,
}

impl Default for PathOptions {
    fn default() -> Self {
        Self {
            max_outer: 100,
            max_passes: 10_000,
            kkt_tol: 1e-9,
            saturation: 0.999,
        }
    }
}

/// Coefficients along a `λ` sequence, on the original feature scale.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GlmPath {
    pub alpha: f64,
    pub lambdas: Vec<f64>,
    pub intercepts: Vec<f64>,
    pub coefficients: Vec<Vec<f64>>,
    pub penalty_factors: Vec<f64>,
    pub converged: Vec<bool>,
    /// Largest KKT residual at each solution.
    pub kkt: Vec<f64>,
    /// First path index whose solution was copied from its predecessor.
    pub saturated_from: Option<usize>,
    /// Whether every outer iteration at that `λ` kept the objective
    /// non-increasing.
    pub descent: Vec<bool>,
}

impl GlmPath {
    pub fn len(&self) -> usize {
        self.lambdas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lambdas.is_empty()
    }

    pub fn model_size(&self, k: usize) -> usize {
        self.coefficients[k].iter().filter(|&&b| b != 0.0).count()
    }
}

/// Standardized problem data shared by all fits on one dataset.
pub(crate) struct Problem {
    pub z: Vec<Vec<f64>>,
    pub mean: Vec<f64>,
    /// Zero for constant columns, which are never updated.
    pub sd: Vec<f64>,
    pub y: Vec<f64>,
    pub factors: Vec<f64>,
}

impl Problem {
    pub fn new(x: &NumericMatrix<f64>, y: &[u8], factors: Vec<f64>) -> Self {
        let n = x.n() as f64;
        let mut z = Vec::with_capacity(x.p());
        let mut mean = Vec::with_capacity(x.p());
        let mut sd = Vec::with_capacity(x.p());
        for j in 0..x.p() {
            let c = x.column(j);
            let m = c.iter().sum::<f64>() / n;
            let s = (c.iter().map(|&v| (v - m) * (v - m)).sum::<f64>() / n).sqrt();
            if s > 1e-12 * (1.0 + m.abs()) {
                z.push(c.iter().map(|&v| (v - m) / s).collect());
                sd.push(s);
            } else {
                z.push(vec![0.0; c.len()]);
                sd.push(0.0);
            }
            mean.push(m);
        }
        Self {
            z,
            mean,
            sd,
            y: y.iter().map(|&v| f64::from(v)).collect(),
            factors,
        }
    }

    fn n(&self) -> usize {
        self.y.len()
    }

    fn p(&self) -> usize {
        self.z.len()
    }

    fn eta(&self, b0: f64, b: &[f64]) -> Vec<f64> {
        let mut eta = vec![b0; self.n()];
        for (col, &bj) in self.z.iter().zip(b) {
            if bj != 0.0 {
                for (e, &v) in eta.iter_mut().zip(col) {
                    *e += bj * v;
                }
            }
        }
        eta
    }

    fn penalty(&self, lambda: f64, alpha: f64, b: &[f64]) -> f64 {
        lambda
            * b.iter()
                .zip(&self.factors)
                .map(|(&bj, &f)| f * (0.5 * (1.0 - alpha) * bj * bj + alpha * bj.abs()))
                .sum::<f64>()
    }

    fn objective(&self, lambda: f64, alpha: f64, b0: f64, b: &[f64]) -> f64 {
        let eta = self.eta(b0, b);
        let loss: f64 = eta
            .iter()
            .zip(&self.y)
            .map(|(&e, &v)| softplus(e) - v * e)
            .sum::<f64>()
            / self.n() as f64;
        loss + self.penalty(lambda, alpha, b)
    }

    pub fn kkt(&self, lambda: f64, alpha: f64, b0: f64, b: &[f64]) -> f64 {
        let eta = self.eta(b0, b);
        let nf = self.n() as f64;
        let resid: Vec<f64> = eta
            .iter()
            .zip(&self.y)
            .map(|(&e, &v)| v - sigmoid(e))
            .collect();
        let mut worst = (resid.iter().sum::<f64>() / nf).abs();
        for j in 0..self.p() {
            if self.sd[j] == 0.0 {
                continue;
            }
            let g = -self.z[j].iter().zip(&resid).map(|(a, r)| a * r).sum::<f64>() / nf;
            let f = self.factors[j];
            let v = if b[j] == 0.0 {
                (g.abs() - lambda * alpha * f).max(0.0)
            } else {
                (g + lambda * (1.0 - alpha) * f * b[j] + lambda * alpha * f * b[j].signum()).abs()
            };
            worst = worst.max(v);
        }
        worst
    }

    pub fn lambda_max(&self, alpha: f64) -> f64 {
        let nf = self.n() as f64;
        let ybar = self.y.iter().sum::<f64>() / nf;
        let mut best = 0.0f64;
        for j in 0..self.p() {
            let f = self.factors[j];
            if self.sd[j] == 0.0 || f <= 0.0 {
                continue;
            }
            let g = self.z[j]
                .iter()
                .zip(&self.y)
                .map(|(a, &v)| a * (v - ybar))
                .sum::<f64>()
                .abs()
                / nf;
            best = best.max(g / f);
        }
        best / alpha.max(1e-3)
    }

    pub fn lambdas(&self, alpha: f64, spec: LambdaSpec) -> Vec<f64> {
        match spec {
            LambdaSpec::Fixed(l) => vec![l],
            LambdaSpec::Path { count, ratio } => {
                let top = self.lambda_max(alpha).max(f64::MIN_POSITIVE);
                (0..count)
                    .map(|k| top * ratio.powf(k as f64 / (count - 1) as f64))
                    .collect()
            }
        }
    }

    fn to_original(&self, b0: f64, b: &[f64]) -> (f64, Vec<f64>) {
        let mut beta = vec![0.0; b.len()];
        let mut intercept = b0;
        for j in 0..b.len() {
            if self.sd[j] > 0.0 && b[j] != 0.0 {
                beta[j] = b[j] / self.sd[j];
                intercept -= beta[j] * self.mean[j];
            }
        }
        (intercept, beta)
    }

    pub fn to_standardized(&self, intercept: f64, beta: &[f64]) -> (f64, Vec<f64>) {
        let mut b = vec![0.0; beta.len()];
        let mut b0 = intercept;
        for j in 0..beta.len() {
            b[j] = beta[j] * self.sd[j];
            b0 += beta[j] * self.mean[j];
        }
        (b0, b)
    }

    /// One coordinate-descent pass over `coords` on the weighted
    /// least-squares model. Returns the largest gradient-scale change.
    #[allow(clippy::too_many_arguments)]
    fn cd_pass(
        &self,
        coords: &[usize],
        lambda: f64,
        alpha: f64,
        w: &[f64],
        xv: &[f64],
        sum_w: f64,
        r: &mut [f64],
        b0: &mut f64,
        b: &mut [f64],
    ) -> f64 {
        let nf = self.n() as f64;
        let d0 = r.iter().zip(w).map(|(ri, wi)| ri * wi).sum::<f64>() / sum_w;
        let mut worst = (d0 * sum_w / nf).abs();
        if d0 != 0.0 {
            *b0 += d0;
            r.iter_mut().for_each(|ri| *ri -= d0);
        }
        for &j in coords {
            if xv[j] == 0.0 {
                continue;
            }
            let col = &self.z[j];
            let g = col
                .iter()
                .zip(w)
                .zip(r.iter())
                .map(|((a, wi), ri)| a * wi * ri)
                .sum::<f64>()
                / nf;
            let f = self.factors[j];
            let u = g + xv[j] * b[j];
            let thr = lambda * alpha * f;
            let shrunk = if u > thr {
                u - thr
            } else if u < -thr {
                u + thr
            } else {
                0.0
            };
            let next = shrunk / (xv[j] + lambda * (1.0 - alpha) * f);
            let d = next - b[j];
            if d != 0.0 {
                for (ri, &a) in r.iter_mut().zip(col) {
                    *ri -= d * a;
                }
                b[j] = next;
                worst = worst.max(d.abs() * xv[j]);
            }
        }
        worst
    }

    /// Minimizes the penalized objective at one `λ`, starting from
    /// `(b0, b)`. Returns `(converged, kkt residual, descent held)`.
    pub fn solve(
        &self,
        lambda: f64,
        alpha: f64,
        b0: &mut f64,
        b: &mut [f64],
        opts: &PathOptions,
    ) -> (bool, f64, bool) {
        let n = self.n();
        let nf = n as f64;
        let all: Vec<usize> = (0..self.p()).filter(|&j| self.sd[j] > 0.0).collect();
        let inner_tol = 0.1 * opts.kkt_tol;
        let mut obj = self.objective(lambda, alpha, *b0, b);
        let mut descent = true;

        for _ in 0..opts.max_outer {
            let kkt = self.kkt(lambda, alpha, *b0, b);
            if kkt <= opts.kkt_tol {
                return (true, kkt, descent);
            }
            let eta = self.eta(*b0, b);
            let mu: Vec<f64> = eta.iter().map(|&e| sigmoid(e)).collect();
            let w: Vec<f64> = mu.iter().map(|&m| (m * (1.0 - m)).max(MIN_WEIGHT)).collect();
            let sum_w: f64 = w.iter().sum();
            let mut r: Vec<f64> = self
                .y
                .iter()
                .zip(&mu)
                .zip(&w)
                .map(|((&v, &m), &wi)| (v - m) / wi)
                .collect();
            let xv: Vec<f64> = (0..self.p())
                .map(|j| {
                    if self.sd[j] == 0.0 {
                        0.0
                    } else {
                        self.z[j].iter().zip(&w).map(|(a, wi)| a * a * wi).sum::<f64>() / nf
                    }
                })
                .collect();

            let old0 = *b0;
            let old = b.to_vec();
            let mut passes = 0;
            'inner: loop {
                passes += 1;
                let change = self.cd_pass(&all, lambda, alpha, &w, &xv, sum_w, &mut r, b0, b);
                if change < inner_tol || passes >= opts.max_passes {
                    break;
                }
                let active: Vec<usize> = all.iter().copied().filter(|&j| b[j] != 0.0).collect();
                loop {
                    passes += 1;
                    let change =
                        self.cd_pass(&active, lambda, alpha, &w, &xv, sum_w, &mut r, b0, b);
                    if passes >= opts.max_passes {
                        break 'inner;
                    }
                    if change < inner_tol {
                        break;
                    }
                }
            }

            let mut next_obj = self.objective(lambda, alpha, *b0, b);
            let slack = 1e-13 * (1.0 + obj.abs());
            if next_obj > obj + slack {
                let target0 = *b0;
                let target = b.to_vec();
                let mut t = 1.0;
                while next_obj > obj + slack && t > 1e-10 {
                    t *= 0.5;
                    *b0 = old0 + t * (target0 - old0);
                    for j in 0..b.len() {
                        b[j] = old[j] + t * (target[j] - old[j]);
                    }
                    next_obj = self.objective(lambda, alpha, *b0, b);
                }
                if next_obj > obj + slack {
                    *b0 = old0;
                    b.copy_from_slice(&old);
                    descent = false;
                    break;
                }
            }
            obj = next_obj;
        }
        let kkt = self.kkt(lambda, alpha, *b0, b);
        (kkt <= opts.kkt_tol, kkt, descent)
    }

    /// Fits every `λ` in order with warm starts.
    pub fn path(&self, alpha: f64, lambdas: &[f64], opts: &PathOptions) -> GlmPath {
        let nf = self.n() as f64;
        let ybar = (self.y.iter().sum::<f64>() / nf).clamp(1e-12, 1.0 - 1e-12);
        let mut b0 = (ybar / (1.0 - ybar)).ln();
        let mut b = vec![0.0; self.p()];
        let ll0 = null_log_likelihood(&self.y);
        let mut out = GlmPath {
            alpha,
            lambdas: lambdas.to_vec(),
            intercepts: Vec::with_capacity(lambdas.len()),
            coefficients: Vec::with_capacity(lambdas.len()),
            penalty_factors: self.factors.clone(),
            converged: Vec::with_capacity(lambdas.len()),
            kkt: Vec::with_capacity(lambdas.len()),
            saturated_from: None,
            descent: Vec::with_capacity(lambdas.len()),
        };
        for (k, &lambda) in lambdas.iter().enumerate() {
            if out.saturated_from.is_some() {
                let last = out.len_filled() - 1;
                out.push_copy(last);
                continue;
            }
            let (conv, kkt, descent) = self.solve(lambda, alpha, &mut b0, &mut b, opts);
            let (intercept, beta) = self.to_original(b0, &b);
            out.intercepts.push(intercept);
            out.coefficients.push(beta);
            out.converged.push(conv);
            out.kkt.push(kkt);
            out.descent.push(descent);
            if ll0 < 0.0 {
                let eta = self.eta(b0, &b);
                let ll: f64 = eta
                    .iter()
                    .zip(&self.y)
                    .map(|(&e, &v)| v * e - softplus(e))
                    .sum();
                if 1.0 - ll / ll0 >= opts.saturation && k + 1 < lambdas.len() {
                    out.saturated_from = Some(k + 1);
                }
            }
        }
        out
    }
}

impl GlmPath {
    fn len_filled(&self) -> usize {
        self.intercepts.len()
    }

    fn push_copy(&mut self, k: usize) {
        self.intercepts.push(self.intercepts[k]);
        self.coefficients.push(self.coefficients[k].clone());
        self.converged.push(self.converged[k]);
        self.kkt.push(self.kkt[k]);
        self.descent.push(self.descent[k]);
    }
}

/// Largest `λ` on the path for `alpha`: the smallest value at which every
/// penalized coefficient is zero.
pub fn lambda_max(x: &NumericMatrix<f64>, y: &[u8], pen: &PenaltySpec) -> Result<f64> {
    check_xy(x, y)?;
    pen.validate(x.p())?;
    Ok(Problem::new(x, y, pen.factors(x.p())).lambda_max(pen.alpha))
}

/// Solutions along the `λ` sequence described by `pen`.
pub fn fit_glm_path(
    x: &NumericMatrix<f64>,
    y: &[u8],
    pen: &PenaltySpec,
    opts: &PathOptions,
) -> Result<GlmPath> {
    check_xy(x, y)?;
    pen.validate(x.p())?;
    let pr = Problem::new(x, y, pen.factors(x.p()));
    let lambdas = pr.lambdas(pen.alpha, pen.lambda);
    Ok(pr.path(pen.alpha, &lambdas, opts))
}

/// Largest KKT residual of `(intercept, beta)` for the penalized objective,
/// measured on the standardized scale where the penalty applies.
pub fn kkt_violation(
    x: &NumericMatrix<f64>,
    y: &[u8],
    pen: &PenaltySpec,
    lambda: f64,
    intercept: f64,
    beta: &[f64],
) -> Result<f64> {
    check_xy(x, y)?;
    pen.validate(x.p())?;
    let pr = Problem::new(x, y, pen.factors(x.p()));
    let (b0, b) = pr.to_standardized(intercept, beta);
    Ok(pr.kkt(lambda, pen.alpha, b0, &b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rand_distr::StandardNormal;

    fn random_problem(n: usize, p: usize, seed: u64) -> (NumericMatrix<f64>, Vec<u8>) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let cols: Vec<Vec<f64>> = (0..p)
            .map(|_| (0..n).map(|_| rng.sample(StandardNormal)).collect())
            .collect();
        let y = (0..n)
            .map(|i| {
                let eta = 0.8 * cols[0][i] - 0.5 * cols[1 % p][i];
                u8::from(rng.random::<f64>() < sigmoid(eta))
            })
            .collect();
        (NumericMatrix::from_columns(cols).unwrap(), y)
    }

    #[test]
    fn lambda_max_gives_empty_model_with_logit_intercept() {
        let (x, y) = random_problem(80, 6, 1);
        let path = fit_glm_path(&x, &y, &PenaltySpec::lasso(), &PathOptions::default()).unwrap();
        assert_eq!(path.model_size(0), 0);
        let ybar = y.iter().map(|&v| f64::from(v)).sum::<f64>() / 80.0;
        assert_abs_diff_eq!(path.intercepts[0], (ybar / (1.0 - ybar)).ln(), epsilon = 1e-9);
        assert!(path.model_size(1) >= 1);
    }

    #[test]
    fn kkt_holds_along_the_path() {
        for (seed, alpha) in [(2, 1.0), (3, 0.5), (4, 0.0)] {
            let (x, y) = random_problem(60, 5, seed);
            let pen = PenaltySpec::elastic_net(alpha);
            let path = fit_glm_path(&x, &y, &pen, &PathOptions::default()).unwrap();
            assert_eq!(path.len(), 100);
            for k in 0..path.len() {
                let v = kkt_violation(
                    &x,
                    &y,
                    &pen,
                    path.lambdas[k],
                    path.intercepts[k],
                    &path.coefficients[k],
                )
                .unwrap();
                assert!(v <= 1e-6, "alpha {alpha} k {k} residual {v}");
                assert!(path.descent[k]);
            }
        }
    }

    #[test]
    fn rescaling_a_column_rescales_its_coefficient() {
        let (x, y) = random_problem(70, 4, 5);
        let big = x.scale_column(2, 1000.0);
        let pen = PenaltySpec::lasso().with_lambda(LambdaSpec::Fixed(0.01));
        let a = fit_glm_path(&x, &y, &pen, &PathOptions::default()).unwrap();
        let b = fit_glm_path(&big, &y, &pen, &PathOptions::default()).unwrap();
        assert_abs_diff_eq!(a.coefficients[0][2], 1000.0 * b.coefficients[0][2], epsilon = 1e-8);
        let pa = super::super::linear_predictor(&x, a.intercepts[0], &a.coefficients[0]);
        let pb = super::super::linear_predictor(&big, b.intercepts[0], &b.coefficients[0]);
        for (u, v) in pa.iter().zip(&pb) {
            assert_abs_diff_eq!(sigmoid(*u), sigmoid(*v), epsilon = 1e-8);
        }
    }

    #[test]
    fn first_active_feature_attains_lambda_max() {
        let (x, y) = random_problem(100, 8, 6);
        let pr = Problem::new(&x, &y, vec![1.0; 8]);
        let ybar = pr.y.iter().sum::<f64>() / 100.0;
        let g: Vec<f64> = pr
            .z
            .iter()
            .map(|c| c.iter().zip(&pr.y).map(|(a, v)| a * (v - ybar)).sum::<f64>().abs())
            .collect();
        let top = (0..8).max_by(|&a, &b| g[a].total_cmp(&g[b])).unwrap();
        let path = fit_glm_path(&x, &y, &PenaltySpec::lasso(), &PathOptions::default()).unwrap();
        let first = (0..path.len()).find(|&k| path.model_size(k) > 0).unwrap();
        let active: Vec<usize> =
            (0..8).filter(|&j| path.coefficients[first][j] != 0.0).collect();
        assert_eq!(active, vec![top]);
    }

    #[test]
    fn local_optimality_probe() {
        let (x, y) = random_problem(20, 2, 7);
        let pen = PenaltySpec::elastic_net(0.7).with_lambda(LambdaSpec::Fixed(0.02));
        let path = fit_glm_path(&x, &y, &pen, &PathOptions::default()).unwrap();
        let pr = Problem::new(&x, &y, vec![1.0; 2]);
        let (b0, b) = pr.to_standardized(path.intercepts[0], &path.coefficients[0]);
        let best = pr.objective(0.02, 0.7, b0, &b);
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..1000 {
            let mut pb = b.clone();
            let pb0 = b0 + 1e-3 * (2.0 * rng.random::<f64>() - 1.0);
            for v in pb.iter_mut() {
                *v += 1e-3 * (2.0 * rng.random::<f64>() - 1.0);
            }
            assert!(pr.objective(0.02, 0.7, pb0, &pb) >= best - 1e-12);
        }
    }
}
