//! Two-stage iterative screening followed by penalized logistic
//! post-screening.
//!
//! Stage 1 keeps the top `p₁` features by marginal screening. Stage 2 fits a
//! logistic model on them and ranks the remaining features by the absolute
//! correlation of their scored values with the working residuals `y − p̂`,
//! keeping `p₂ = [n / log n] − p₁`. The split `p₁` minimizes held-out mean
//! squared prediction error over shared random train/test splits.

use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::{Design, Method, ResponseVector};
use crate::error::{Error, Result};
use crate::logit::{
    adaptive_lasso, cv_select, default_alpha_grid, elastic_net_grid, logistic_irls, CvOptions,
    PenalizedFit, PenaltySpec,
};
use crate::rng::{replicate_seed, stream_rng};
use crate::screen::{screen, ScreenerConfig};

/// Upper end of the `p₁` search and the combined screened size, `[n / log n]`.
pub fn p1_upper(n: usize) -> usize {
    let nf = n as f64;
    (nf / nf.ln()).round() as usize
}

/// Size of the truncated model handed to post-screening,
/// `[n^{4/5} / log(n^{4/5})]`.
pub fn final_d(n: usize) -> usize {
    let m = (n as f64).powf(0.8);
    (m / m.ln()).round() as usize
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PostMethod {
    Lasso,
    Adaptive,
    Enet,
}

impl PostMethod {
    pub const ALL: [PostMethod; 3] = [PostMethod::Lasso, PostMethod::Adaptive, PostMethod::Enet];

    pub fn label(self) -> &'static str {
        match self {
            PostMethod::Lasso => "Lasso",
            PostMethod::Adaptive => "Adaptive Lasso",
            PostMethod::Enet => "Elastic Net",
        }
    }
}

impl std::str::FromStr for PostMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "lasso" => Ok(PostMethod::Lasso),
            "adaptive" | "adaptive-lasso" => Ok(PostMethod::Adaptive),
            "enet" | "elastic-net" => Ok(PostMethod::Enet),
            other => Err(Error::Config(format!("unknown post-screening method `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum P1Search {
    /// Every `p₁` in range.
    Exhaustive,
    /// Every `stride`-th `p₁`, then every value within `stride` of the best.
    CoarseToFine { stride: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineSpec {
    pub screener: Method,
    pub p1_min: usize,
    /// Defaults to [`p1_upper`] of the sample size.
    pub p1_max: Option<usize>,
    pub tuning_reps: usize,
    pub train_fraction: f64,
    /// Defaults to [`final_d`] of the sample size.
    pub final_d: Option<usize>,
    pub post_methods: Vec<PostMethod>,
    pub search: P1Search,
    pub alpha_grid: Vec<f64>,
    pub cv_folds: usize,
    /// Drop features whose iterative score is not strictly positive before
    /// truncating.
    pub positive_only: bool,
    pub seed: u64,
}

impl Default for PipelineSpec {
    fn default() -> Self {
        Self {
            screener: Method::CatSis,
            p1_min: 5,
            p1_max: None,
            tuning_reps: 200,
            train_fraction: 0.75,
            final_d: None,
            post_methods: PostMethod::ALL.to_vec(),
            search: P1Search::CoarseToFine { stride: 8 },
            alpha_grid: default_alpha_grid(),
            cv_folds: 10,
            positive_only: false,
            seed: 0,
        }
    }
}

impl PipelineSpec {
    pub fn validate(&self, n: usize, p: usize) -> Result<()> {
        let total = p1_upper(n);
        if p < total {
            return Err(Error::Config(format!(
                "pipeline needs p >= [n / log n] = {total}, got p = {p}"
            )));
        }
        let hi = self.p1_max.unwrap_or(total);
        if self.p1_min == 0 || self.p1_min > hi || hi > total {
            return Err(Error::Config(format!(
                "p1 range {}..={hi} must lie within 1..={total}",
                self.p1_min
            )));
        }
        if !(self.train_fraction > 0.0 && self.train_fraction < 1.0) {
            return Err(Error::Config("train fraction must lie in (0, 1)".into()));
        }
        if self.tuning_reps == 0 {
            return Err(Error::Config("tuning_reps must be at least 1".into()));
        }
        if let P1Search::CoarseToFine { stride: 0 } = self.search {
            return Err(Error::Config("search stride must be at least 1".into()));
        }
        if self.final_d == Some(0) {
            return Err(Error::Config("final_d must be at least 1".into()));
        }
        if self.post_methods.contains(&PostMethod::Enet) && self.alpha_grid.is_empty() {
            return Err(Error::Config("alpha grid must not be empty".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterativeScreen {
    /// Combined features in descending order of iterative score.
    pub ranking: Vec<usize>,
    /// Iterative score per entry of `ranking`: the marginal statistic for
    /// stage-1 features, the residual correlation for stage-2 features.
    pub scores: Vec<f64>,
    pub stage1: Vec<usize>,
    pub stage2: Vec<usize>,
    pub p1: usize,
    pub p2: usize,
    /// `(p₁, mean held-out MSPE)` for every candidate evaluated.
    pub mspe_curve: Vec<(usize, f64)>,
    /// Logistic fits that needed the ridge-stabilized fallback.
    pub fallback_fits: usize,
}

/// Absolute plug-in correlation (`1/n` moments); 0 when either side is
/// constant.
fn abs_correlation(x: &[f64], r: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let mr = r.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (&a, &b) in x.iter().zip(r) {
        sxy += (a - mx) * (b - mr);
        sxx += (a - mx) * (a - mx);
        syy += (b - mr) * (b - mr);
    }
    if sxx <= 0.0 || syy <= 0.0 {
        return 0.0;
    }
    (sxy / (sxx * syy).sqrt()).abs()
}

struct Stage2 {
    features: Vec<usize>,
    scores: Vec<f64>,
    fallback: bool,
}

fn stage2(
    design: &Design<f64>,
    labels: &[u8],
    stage1: &[usize],
    p2: usize,
) -> Result<Stage2> {
    let fit = logistic_irls(&design.to_numeric(stage1), labels)?;
    let mu = fit.predict_proba(&design.to_numeric(stage1));
    let resid: Vec<f64> = labels
        .iter()
        .zip(&mu)
        .map(|(&v, &m)| f64::from(v) - m)
        .collect();
    let mut in_stage1 = vec![false; design.p()];
    for &j in stage1 {
        in_stage1[j] = true;
    }
    let candidates: Vec<usize> = (0..design.p()).filter(|&j| !in_stage1[j]).collect();
    let scores: Vec<f64> = candidates
        .par_iter()
        .map(|&j| abs_correlation(&design.column_values(j), &resid))
        .collect();
    let mut order: Vec<usize> = (0..candidates.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(a.cmp(&b)));
    order.truncate(p2);
    Ok(Stage2 {
        features: order.iter().map(|&k| candidates[k]).collect(),
        scores: order.iter().map(|&k| scores[k]).collect(),
        fallback: fit.fallback(),
    })
}

/// Shared train/test splits, one per tuning replicate.
fn tuning_splits(n: usize, reps: usize, train_fraction: f64, seed: u64) -> Vec<(Vec<usize>, Vec<usize>)> {
    let n_train = ((n as f64) * train_fraction).round().clamp(1.0, (n - 1) as f64) as usize;
    (0..reps)
        .map(|r| {
            let mut rng = stream_rng(replicate_seed(seed, r as u64), 0);
            let mut idx: Vec<usize> = (0..n).collect();
            idx.shuffle(&mut rng);
            let test = idx.split_off(n_train);
            (idx, test)
        })
        .collect()
}

/// Mean held-out `(y − p̂)²` of a logistic fit on `features`, averaged over
/// splits. Also returns how many fits fell back to the ridge fit.
fn mspe(
    design: &Design<f64>,
    labels: &[u8],
    features: &[usize],
    splits: &[(Vec<usize>, Vec<usize>)],
) -> Result<(f64, usize)> {
    let x = design.to_numeric(features);
    let per: Vec<(f64, bool)> = splits
        .par_iter()
        .map(|(train, test)| {
            let y_train: Vec<u8> = train.iter().map(|&i| labels[i]).collect();
            let fit = logistic_irls(&x.select_rows(train), &y_train)?;
            let p_hat = fit.predict_proba(&x.select_rows(test));
            let err = test
                .iter()
                .zip(&p_hat)
                .map(|(&i, &ph)| (f64::from(labels[i]) - ph).powi(2))
                .sum::<f64>()
                / test.len() as f64;
            Ok((err, fit.fallback()))
        })
        .collect::<Result<_>>()?;
    let mean = per.iter().map(|v| v.0).sum::<f64>() / per.len() as f64;
    Ok((mean, per.iter().filter(|v| v.1).count()))
}

/// Runs the two-stage screen and returns `[n / log n]` ranked features.
pub fn iterative_screen(
    design: &Design<f64>,
    y: &ResponseVector<f64>,
    spec: &PipelineSpec,
) -> Result<IterativeScreen> {
    let n = design.n();
    spec.validate(n, design.p())?;
    let labels = y.labels()?;
    let total = p1_upper(n);
    let marginal = screen(spec.screener, design, y, &ScreenerConfig::default())?;
    let splits = tuning_splits(n, spec.tuning_reps, spec.train_fraction, spec.seed);
    let lo = spec.p1_min;
    let hi = spec.p1_max.unwrap_or(total);

    let evaluate = |p1: usize| -> Result<(f64, usize)> {
        let stage1 = marginal.top(p1);
        let s2 = stage2(design, &labels, stage1, total - p1)?;
        let mut combined = stage1.to_vec();
        combined.extend(&s2.features);
        let (err, fb) = mspe(design, &labels, &combined, &splits)?;
        Ok((err, fb + usize::from(s2.fallback)))
    };
    let run = |cands: Vec<usize>| -> Result<Vec<(usize, f64, usize)>> {
        cands
            .into_par_iter()
            .map(|p1| evaluate(p1).map(|(e, fb)| (p1, e, fb)))
            .collect()
    };

    let mut evaluated = match spec.search {
        P1Search::Exhaustive => run((lo..=hi).collect())?,
        P1Search::CoarseToFine { stride } => {
            let mut coarse: Vec<usize> = (lo..=hi).step_by(stride).collect();
            if coarse.last() != Some(&hi) {
                coarse.push(hi);
            }
            let mut done = run(coarse)?;
            let best = argmin(&done);
            let fine: Vec<usize> = (best.saturating_sub(stride - 1).max(lo)
                ..=(best + stride - 1).min(hi))
                .filter(|p| !done.iter().any(|d| d.0 == *p))
                .collect();
            done.extend(run(fine)?);
            done
        }
    };
    evaluated.sort_by_key(|e| e.0);
    let p1 = argmin(&evaluated);
    let fallback_fits = evaluated.iter().map(|e| e.2).sum();

    let stage1 = marginal.top(p1).to_vec();
    let s2 = stage2(design, &labels, &stage1, total - p1)?;
    let mut pairs: Vec<(usize, f64)> = stage1
        .iter()
        .map(|&j| (j, marginal.scores[j]))
        .chain(s2.features.iter().copied().zip(s2.scores.iter().copied()))
        .collect();
    pairs.sort_by(|a, b| b.1.total_cmp(&a.1));
    Ok(IterativeScreen {
        ranking: pairs.iter().map(|v| v.0).collect(),
        scores: pairs.iter().map(|v| v.1).collect(),
        p2: s2.features.len(),
        stage2: s2.features,
        stage1,
        p1,
        mspe_curve: evaluated.iter().map(|e| (e.0, e.1)).collect(),
        fallback_fits,
    })
}

/// Candidate with the smallest error; ties go to the smaller `p₁`.
fn argmin(evaluated: &[(usize, f64, usize)]) -> usize {
    evaluated
        .iter()
        .min_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)))
        .map_or(0, |e| e.0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PostFit {
    pub method: PostMethod,
    pub fit: PenalizedFit,
    /// Original indices of the features with nonzero coefficients.
    pub selected: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineReport {
    pub spec: PipelineSpec,
    pub n: usize,
    pub p: usize,
    pub p1_upper: usize,
    pub final_d: usize,
    pub screen: IterativeScreen,
    /// Features handed to post-screening, original indices.
    pub selected: Vec<usize>,
    pub fits: Vec<PostFit>,
}

impl PipelineReport {
    pub fn fit(&self, method: PostMethod) -> Option<&PostFit> {
        self.fits.iter().find(|f| f.method == method)
    }

    /// Markdown table with one row per post-screening method.
    pub fn summary_table(&self) -> String {
        let mut out = String::new();
        out.push_str(
            "| Post Screening Method | Model size | McFadden's pseudo-R² | AIC | Misclass. rate |\n",
        );
        out.push_str("|---|---|---|---|---|\n");
        for f in &self.fits {
            let label = match f.method {
                PostMethod::Enet => format!("Elastic Net (α = {:.2})", f.fit.chosen_alpha),
                m => m.label().to_string(),
            };
            let m = &f.fit.metrics;
            let _ = writeln!(
                out,
                "| {label} | {} | {:.4} | {:.2} | {:.2}% |",
                m.model_size,
                m.pseudo_r2,
                m.aic,
                100.0 * m.misclassification
            );
        }
        out
    }
}

/// Iterative screen, truncation to `final_d`, and each post-screening fit.
pub fn run_pipeline(
    design: &Design<f64>,
    y: &ResponseVector<f64>,
    spec: &PipelineSpec,
) -> Result<PipelineReport> {
    let n = design.n();
    let screened = iterative_screen(design, y, spec).map_err(|e| e.in_stage("iterative screening"))?;
    let d = spec.final_d.unwrap_or_else(|| final_d(n));
    let selected: Vec<usize> = screened
        .ranking
        .iter()
        .zip(&screened.scores)
        .filter(|(_, &s)| !spec.positive_only || s > 0.0)
        .map(|(&j, _)| j)
        .take(d)
        .collect();
    if selected.is_empty() {
        return Err(Error::NoSelectableFeatures.in_stage("truncation"));
    }
    let x = design.to_numeric(&selected);
    let labels = y.labels()?;
    let opts = CvOptions::default()
        .with_folds(spec.cv_folds)
        .with_seed(spec.seed);
    let fits = spec
        .post_methods
        .iter()
        .map(|&method| {
            let fit = match method {
                PostMethod::Lasso => cv_select(&x, &labels, &PenaltySpec::lasso(), &opts),
                PostMethod::Adaptive => adaptive_lasso(&x, &labels, &opts),
                PostMethod::Enet => elastic_net_grid(&x, &labels, &spec.alpha_grid, &opts),
            }
            .map_err(|e| e.in_stage(method.label()))?;
            let chosen = fit.active_set().iter().map(|&k| selected[k]).collect();
            Ok(PostFit {
                method,
                fit,
                selected: chosen,
            })
        })
        .collect::<Result<_>>()?;
    Ok(PipelineReport {
        spec: spec.clone(),
        n,
        p: design.p(),
        p1_upper: p1_upper(n),
        final_d: d,
        screen: screened,
        selected,
        fits,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simgen::{generate, SimulationSpec};

    #[test]
    fn size_formulas() {
        assert_eq!(p1_upper(4099), 493);
        assert_eq!(final_d(4099), 117);
        assert_eq!(final_d(200), 16);
    }

    #[test]
    fn splits_partition_rows() {
        let s = tuning_splits(40, 3, 0.75, 9);
        for (train, test) in &s {
            assert_eq!(train.len(), 30);
            let mut all: Vec<usize> = train.iter().chain(test).copied().collect();
            all.sort_unstable();
            assert_eq!(all, (0..40).collect::<Vec<_>>());
        }
        assert_eq!(s, tuning_splits(40, 3, 0.75, 9));
    }

    #[test]
    fn stage_sets_are_disjoint_and_sum_to_total() {
        let data = generate::<f64>(&SimulationSpec::defaults(1).with_size(120, 150).with_seed(2))
            .unwrap();
        let spec = PipelineSpec {
            tuning_reps: 3,
            post_methods: vec![PostMethod::Lasso],
            ..PipelineSpec::default()
        };
        let r = iterative_screen(&data.design, &data.response, &spec).unwrap();
        assert_eq!(r.p1 + r.p2, p1_upper(120));
        let mut all: Vec<usize> = r.stage1.iter().chain(&r.stage2).copied().collect();
        all.sort_unstable();
        all.dedup();
        assert_eq!(all.len(), p1_upper(120));
        assert_eq!(r.ranking.len(), all.len());
    }

    #[test]
    fn p_smaller_than_total_is_rejected() {
        assert!(PipelineSpec::default().validate(4099, 400).is_err());
        assert!(PipelineSpec::default().validate(4099, 500).is_ok());
    }
}
