//! Marginal screening statistics.
//!
//! Each screener maps `(design, response)` to a [`ScreenResult`]. Features are
//! scored independently and in parallel; the merged result does not depend on
//! the number of worker threads.

mod catsis;
mod dcsis;
mod hlw;
mod mmle;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use catsis::{cat_sis, numerator_cellform, numerator_observation_form};
pub use dcsis::{dc_sis, distance_correlation_sq};
pub use hlw::hlw_sis;
pub use mmle::{marginal_logistic, mmle, MarginalFit};

use crate::data::{Design, Method, ResponseVector, ScreenResult};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// What a screener does with a feature whose spread is zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum ZeroVariancePolicy {
    /// Score the feature 0 and mark it degenerate.
    #[default]
    ScoreZero,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScreenerConfig {
    pub mmle_max_iter: usize,
    pub mmle_tol: f64,
    pub mmle_coef_cap: f64,
    pub zero_variance_policy: ZeroVariancePolicy,
}

impl Default for ScreenerConfig {
    fn default() -> Self {
        Self {
            mmle_max_iter: 25,
            mmle_tol: 1e-8,
            mmle_coef_cap: 10.0,
            zero_variance_policy: ZeroVariancePolicy::ScoreZero,
        }
    }
}

impl ScreenerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.mmle_max_iter == 0 {
            return Err(Error::Config("mmle_max_iter must be at least 1".into()));
        }
        if !(self.mmle_tol > 0.0) || !(self.mmle_coef_cap > 0.0) {
            return Err(Error::Config(
                "mmle_tol and mmle_coef_cap must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// Runs the requested screener.
pub fn screen<T: Scalar>(
    method: Method,
    design: &Design<T>,
    y: &ResponseVector<T>,
    cfg: &ScreenerConfig,
) -> Result<ScreenResult<T>> {
    match method {
        Method::CatSis => cat_sis(design, y),
        Method::HlwSis => hlw_sis(design, y),
        Method::DcSis => dc_sis(design, y),
        Method::Mmle => mmle(design, y, cfg),
    }
}

/// Per-feature outcome before ranking.
#[derive(Debug, Clone, Copy)]
pub(crate) struct FeatureScore<T> {
    pub score: T,
    pub degenerate: bool,
    pub flagged: bool,
}

impl<T: Scalar> FeatureScore<T> {
    pub fn ok(score: T) -> Self {
        Self {
            score,
            degenerate: false,
            flagged: false,
        }
    }

    pub fn degenerate() -> Self {
        Self {
            score: T::zero(),
            degenerate: true,
            flagged: false,
        }
    }
}

pub(crate) fn score_features<T, F>(method: Method, p: usize, f: F) -> ScreenResult<T>
where
    T: Scalar,
    F: Fn(usize) -> FeatureScore<T> + Sync + Send,
{
    let per: Vec<FeatureScore<T>> = (0..p).into_par_iter().map(f).collect();
    let scores = per.iter().map(|s| s.score).collect();
    let degenerate = per.iter().map(|s| s.degenerate).collect();
    let flagged = per.iter().map(|s| s.flagged).collect();
    ScreenResult::new(method, scores, degenerate, flagged)
}

/// Shared preconditions: matching lengths, at least one row, non-constant response.
pub(crate) fn check_inputs<T: Scalar>(design: &Design<T>, y: &ResponseVector<T>) -> Result<()> {
    if design.n() == 0 {
        return Err(Error::NoObservations);
    }
    if y.len() != design.n() {
        return Err(Error::Dimension {
            what: "response length",
            expected: design.n(),
            found: y.len(),
        });
    }
    if is_constant(y.values()) {
        return Err(Error::ConstantResponse);
    }
    Ok(())
}

pub(crate) fn is_constant<T: PartialEq + Copy>(values: &[T]) -> bool {
    values.split_first().is_none_or(|(first, rest)| rest.iter().all(|v| v == first))
}
