//! Turning a screening ranking into a selected model.

use serde::{Deserialize, Serialize};

use crate::data::{ScreenResult, TrueModel};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub const DEFAULT_RATIO_FLOOR: f64 = 1e-5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum SelectionRule {
    /// The `d` highest-ranked features.
    TopD(usize),
    /// Every feature whose score is strictly above `c`.
    Cutoff(f64),
    /// Prefix of size `argmax_j ρ̂_(j)/ρ̂_(j+1)`, computed after discarding
    /// statistics below `floor`.
    RatioArgmax { floor: f64 },
}

impl SelectionRule {
    pub fn ratio_default() -> Self {
        SelectionRule::RatioArgmax {
            floor: DEFAULT_RATIO_FLOOR,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            SelectionRule::TopD(0) => Err(Error::Config("TopD needs d >= 1".into())),
            SelectionRule::Cutoff(c) if !(c > 0.0) => {
                Err(Error::Config("cutoff must be positive".into()))
            }
            SelectionRule::RatioArgmax { floor } if !(floor >= 0.0) => {
                Err(Error::Config("ratio floor must be non-negative".into()))
            }
            _ => Ok(()),
        }
    }
}

/// Adjacent-ratio model-size estimate `d̂` over the sorted scores.
///
/// Scores below `floor` are dropped before forming ratios; ratios with a zero
/// denominator are skipped, and ties go to the smallest `j`. With a single
/// surviving score the estimate is 1.
pub fn ratio_model_size<T: Scalar>(sorted_desc: &[T], floor: T) -> Result<usize> {
    let kept = sorted_desc.iter().take_while(|&&s| s >= floor).count();
    if kept == 0 {
        return Err(Error::NoSelectableFeatures);
    }
    let mut best: Option<(usize, T)> = None;
    for j in 0..kept.saturating_sub(1) {
        let denom = sorted_desc[j + 1];
        if denom <= T::zero() {
            continue;
        }
        let r = sorted_desc[j] / denom;
        if best.is_none_or(|(_, b)| r > b) {
            best = Some((j + 1, r));
        }
    }
    Ok(best.map_or(1, |(d, _)| d))
}

/// Applies `rule` and returns the selected feature set.
pub fn select<T: Scalar>(result: &ScreenResult<T>, rule: SelectionRule) -> Result<TrueModel> {
    rule.validate()?;
    let p = result.p();
    let chosen: Vec<usize> = match rule {
        SelectionRule::TopD(d) => result.top(d).to_vec(),
        SelectionRule::Cutoff(c) => {
            let c = T::lit(c);
            (0..p).filter(|&j| result.scores[j] > c).collect()
        }
        SelectionRule::RatioArgmax { floor } => {
            let sorted: Vec<T> = result.ranking.iter().map(|&j| result.scores[j]).collect();
            let d = ratio_model_size(&sorted, T::lit(floor))?;
            result.top(d).to_vec()
        }
    };
    if chosen.is_empty() {
        return Err(Error::NoSelectableFeatures);
    }
    TrueModel::new(chosen, p)
}

/// Smallest ranking prefix that contains every feature of `truth`.
pub fn minimum_model_size<T: Scalar>(result: &ScreenResult<T>, truth: &TrueModel) -> usize {
    let pos = result.positions();
    truth.indices().iter().map(|&j| pos[j]).max().unwrap_or(0)
}
