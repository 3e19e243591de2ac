//! HLW-SIS: Pearson chi-square association between a categorical feature and
//! the binary response, normalized by `n` (mean-squared contingency).

use super::{check_inputs, score_features, FeatureScore};
use crate::data::{CellTable, Design, Method, ResponseVector, ScreenResult};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

fn mean_square_contingency<T: Scalar>(cells: &CellTable<T>) -> T {
    let mut total = T::zero();
    for k in 0..cells.levels() {
        let pk = cells.p_k(k);
        for m in 0..2 {
            let expected = pk * cells.p_m(m);
            if expected > T::zero() {
                let diff = cells.p_km(k, m) - expected;
                total += diff * diff / expected;
            }
        }
    }
    total
}

/// Scores each feature by `Σ_k Σ_m (p̂_km − p̂_k p̂_m)² / (p̂_k p̂_m)`.
///
/// Level scores are ignored; empty cells contribute nothing.
pub fn hlw_sis<T: Scalar>(design: &Design<T>, y: &ResponseVector<T>) -> Result<ScreenResult<T>> {
    check_inputs(design, y)?;
    let d = design
        .as_categorical()
        .ok_or(Error::NeedsCategorical("HLW-SIS"))?;
    let labels = y.labels()?;
    Ok(score_features(Method::HlwSis, d.p(), |j| {
        let cells = CellTable::tabulate(d.column(j), &labels, d.level_scores(j));
        if cells.occupied_levels() < 2 {
            return FeatureScore::degenerate();
        }
        FeatureScore::ok(mean_square_contingency(&cells))
    }))
}
