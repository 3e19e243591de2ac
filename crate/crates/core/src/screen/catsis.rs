//! CAT-SIS: absolute plug-in correlation between a scored categorical feature
//! and the response, computed from the cell proportions of the contingency
//! table (a Cochran-Armitage-type trend statistic).

use super::{check_inputs, is_constant, score_features, FeatureScore};
use crate::data::{CellTable, Design, Method, ResponseVector, ScreenResult};
use crate::error::Result;
use crate::scalar::Scalar;

/// Trend numerator `τ̂ = Σ_k Σ_m (v_k − v̄)(m − Ȳ) p̂_km`.
pub fn numerator_cellform<T: Scalar>(cells: &CellTable<T>) -> T {
    let mean_x = cells.mean_x();
    let mean_y = cells.mean_y();
    let mut tau = T::zero();
    for k in 0..cells.levels() {
        let dx = cells.scores()[k] - mean_x;
        for m in 0..2 {
            let dy = T::from_usize_lossy(m) - mean_y;
            tau += dx * dy * cells.p_km(k, m);
        }
    }
    tau
}

/// Plug-in covariance `(1/n) Σ_i (x_i − x̄)(y_i − ȳ)`.
pub fn numerator_observation_form<T: Scalar>(x: &[T], y: &[T]) -> T {
    let n = T::from_usize_lossy(x.len());
    let mx = x.iter().copied().sum::<T>() / n;
    let my = y.iter().copied().sum::<T>() / n;
    x.iter()
        .zip(y)
        .map(|(&a, &b)| (a - mx) * (b - my))
        .sum::<T>()
        / n
}

fn abs_correlation<T: Scalar>(x: &[T], y: &[T], sd_y: T) -> FeatureScore<T> {
    if is_constant(x) {
        return FeatureScore::degenerate();
    }
    let n = T::from_usize_lossy(x.len());
    let mx = x.iter().copied().sum::<T>() / n;
    let var_x = x.iter().map(|&a| (a - mx) * (a - mx)).sum::<T>() / n;
    let tau = numerator_observation_form(x, y);
    FeatureScore::ok((tau.abs() / (var_x.sqrt() * sd_y)).min(T::one()))
}

/// Scores every feature by `|τ̂_j| / (σ̂_j σ̂_Y)` with `1/n` moments.
///
/// A binary response on a categorical design uses the cell-proportion form;
/// a continuous response or numeric design uses the equivalent
/// observation-sum form.
pub fn cat_sis<T: Scalar>(design: &Design<T>, y: &ResponseVector<T>) -> Result<ScreenResult<T>> {
    check_inputs(design, y)?;
    let p = design.p();
    match design {
        Design::Categorical(d) if y.is_binary() => {
            let labels = y.labels()?;
            Ok(score_features(Method::CatSis, p, |j| {
                let cells = CellTable::tabulate(d.column(j), &labels, d.level_scores(j));
                if cells.occupied_levels() < 2 {
                    return FeatureScore::degenerate();
                }
                let tau = numerator_cellform(&cells);
                let denom = cells.sd_x() * cells.sd_y();
                FeatureScore::ok((tau.abs() / denom).min(T::one()))
            }))
        }
        _ => {
            let yv = y.values();
            let n = T::from_usize_lossy(yv.len());
            let my = yv.iter().copied().sum::<T>() / n;
            let sd_y = (yv.iter().map(|&v| (v - my) * (v - my)).sum::<T>() / n).sqrt();
            Ok(score_features(Method::CatSis, p, |j| match design {
                Design::Numeric(m) => abs_correlation(m.column(j), yv, sd_y),
                Design::Categorical(d) => abs_correlation(&d.scored_column(j), yv, sd_y),
            }))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::CategoricalDesign;
    use crate::error::Error;
    use approx::assert_abs_diff_eq;

    fn single(col: Vec<u16>, k: usize, y: &[u8]) -> (Design<f64>, ResponseVector<f64>) {
        let n = col.len();
        let d = CategoricalDesign::with_default_scores(n, vec![col], &[k]).unwrap();
        (Design::Categorical(d), ResponseVector::binary(y).unwrap())
    }

    #[test]
    fn perfect_agreement_scores_one() {
        let (d, y) = single(vec![0, 1, 0, 1], 2, &[0, 1, 0, 1]);
        assert_abs_diff_eq!(cat_sis(&d, &y).unwrap().scores[0], 1.0, epsilon = 1e-15);
    }

    #[test]
    fn symmetric_table_scores_zero() {
        let (d, y) = single(vec![0, 0, 1, 1], 2, &[0, 1, 0, 1]);
        assert_eq!(cat_sis(&d, &y).unwrap().scores[0], 0.0);
    }

    #[test]
    fn three_level_example() {
        // τ̂ = 0.375, σ̂_X = √0.6875, σ̂_Y = 0.5
        let (d, y) = single(vec![0, 1, 2, 2], 3, &[0, 0, 1, 1]);
        let expected = 0.375 / (0.6875_f64.sqrt() * 0.5);
        let got = cat_sis(&d, &y).unwrap().scores[0];
        assert_abs_diff_eq!(got, expected, epsilon = 1e-12);
        assert_abs_diff_eq!(got, 0.9045, epsilon = 1e-4);
    }

    #[test]
    fn numerator_forms_on_hand_example() {
        let (d, y) = single(vec![0, 1, 2, 2], 3, &[0, 0, 1, 1]);
        let cells = crate::data::empirical_cells(d.as_categorical().unwrap(), &y, 0).unwrap();
        assert_abs_diff_eq!(numerator_cellform(&cells), 0.375, epsilon = 1e-15);
        let x = d.column_values(0);
        assert_abs_diff_eq!(
            numerator_observation_form(&x, y.values()),
            0.375,
            epsilon = 1e-15
        );
        let uniform = CellTable::from_counts(vec![0.0, 1.0], vec![[1, 1], [1, 1]]).unwrap();
        assert_eq!(numerator_cellform(&uniform), 0.0);
    }

    #[test]
    fn constant_feature_is_degenerate_and_constant_response_errors() {
        let (d, y) = single(vec![1, 1, 1, 1], 2, &[0, 1, 0, 1]);
        let r = cat_sis(&d, &y).unwrap();
        assert_eq!(r.scores[0], 0.0);
        assert!(r.degenerate[0]);

        let (d, y) = single(vec![0, 1, 0, 1], 2, &[1, 1, 1, 1]);
        assert!(matches!(cat_sis(&d, &y), Err(Error::ConstantResponse)));
    }

    #[test]
    fn continuous_response_uses_plain_correlation() {
        let m = crate::data::NumericMatrix::from_columns(vec![
            vec![1.0, 2.0, 3.0, 4.0],
            vec![4.0, 3.0, 2.0, 1.0],
            vec![1.0, -1.0, -1.0, 1.0],
        ])
        .unwrap();
        let y = ResponseVector::continuous(vec![2.0, 4.0, 6.0, 8.0]).unwrap();
        let r = cat_sis(&Design::Numeric(m), &y).unwrap();
        assert_abs_diff_eq!(r.scores[0], 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(r.scores[1], 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(r.scores[2], 0.0, epsilon = 1e-12);
    }
}
