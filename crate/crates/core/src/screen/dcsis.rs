//! DC-SIS: squared empirical distance correlation between each scored feature
//! and the response.
//!
//! The V-statistic `V²(x, y) = (1/n²) Σ_ij A_ij B_ij` of double-centered
//! distance matrices expands to pair sums
//! `S1 + S2 − 2·S3` with `S1 = (1/n²) Σ a_ij b_ij`,
//! `S2 = (1/n²) Σ a_ij · (1/n²) Σ b_ij` and `S3 = (1/n³) Σ_i a_i· b_i·`,
//! so no `n × n` matrix is materialized. For a categorical feature against a
//! binary response all three sums depend only on the cell counts.

use super::{check_inputs, is_constant, score_features, FeatureScore};
use crate::data::{CellTable, Design, Method, ResponseVector, ScreenResult};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Pairwise-distance summary of one variable, reused across features.
struct DistanceProfile<T> {
    /// Upper-triangle distances `|y_i − y_j|`, `i < j`, row by row.
    upper: Vec<T>,
    row_sums: Vec<T>,
    total: T,
    /// `V²(y, y)`.
    v2: T,
}

impl<T: Scalar> DistanceProfile<T> {
    fn new(y: &[T]) -> Self {
        let n = y.len();
        let mut upper = Vec::with_capacity(n * (n - 1) / 2);
        let mut row_sums = vec![T::zero(); n];
        let mut sq = T::zero();
        for i in 0..n {
            for j in i + 1..n {
                let b = (y[i] - y[j]).abs();
                upper.push(b);
                row_sums[i] += b;
                row_sums[j] += b;
                sq += b * b;
            }
        }
        let total: T = row_sums.iter().copied().sum();
        let nf = T::from_usize_lossy(n);
        let n2 = nf * nf;
        let rs: T = row_sums.iter().map(|&r| r * r).sum();
        let mean = total / n2;
        let v2 = (sq + sq) / n2 + mean * mean - (rs + rs) / (n2 * nf);
        Self {
            upper,
            row_sums,
            total,
            v2,
        }
    }

    /// Returns `(V²(x, y), V²(x, x))`.
    fn against(&self, x: &[T]) -> (T, T) {
        let n = x.len();
        let mut row_a = vec![T::zero(); n];
        let mut s_ab = T::zero();
        let mut s_aa = T::zero();
        let mut idx = 0;
        for i in 0..n {
            let xi = x[i];
            let mut acc_row = T::zero();
            for j in i + 1..n {
                let a = (xi - x[j]).abs();
                s_ab += a * self.upper[idx];
                s_aa += a * a;
                acc_row += a;
                row_a[j] += a;
                idx += 1;
            }
            row_a[i] += acc_row;
        }
        let nf = T::from_usize_lossy(n);
        let n2 = nf * nf;
        let n3 = n2 * nf;
        let sum_a: T = row_a.iter().copied().sum();
        let cross: T = row_a.iter().zip(&self.row_sums).map(|(&a, &b)| a * b).sum();
        let own: T = row_a.iter().map(|&a| a * a).sum();
        let v2xy = (s_ab + s_ab) / n2 + (sum_a / n2) * (self.total / n2) - (cross + cross) / n3;
        let v2x = (s_aa + s_aa) / n2 + (sum_a / n2) * (sum_a / n2) - (own + own) / n3;
        (v2xy, v2x)
    }
}

fn ratio<T: Scalar>(v2xy: T, v2x: T, v2y: T) -> T {
    let denom = (v2x * v2y).sqrt();
    if !(denom > T::zero()) {
        return T::zero();
    }
    (v2xy / denom).max(T::zero()).min(T::one())
}

/// Squared distance correlation of two samples, `V²(x,y) / √(V²(x) V²(y))`.
///
/// Returns 0 when either marginal distance variance vanishes.
pub fn distance_correlation_sq<T: Scalar>(x: &[T], y: &[T]) -> T {
    let profile = DistanceProfile::new(y);
    let (v2xy, v2x) = profile.against(x);
    ratio(v2xy, v2x, profile.v2)
}

/// Cell-count form for a scored categorical feature against a 0/1 response.
fn cell_dcor_sq<T: Scalar>(cells: &CellTable<T>) -> T {
    let k_count = cells.levels();
    let v = cells.scores();
    let nf = T::from_usize_lossy(cells.n());
    let n2 = nf * nf;
    let n3 = n2 * nf;
    let nk: Vec<T> = (0..k_count)
        .map(|k| T::from_usize_lossy(cells.level_total(k)))
        .collect();
    let c = |k: usize, m: usize| T::from_usize_lossy(cells.count(k, m));
    let n0 = T::from_usize_lossy(cells.response_total(0));
    let n1 = T::from_usize_lossy(cells.response_total(1));

    // Row sum of |x_i − x_j| for an observation at level k.
    let row_a: Vec<T> = (0..k_count)
        .map(|k| (0..k_count).map(|l| nk[l] * (v[k] - v[l]).abs()).sum())
        .collect();

    let mut s_ab = T::zero();
    let mut s_aa = T::zero();
    for k in 0..k_count {
        for l in 0..k_count {
            let a = (v[k] - v[l]).abs();
            s_ab += c(k, 0) * c(l, 1) * a;
            s_aa += nk[k] * nk[l] * a * a;
        }
    }
    let sum_a: T = (0..k_count).map(|k| nk[k] * row_a[k]).sum();
    // Row sum of |y_i − y_j| is n1 for y_i = 0 and n0 for y_i = 1.
    let cross: T = (0..k_count)
        .map(|k| row_a[k] * (c(k, 0) * n1 + c(k, 1) * n0))
        .sum();
    let own: T = (0..k_count).map(|k| nk[k] * row_a[k] * row_a[k]).sum();
    let b_mean = (n0 * n1 + n0 * n1) / n2;

    let v2xy = (s_ab + s_ab) / n2 + (sum_a / n2) * b_mean - (cross + cross) / n3;
    let v2x = s_aa / n2 + (sum_a / n2) * (sum_a / n2) - (own + own) / n3;
    let v2y = b_mean + b_mean * b_mean - (n0 * n1 * (n0 + n1) + n0 * n1 * (n0 + n1)) / n3;
    ratio(v2xy, v2x, v2y)
}

/// Scores each feature by its squared distance correlation with the response.
pub fn dc_sis<T: Scalar>(design: &Design<T>, y: &ResponseVector<T>) -> Result<ScreenResult<T>> {
    check_inputs(design, y)?;
    let n = design.n();
    if n < 4 {
        return Err(Error::TooFewObservations { need: 4, got: n });
    }
    let p = design.p();
    match design {
        Design::Categorical(d) if y.is_binary() => {
            let labels = y.labels()?;
            Ok(score_features(Method::DcSis, p, |j| {
                let cells = CellTable::tabulate(d.column(j), &labels, d.level_scores(j));
                if cells.occupied_levels() < 2 {
                    return FeatureScore::degenerate();
                }
                FeatureScore::ok(cell_dcor_sq(&cells))
            }))
        }
        _ => {
            let profile = DistanceProfile::new(y.values());
            let score = |x: &[T]| {
                if is_constant(x) {
                    return FeatureScore::degenerate();
                }
                let (v2xy, v2x) = profile.against(x);
                FeatureScore::ok(ratio(v2xy, v2x, profile.v2))
            };
            Ok(score_features(Method::DcSis, p, |j| match design {
                Design::Numeric(m) => score(m.column(j)),
                Design::Categorical(d) => score(&d.scored_column(j)),
            }))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{CategoricalDesign, NumericMatrix};
    use approx::assert_abs_diff_eq;

    /// Brute-force double-centering of full `n × n` distance matrices.
    fn brute_dcor_sq(x: &[f64], y: &[f64]) -> f64 {
        let n = x.len();
        let centered = |v: &[f64]| {
            let d: Vec<Vec<f64>> = (0..n)
                .map(|i| (0..n).map(|j| (v[i] - v[j]).abs()).collect())
                .collect();
            let row: Vec<f64> = d.iter().map(|r| r.iter().sum::<f64>() / n as f64).collect();
            let grand = row.iter().sum::<f64>() / n as f64;
            (0..n)
                .map(|i| (0..n).map(|j| d[i][j] - row[i] - row[j] + grand).collect())
                .collect::<Vec<Vec<f64>>>()
        };
        let a = centered(x);
        let b = centered(y);
        let v = |p: &Vec<Vec<f64>>, q: &Vec<Vec<f64>>| {
            let mut s = 0.0;
            for i in 0..n {
                for j in 0..n {
                    s += p[i][j] * q[i][j];
                }
            }
            s / (n * n) as f64
        };
        v(&a, &b) / (v(&a, &a) * v(&b, &b)).sqrt()
    }

    #[test]
    fn identical_samples_have_unit_correlation() {
        let x = [0.3, 1.7, -2.0, 4.1, 0.0];
        assert_abs_diff_eq!(distance_correlation_sq(&x, &x), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn four_point_example_matches_brute_force() {
        let x = [0.0, 1.0, 2.0, 3.0];
        let y = [0.0, 0.0, 1.0, 1.0];
        let oracle = brute_dcor_sq(&x, &y);
        assert_abs_diff_eq!(distance_correlation_sq(&x, &y), oracle, epsilon = 1e-12);

        let d = CategoricalDesign::<f64>::with_default_scores(4, vec![vec![0, 1, 2, 3]], &[4]).unwrap();
        let yv = ResponseVector::binary(&[0, 0, 1, 1]).unwrap();
        let r = dc_sis(&Design::Categorical(d), &yv).unwrap();
        assert_abs_diff_eq!(r.scores[0], oracle, epsilon = 1e-12);
    }

    #[test]
    fn cell_form_matches_brute_force_with_uneven_scores() {
        let col: Vec<u16> = vec![0, 2, 1, 1, 2, 0, 2, 2, 1, 0, 1, 2];
        let labels = [0u8, 1, 0, 1, 1, 0, 1, 0, 0, 0, 1, 1];
        let scores = vec![-1.0, 0.25, 3.0];
        let d = CategoricalDesign::new(12, vec![col.clone()], vec![scores.clone()], vec![true])
            .unwrap();
        let y = ResponseVector::binary(&labels).unwrap();
        let got = dc_sis(&Design::Categorical(d), &y).unwrap().scores[0];
        let x: Vec<f64> = col.iter().map(|&l| scores[l as usize]).collect();
        let yf: Vec<f64> = labels.iter().map(|&v| v as f64).collect();
        assert_abs_diff_eq!(got, brute_dcor_sq(&x, &yf), epsilon = 1e-12);
    }

    #[test]
    fn constant_feature_is_degenerate() {
        let m = NumericMatrix::from_columns(vec![vec![2.0; 5], vec![1.0, 2.0, 3.0, 4.0, 5.0]])
            .unwrap();
        let y = ResponseVector::continuous(vec![1.0, 2.0, 3.0, 4.0, 5.0]).unwrap();
        let r = dc_sis(&Design::Numeric(m), &y).unwrap();
        assert_eq!(r.scores[0], 0.0);
        assert!(r.degenerate[0]);
        assert_abs_diff_eq!(r.scores[1], 1.0, epsilon = 1e-12);
    }

    #[test]
    fn fewer_than_four_observations_is_an_error() {
        let m = NumericMatrix::from_columns(vec![vec![1.0, 2.0, 3.0]]).unwrap();
        let y = ResponseVector::continuous(vec![1.0, 0.0, 3.0]).unwrap();
        assert!(matches!(
            dc_sis(&Design::Numeric(m), &y),
            Err(Error::TooFewObservations { need: 4, got: 3 })
        ));
    }
}
