//! Immutable data types shared by the screeners, generators and model fits.
//!
//! Categorical features are stored as dense 0-based level indices with a
//! per-feature score lookup, so score-free statistics (HLW-SIS) and
//! score-based ones (CAT-SIS, DC-SIS, MMLE) share one representation.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Level index type. Genotype data uses 0/1/2; CSV input may carry more levels.
pub type Level = u16;

/// `n × p` matrix of level indices plus per-feature numeric level scores.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CategoricalDesign<T> {
    n: usize,
    p: usize,
    /// Column-major level indices, `levels[j * n + i]`.
    levels: Vec<Level>,
    level_scores: Vec<Vec<T>>,
    ordinal: Vec<bool>,
}

impl<T: Scalar> CategoricalDesign<T> {
    /// Builds a design from feature columns and explicit level scores.
    ///
    /// Features flagged `ordinal` must have strictly increasing scores.
    pub fn new(
        n: usize,
        columns: Vec<Vec<Level>>,
        level_scores: Vec<Vec<T>>,
        ordinal: Vec<bool>,
    ) -> Result<Self> {
        let p = columns.len();
        if level_scores.len() != p {
            return Err(Error::Dimension {
                what: "level score lists",
                expected: p,
                found: level_scores.len(),
            });
        }
        if ordinal.len() != p {
            return Err(Error::Dimension {
                what: "ordinal flags",
                expected: p,
                found: ordinal.len(),
            });
        }
        let mut levels = Vec::with_capacity(n * p);
        for (j, col) in columns.into_iter().enumerate() {
            if col.len() != n {
                return Err(Error::Dimension {
                    what: "feature column length",
                    expected: n,
                    found: col.len(),
                });
            }
            let count = level_scores[j].len();
            if let Some(&bad) = col.iter().find(|&&l| l as usize >= count) {
                return Err(Error::LevelOutOfRange {
                    feature: j,
                    level: bad as usize,
                    count,
                });
            }
            if level_scores[j].iter().any(|s| !s.is_finite()) {
                return Err(Error::NonFinite("level scores"));
            }
            if ordinal[j] && level_scores[j].windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::ScoresNotIncreasing { feature: j });
            }
            levels.extend(col);
        }
        Ok(Self {
            n,
            p,
            levels,
            level_scores,
            ordinal,
        })
    }

    /// Builds a design with the default scores `v_k = k` and every feature ordinal.
    pub fn with_default_scores(
        n: usize,
        columns: Vec<Vec<Level>>,
        level_counts: &[usize],
    ) -> Result<Self> {
        let scores = level_counts
            .iter()
            .map(|&k| (0..k).map(T::from_usize_lossy).collect())
            .collect();
        let p = columns.len();
        Self::new(n, columns, scores, vec![true; p])
    }

    /// Builds a design from feature columns, inferring `K_j = max level + 1`.
    pub fn from_columns(columns: Vec<Vec<Level>>) -> Result<Self> {
        let n = columns.first().map_or(0, Vec::len);
        let counts: Vec<usize> = columns
            .iter()
            .map(|c| c.iter().copied().max().map_or(1, |m| m as usize + 1))
            .collect();
        Self::with_default_scores(n, columns, &counts)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> usize {
        self.p
    }

    #[inline]
    pub fn column(&self, j: usize) -> &[Level] {
        &self.levels[j * self.n..(j + 1) * self.n]
    }

    #[inline]
    pub fn level(&self, i: usize, j: usize) -> Level {
        self.levels[j * self.n + i]
    }

    pub fn level_count(&self, j: usize) -> usize {
        self.level_scores[j].len()
    }

    pub fn level_scores(&self, j: usize) -> &[T] {
        &self.level_scores[j]
    }

    pub fn is_ordinal(&self, j: usize) -> bool {
        self.ordinal[j]
    }

    /// Feature column mapped through its level scores.
    pub fn scored_column(&self, j: usize) -> Vec<T> {
        let scores = &self.level_scores[j];
        self.column(j).iter().map(|&l| scores[l as usize]).collect()
    }

    /// Returns a copy with new level scores for feature `j`.
    pub fn with_scores(&self, j: usize, scores: Vec<T>, ordinal: bool) -> Result<Self> {
        let columns = (0..self.p).map(|c| self.column(c).to_vec()).collect();
        let mut all = self.level_scores.clone();
        let mut ord = self.ordinal.clone();
        all[j] = scores;
        ord[j] = ordinal;
        Self::new(self.n, columns, all, ord)
    }

    /// Scored numeric matrix restricted to the given features, in that order.
    pub fn to_numeric(&self, features: &[usize]) -> NumericMatrix<T> {
        let mut data = Vec::with_capacity(self.n * features.len());
        for &j in features {
            data.extend(self.scored_column(j));
        }
        NumericMatrix {
            n: self.n,
            p: features.len(),
            data,
        }
    }

    /// Design restricted to the given observations.
    pub fn select_rows(&self, rows: &[usize]) -> Self {
        let mut levels = Vec::with_capacity(rows.len() * self.p);
        for j in 0..self.p {
            let col = self.column(j);
            levels.extend(rows.iter().map(|&i| col[i]));
        }
        Self {
            n: rows.len(),
            p: self.p,
            levels,
            level_scores: self.level_scores.clone(),
            ordinal: self.ordinal.clone(),
        }
    }
}

/// Dense column-major real matrix (continuous designs and post-screening fits).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NumericMatrix<T> {
    n: usize,
    p: usize,
    data: Vec<T>,
}

impl<T: Scalar> NumericMatrix<T> {
    pub fn from_columns(columns: Vec<Vec<T>>) -> Result<Self> {
        let n = columns.first().map_or(0, Vec::len);
        let p = columns.len();
        let mut data = Vec::with_capacity(n * p);
        for col in columns {
            if col.len() != n {
                return Err(Error::Dimension {
                    what: "matrix column length",
                    expected: n,
                    found: col.len(),
                });
            }
            data.extend(col);
        }
        Ok(Self { n, p, data })
    }

    /// Builds from row vectors (convenient in tests and small examples).
    pub fn from_rows(rows: &[Vec<T>]) -> Result<Self> {
        let n = rows.len();
        let p = rows.first().map_or(0, Vec::len);
        let mut columns = vec![Vec::with_capacity(n); p];
        for row in rows {
            if row.len() != p {
                return Err(Error::Dimension {
                    what: "matrix row length",
                    expected: p,
                    found: row.len(),
                });
            }
            for (c, &v) in columns.iter_mut().zip(row) {
                c.push(v);
            }
        }
        Self::from_columns(columns)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> usize {
        self.p
    }

    #[inline]
    pub fn column(&self, j: usize) -> &[T] {
        &self.data[j * self.n..(j + 1) * self.n]
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> T {
        self.data[j * self.n + i]
    }

    pub fn select_columns(&self, features: &[usize]) -> Self {
        let mut data = Vec::with_capacity(self.n * features.len());
        for &j in features {
            data.extend_from_slice(self.column(j));
        }
        Self {
            n: self.n,
            p: features.len(),
            data,
        }
    }

    pub fn select_rows(&self, rows: &[usize]) -> Self {
        let mut data = Vec::with_capacity(rows.len() * self.p);
        for j in 0..self.p {
            let col = self.column(j);
            data.extend(rows.iter().map(|&i| col[i]));
        }
        Self {
            n: rows.len(),
            p: self.p,
            data,
        }
    }

    /// Returns a copy with column `j` multiplied by `factor`.
    pub fn scale_column(&self, j: usize, factor: T) -> Self {
        let mut out = self.clone();
        for v in &mut out.data[j * self.n..(j + 1) * self.n] {
            *v *= factor;
        }
        out
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }
}

/// A design is either categorical (levels + scores) or already numeric.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Design<T> {
    Categorical(CategoricalDesign<T>),
    Numeric(NumericMatrix<T>),
}

impl<T: Scalar> Design<T> {
    pub fn n(&self) -> usize {
        match self {
            Design::Categorical(d) => d.n(),
            Design::Numeric(m) => m.n(),
        }
    }

    pub fn p(&self) -> usize {
        match self {
            Design::Categorical(d) => d.p(),
            Design::Numeric(m) => m.p(),
        }
    }

    pub fn as_categorical(&self) -> Option<&CategoricalDesign<T>> {
        match self {
            Design::Categorical(d) => Some(d),
            Design::Numeric(_) => None,
        }
    }

    /// Numeric values of feature `j` (level scores for categorical features).
    pub fn column_values(&self, j: usize) -> Vec<T> {
        match self {
            Design::Categorical(d) => d.scored_column(j),
            Design::Numeric(m) => m.column(j).to_vec(),
        }
    }

    pub fn to_numeric(&self, features: &[usize]) -> NumericMatrix<T> {
        match self {
            Design::Categorical(d) => d.to_numeric(features),
            Design::Numeric(m) => m.select_columns(features),
        }
    }

    pub fn select_rows(&self, rows: &[usize]) -> Self {
        match self {
            Design::Categorical(d) => Design::Categorical(d.select_rows(rows)),
            Design::Numeric(m) => Design::Numeric(m.select_rows(rows)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ResponseKind {
    Binary,
    Continuous,
}

/// Response vector; binary responses are coded 0/1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResponseVector<T> {
    kind: ResponseKind,
    values: Vec<T>,
}

impl<T: Scalar> ResponseVector<T> {
    pub fn binary(labels: &[u8]) -> Result<Self> {
        if labels.iter().any(|&v| v > 1) {
            return Err(Error::NotBinary);
        }
        Ok(Self {
            kind: ResponseKind::Binary,
            values: labels.iter().map(|&v| T::from_u8(v).unwrap()).collect(),
        })
    }

    /// Validates that every value is exactly 0 or 1.
    pub fn binary_from_values(values: Vec<T>) -> Result<Self> {
        if values.iter().any(|&v| v != T::zero() && v != T::one()) {
            return Err(Error::NotBinary);
        }
        Ok(Self {
            kind: ResponseKind::Binary,
            values,
        })
    }

    pub fn continuous(values: Vec<T>) -> Result<Self> {
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("response"));
        }
        Ok(Self {
            kind: ResponseKind::Continuous,
            values,
        })
    }

    pub fn kind(&self) -> ResponseKind {
        self.kind
    }

    pub fn is_binary(&self) -> bool {
        self.kind == ResponseKind::Binary
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// 0/1 labels for a binary response.
    pub fn labels(&self) -> Result<Vec<u8>> {
        if !self.is_binary() {
            return Err(Error::NotBinary);
        }
        Ok(self
            .values
            .iter()
            .map(|&v| u8::from(v == T::one()))
            .collect())
    }

    pub fn mean(&self) -> T {
        if self.values.is_empty() {
            return T::zero();
        }
        self.values.iter().copied().sum::<T>() / T::from_usize_lossy(self.values.len())
    }

    pub fn select(&self, rows: &[usize]) -> Self {
        Self {
            kind: self.kind,
            values: rows.iter().map(|&i| self.values[i]).collect(),
        }
    }
}

/// The four marginal screening statistics.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Method {
    #[serde(rename = "cat-sis")]
    CatSis,
    #[serde(rename = "mmle")]
    Mmle,
    #[serde(rename = "dc-sis")]
    DcSis,
    #[serde(rename = "hlw-sis")]
    HlwSis,
}

impl Method {
    pub const ALL: [Method; 4] = [Method::CatSis, Method::Mmle, Method::DcSis, Method::HlwSis];

    pub fn label(self) -> &'static str {
        match self {
            Method::CatSis => "CAT-SIS",
            Method::Mmle => "MMLE",
            Method::DcSis => "DC-SIS",
            Method::HlwSis => "HLW-SIS",
        }
    }

    pub fn slug(self) -> &'static str {
        match self {
            Method::CatSis => "cat-sis",
            Method::Mmle => "mmle",
            Method::DcSis => "dc-sis",
            Method::HlwSis => "hlw-sis",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "cat-sis" | "catsis" | "cat" => Ok(Method::CatSis),
            "hlw-sis" | "hlwsis" | "hlw" => Ok(Method::HlwSis),
            "dc-sis" | "dcsis" | "dc" => Ok(Method::DcSis),
            "mmle" => Ok(Method::Mmle),
            other => Err(Error::Config(format!("unknown screening method `{other}`"))),
        }
    }
}

/// Per-feature screening scores with a deterministic descending ranking.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScreenResult<T> {
    pub method: Method,
    pub scores: Vec<T>,
    /// Feature indices ordered by descending score; ties by ascending index.
    pub ranking: Vec<usize>,
    /// Score forced to zero by the zero-variance guard.
    pub degenerate: Vec<bool>,
    /// Non-fatal numerical trouble (e.g. MMLE coefficient hit the cap).
    pub flagged: Vec<bool>,
}

impl<T: Scalar> ScreenResult<T> {
    pub fn new(method: Method, scores: Vec<T>, degenerate: Vec<bool>, flagged: Vec<bool>) -> Self {
        let ranking = rank_descending(&scores);
        Self {
            method,
            scores,
            ranking,
            degenerate,
            flagged,
        }
    }

    pub fn p(&self) -> usize {
        self.scores.len()
    }

    /// The `d` highest-ranked features.
    pub fn top(&self, d: usize) -> &[usize] {
        &self.ranking[..d.min(self.ranking.len())]
    }

    /// 1-based rank position of each feature.
    pub fn positions(&self) -> Vec<usize> {
        let mut pos = vec![0; self.ranking.len()];
        for (t, &j) in self.ranking.iter().enumerate() {
            pos[j] = t + 1;
        }
        pos
    }
}

/// Indices sorted by descending score, ties broken by ascending index.
pub fn rank_descending<T: Scalar>(scores: &[T]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..scores.len()).collect();
    idx.sort_by(|&a, &b| {
        scores[b]
            .partial_cmp(&scores[a])
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.cmp(&b))
    });
    idx
}

/// Set of causative (or selected) feature indices, 0-based and sorted.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrueModel {
    indices: Vec<usize>,
}

impl TrueModel {
    pub fn new(mut indices: Vec<usize>, p: usize) -> Result<Self> {
        indices.sort_unstable();
        indices.dedup();
        if indices.is_empty() {
            return Err(Error::Config("true model must be non-empty".into()));
        }
        if let Some(&bad) = indices.iter().find(|&&j| j >= p) {
            return Err(Error::Config(format!(
                "true-model index {bad} out of range for p = {p}"
            )));
        }
        Ok(Self { indices })
    }

    /// The first `k` features, `{0, …, k−1}`.
    pub fn leading(k: usize) -> Self {
        Self {
            indices: (0..k).collect(),
        }
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn contains(&self, j: usize) -> bool {
        self.indices.binary_search(&j).is_ok()
    }
}

/// Cross-tabulation of one scored categorical feature against a binary response.
#[derive(Debug, Clone, PartialEq)]
pub struct CellTable<T> {
    scores: Vec<T>,
    /// `counts[k][m]` = number of observations with level `k` and response `m`.
    counts: Vec<[usize; 2]>,
    n: usize,
}

impl<T: Scalar> CellTable<T> {
    pub fn from_counts(scores: Vec<T>, counts: Vec<[usize; 2]>) -> Result<Self> {
        if scores.len() != counts.len() {
            return Err(Error::Dimension {
                what: "cell table levels",
                expected: scores.len(),
                found: counts.len(),
            });
        }
        let n = counts.iter().map(|c| c[0] + c[1]).sum();
        if n == 0 {
            return Err(Error::NoObservations);
        }
        Ok(Self { scores, counts, n })
    }

    /// Tabulates a level column against 0/1 labels.
    pub fn tabulate(column: &[Level], labels: &[u8], scores: &[T]) -> Self {
        let mut counts = vec![[0usize; 2]; scores.len()];
        for (&l, &y) in column.iter().zip(labels) {
            counts[l as usize][y as usize] += 1;
        }
        Self {
            scores: scores.to_vec(),
            counts,
            n: column.len(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn levels(&self) -> usize {
        self.scores.len()
    }

    pub fn scores(&self) -> &[T] {
        &self.scores
    }

    pub fn count(&self, k: usize, m: usize) -> usize {
        self.counts[k][m]
    }

    pub fn level_total(&self, k: usize) -> usize {
        self.counts[k][0] + self.counts[k][1]
    }

    pub fn response_total(&self, m: usize) -> usize {
        self.counts.iter().map(|c| c[m]).sum()
    }

    fn frac(&self, c: usize) -> T {
        T::from_usize_lossy(c) / T::from_usize_lossy(self.n)
    }

    /// `p̂_km`: joint proportion of level `k` and response `m`.
    pub fn p_km(&self, k: usize, m: usize) -> T {
        self.frac(self.counts[k][m])
    }

    /// `p̂_k`: marginal proportion of level `k`.
    pub fn p_k(&self, k: usize) -> T {
        self.frac(self.level_total(k))
    }

    /// `p̂_m`: marginal proportion of response `m`.
    pub fn p_m(&self, m: usize) -> T {
        self.frac(self.response_total(m))
    }

    /// Number of levels with at least one observation.
    pub fn occupied_levels(&self) -> usize {
        (0..self.levels()).filter(|&k| self.level_total(k) > 0).count()
    }

    /// Score-weighted feature mean `X̄_j`.
    pub fn mean_x(&self) -> T {
        (0..self.levels())
            .map(|k| self.scores[k] * self.p_k(k))
            .sum()
    }

    pub fn mean_y(&self) -> T {
        self.p_m(1)
    }

    /// Standard deviation of the scored feature with a `1/n` denominator.
    pub fn sd_x(&self) -> T {
        let mean = self.mean_x();
        let var: T = (0..self.levels())
            .map(|k| {
                let d = self.scores[k] - mean;
                d * d * self.p_k(k)
            })
            .sum();
        var.max(T::zero()).sqrt()
    }

    /// Standard deviation of the 0/1 response with a `1/n` denominator.
    pub fn sd_y(&self) -> T {
        let p1 = self.p_m(1);
        (p1 * (T::one() - p1)).max(T::zero()).sqrt()
    }
}

/// Cell proportions, means and biased standard deviations for feature `j`.
pub fn empirical_cells<T: Scalar>(
    design: &CategoricalDesign<T>,
    y: &ResponseVector<T>,
    j: usize,
) -> Result<CellTable<T>> {
    if y.len() != design.n() {
        return Err(Error::Dimension {
            what: "response length",
            expected: design.n(),
            found: y.len(),
        });
    }
    if design.n() == 0 {
        return Err(Error::NoObservations);
    }
    if j >= design.p() {
        return Err(Error::Config(format!(
            "feature index {j} out of range for p = {}",
            design.p()
        )));
    }
    let labels = y.labels()?;
    Ok(CellTable::tabulate(
        design.column(j),
        &labels,
        design.level_scores(j),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn one_feature(col: Vec<Level>, k: usize) -> CategoricalDesign<f64> {
        let n = col.len();
        CategoricalDesign::with_default_scores(n, vec![col], &[k]).unwrap()
    }

    #[test]
    fn uniform_two_by_two_cells() {
        let d = one_feature(vec![0, 0, 1, 1], 2);
        let y = ResponseVector::binary(&[0, 1, 0, 1]).unwrap();
        let t = empirical_cells(&d, &y, 0).unwrap();
        for k in 0..2 {
            for m in 0..2 {
                assert_eq!(t.p_km(k, m), 0.25);
            }
            assert_eq!(t.p_k(k), 0.5);
            assert_eq!(t.p_m(k), 0.5);
        }
    }

    #[test]
    fn three_level_hand_count() {
        let d = one_feature(vec![0, 1, 2, 2], 3);
        let y = ResponseVector::binary(&[0, 0, 1, 1]).unwrap();
        let t = empirical_cells(&d, &y, 0).unwrap();
        assert_eq!(t.p_km(2, 0), 0.0);
        assert_eq!(t.p_km(2, 1), 0.5);
        assert_abs_diff_eq!(t.mean_x(), 1.25, epsilon = 1e-15);
        assert_abs_diff_eq!(t.sd_y(), 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(t.sd_x(), 0.6875_f64.sqrt(), epsilon = 1e-15);
    }

    #[test]
    fn single_observation_has_zero_spread() {
        let d = one_feature(vec![0], 1);
        let y = ResponseVector::binary(&[1]).unwrap();
        let t = empirical_cells(&d, &y, 0).unwrap();
        assert_eq!(t.sd_x(), 0.0);
        assert_eq!(t.sd_y(), 0.0);
    }

    #[test]
    fn mismatched_lengths_are_rejected() {
        let d = one_feature(vec![0, 1, 1], 2);
        let y = ResponseVector::binary(&[0, 1]).unwrap();
        assert!(matches!(
            empirical_cells(&d, &y, 0),
            Err(Error::Dimension { .. })
        ));
    }

    #[test]
    fn design_invariants_are_enforced() {
        let bad_level = CategoricalDesign::<f64>::with_default_scores(2, vec![vec![0, 3]], &[3]);
        assert!(matches!(bad_level, Err(Error::LevelOutOfRange { .. })));
        let not_increasing =
            CategoricalDesign::new(2, vec![vec![0, 1]], vec![vec![1.0, 0.5]], vec![true]);
        assert!(matches!(
            not_increasing,
            Err(Error::ScoresNotIncreasing { feature: 0 })
        ));
        let nominal = CategoricalDesign::new(2, vec![vec![0, 1]], vec![vec![1.0, 0.5]], vec![false]);
        assert!(nominal.is_ok());
    }

    #[test]
    fn ranking_breaks_ties_by_index() {
        let r = ScreenResult::new(
            Method::CatSis,
            vec![0.2, 0.5, 0.2, 0.5],
            vec![false; 4],
            vec![false; 4],
        );
        assert_eq!(r.ranking, vec![1, 3, 0, 2]);
        assert_eq!(r.positions(), vec![3, 1, 4, 2]);
    }

    #[test]
    fn binary_response_rejects_other_values() {
        assert!(ResponseVector::<f64>::binary_from_values(vec![0.0, 2.0]).is_err());
        assert!(ResponseVector::<f64>::binary(&[0, 1, 2]).is_err());
    }

    #[test]
    fn method_names_parse() {
        for m in Method::ALL {
            assert_eq!(m.slug().parse::<Method>().unwrap(), m);
        }
        assert!("lasso".parse::<Method>().is_err());
    }
}
