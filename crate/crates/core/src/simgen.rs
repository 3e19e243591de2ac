//! Seeded generators for the four benchmark designs.
//!
//! 1. Genotype-like features: causative `X_j | Y=m ~ Binomial(2, π_mj)`.
//! 2. Causative features from thresholding `Z ~ Normal(Y, 1)` at `(κ_L, κ_U)`.
//! 3. Uniform `{0,1,2}` features with a logistic response on five of them.
//! 4. AR(1) Gaussian features with a linear continuous response.
//!
//! Noise features in designs 1 and 2 are `Binomial(2, p_j)` with
//! `p_j ~ Unif(0.05, 0.95)` drawn per feature, independent of `Y`. The
//! response probability `p_y ~ Unif(0.05, 0.95)` is drawn per dataset.
//! See [`crate::rng`] for how seeds map to random streams.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::{
    CategoricalDesign, Design, Level, NumericMatrix, ResponseVector, TrueModel,
};
use crate::error::{Error, Result};
use crate::rng::{feature_rng, stream_rng, RESPONSE_STREAM};
use crate::scalar::{sigmoid, Scalar};

pub const SIM1_PI: [[f64; 10]; 2] = [
    [0.3, 0.4, 0.6, 0.7, 0.2, 0.4, 0.3, 0.8, 0.4, 0.2],
    [0.6, 0.1, 0.1, 0.4, 0.8, 0.7, 0.9, 0.2, 0.7, 0.6],
];

pub const SIM2_CUTOFFS: [(f64, f64); 10] = [
    (0.0, 0.75),
    (0.0, 1.0),
    (0.2, 0.8),
    (0.0, 0.9),
    (-0.213, 1.213),
    (0.25, 1.0),
    (0.0, 1.0),
    (0.1, 1.0),
    (-0.2, 1.2),
    (0.213, 0.787),
];

/// `SIM3_THETA[k][j]`: contribution of level `k` of feature `j` to the logit.
pub const SIM3_THETA: [[f64; 5]; 3] = [
    [0.0, -5.0, 2.0, -6.0, 1.0],
    [3.0, -3.0, 4.0, -4.0, 3.0],
    [5.0, -1.0, 6.0, -2.0, 5.0],
];

pub const SIM4_BETA: [f64; 10] = [5.0, -5.0, 5.5, -6.0, 6.0, 4.0, 4.5, -5.5, 5.0, -4.0];

pub const SIM4_AR_RHO: f64 = 0.2;

const PROB_LOW: f64 = 0.05;
const PROB_HIGH: f64 = 0.95;

/// Full parameterization of one generator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationSpec {
    pub design_id: u8,
    pub n: usize,
    pub p: usize,
    pub seed: u64,
    pub sim1_pi: [[f64; 10]; 2],
    pub sim2_cutoffs: [(f64, f64); 10],
    pub sim3_theta: [[f64; 5]; 3],
    pub sim4_beta: [f64; 10],
    pub sim4_ar_rho: f64,
    /// Overrides the per-dataset draw of `P(Y = 1)` in designs 1 and 2.
    #[serde(default)]
    pub fixed_p_y: Option<f64>,
}

impl SimulationSpec {
    /// Spec with the published defaults for `design_id`
    /// (`n = 200`; `p = 5000`, or `p = 1000` for design 4).
    pub fn defaults(design_id: u8) -> Self {
        Self {
            design_id,
            n: 200,
            p: if design_id == 4 { 1000 } else { 5000 },
            seed: 0,
            sim1_pi: SIM1_PI,
            sim2_cutoffs: SIM2_CUTOFFS,
            sim3_theta: SIM3_THETA,
            sim4_beta: SIM4_BETA,
            sim4_ar_rho: SIM4_AR_RHO,
            fixed_p_y: None,
        }
    }

    pub fn with_size(mut self, n: usize, p: usize) -> Self {
        self.n = n;
        self.p = p;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn causative_count(&self) -> usize {
        if self.design_id == 3 {
            5
        } else {
            10
        }
    }

    pub fn truth(&self) -> TrueModel {
        TrueModel::leading(self.causative_count())
    }

    pub fn validate(&self) -> Result<()> {
        if !(1..=4).contains(&self.design_id) {
            return Err(Error::Config(format!(
                "design id must be 1..=4, got {}",
                self.design_id
            )));
        }
        if self.n < 2 {
            return Err(Error::Config("simulation needs n >= 2".into()));
        }
        let k = self.causative_count();
        if self.p < k {
            return Err(Error::Config(format!(
                "design {} needs p >= {k}, got {}",
                self.design_id, self.p
            )));
        }
        if self
            .sim1_pi
            .iter()
            .flatten()
            .any(|&v| !(0.0..=1.0).contains(&v))
        {
            return Err(Error::Config("π entries must lie in [0, 1]".into()));
        }
        if let Some((j, _)) = self
            .sim2_cutoffs
            .iter()
            .enumerate()
            .find(|(_, (lo, hi))| lo > hi || lo.is_nan() || hi.is_nan())
        {
            return Err(Error::Config(format!(
                "cutoffs for feature {} must satisfy κ_L <= κ_U",
                j + 1
            )));
        }
        if !(self.sim4_ar_rho.abs() < 1.0) {
            return Err(Error::Config("AR(1) coefficient must lie in (-1, 1)".into()));
        }
        if let Some(py) = self.fixed_p_y {
            if !(py > 0.0 && py < 1.0) {
                return Err(Error::Config("fixed p_y must lie in (0, 1)".into()));
            }
        }
        Ok(())
    }
}

/// A generated dataset together with its causative set.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset<T> {
    pub design: Design<T>,
    pub response: ResponseVector<T>,
    pub truth: TrueModel,
}

/// Genotype probabilities `θ_k = C(2,k) π^k (1−π)^{2−k}`, `k = 0, 1, 2`.
pub fn binomial2_probs(pi: f64) -> [f64; 3] {
    let q = 1.0 - pi;
    [q * q, 2.0 * pi * q, pi * pi]
}

/// Maps a uniform draw to a level by inverting the cumulative distribution.
#[inline]
fn draw_level(theta: &[f64; 3], u: f64) -> Level {
    if u < theta[0] {
        0
    } else if u < theta[0] + theta[1] {
        1
    } else {
        2
    }
}

/// Level rule for a thresholded normal draw; both cutoffs belong to level 1.
#[inline]
pub fn threshold_level(z: f64, lower: f64, upper: f64) -> Level {
    if z < lower {
        0
    } else if z <= upper {
        1
    } else {
        2
    }
}

fn binary_response(spec: &SimulationSpec, rng: &mut ChaCha8Rng) -> Vec<u8> {
    let p_y = spec
        .fixed_p_y
        .unwrap_or_else(|| rng.random_range(PROB_LOW..PROB_HIGH));
    (0..spec.n)
        .map(|_| u8::from(rng.random::<f64>() < p_y))
        .collect()
}

fn noise_column(n: usize, rng: &mut ChaCha8Rng) -> Vec<Level> {
    let theta = binomial2_probs(rng.random_range(PROB_LOW..PROB_HIGH));
    (0..n).map(|_| draw_level(&theta, rng.random())).collect()
}

fn genotype_design<T: Scalar>(n: usize, columns: Vec<Vec<Level>>) -> Result<Design<T>> {
    let counts = vec![3; columns.len()];
    Ok(Design::Categorical(CategoricalDesign::with_default_scores(
        n, columns, &counts,
    )?))
}

fn check(spec: &SimulationSpec, id: u8) -> Result<()> {
    if spec.design_id != id {
        return Err(Error::Config(format!(
            "spec is for design {}, not {id}",
            spec.design_id
        )));
    }
    spec.validate()
}

pub fn gen_sim1<T: Scalar>(spec: &SimulationSpec) -> Result<Dataset<T>> {
    check(spec, 1)?;
    let n = spec.n;
    let y = binary_response(spec, &mut stream_rng(spec.seed, RESPONSE_STREAM));
    let columns: Vec<Vec<Level>> = (0..spec.p)
        .into_par_iter()
        .map(|j| {
            let mut rng = feature_rng(spec.seed, j);
            if j < 10 {
                let theta = [
                    binomial2_probs(spec.sim1_pi[0][j]),
                    binomial2_probs(spec.sim1_pi[1][j]),
                ];
                y.iter()
                    .map(|&m| draw_level(&theta[m as usize], rng.random()))
                    .collect()
            } else {
                noise_column(n, &mut rng)
            }
        })
        .collect();
    Ok(Dataset {
        design: genotype_design(n, columns)?,
        response: ResponseVector::binary(&y)?,
        truth: spec.truth(),
    })
}

pub fn gen_sim2<T: Scalar>(spec: &SimulationSpec) -> Result<Dataset<T>> {
    check(spec, 2)?;
    let n = spec.n;
    let y = binary_response(spec, &mut stream_rng(spec.seed, RESPONSE_STREAM));
    let columns: Vec<Vec<Level>> = (0..spec.p)
        .into_par_iter()
        .map(|j| {
            let mut rng = feature_rng(spec.seed, j);
            if j < 10 {
                let (lo, hi) = spec.sim2_cutoffs[j];
                y.iter()
                    .map(|&m| {
                        let z: f64 = rng.sample::<f64, _>(StandardNormal) + f64::from(m);
                        threshold_level(z, lo, hi)
                    })
                    .collect()
            } else {
                noise_column(n, &mut rng)
            }
        })
        .collect();
    Ok(Dataset {
        design: genotype_design(n, columns)?,
        response: ResponseVector::binary(&y)?,
        truth: spec.truth(),
    })
}

/// Logit `L = Σ_{j<5} θ[x_j][j]` for one observation's first five levels.
pub fn sim3_logit(theta: &[[f64; 5]; 3], levels: &[Level]) -> f64 {
    levels
        .iter()
        .take(5)
        .enumerate()
        .map(|(j, &k)| theta[k as usize][j])
        .sum()
}

pub fn gen_sim3<T: Scalar>(spec: &SimulationSpec) -> Result<Dataset<T>> {
    check(spec, 3)?;
    let n = spec.n;
    let columns: Vec<Vec<Level>> = (0..spec.p)
        .into_par_iter()
        .map(|j| {
            let mut rng = feature_rng(spec.seed, j);
            (0..n).map(|_| rng.random_range(0..3u16)).collect()
        })
        .collect();
    let mut rng = stream_rng(spec.seed, RESPONSE_STREAM);
    let y: Vec<u8> = (0..n)
        .map(|i| {
            let row: Vec<Level> = columns.iter().take(5).map(|c| c[i]).collect();
            let prob = sigmoid(sim3_logit(&spec.sim3_theta, &row));
            u8::from(rng.random::<f64>() < prob)
        })
        .collect();
    Ok(Dataset {
        design: genotype_design(n, columns)?,
        response: ResponseVector::binary(&y)?,
        truth: spec.truth(),
    })
}

/// Rows are `MVN(0, Σ)` with `Σ_{jk} = ρ^{|j−k|}`, built by the AR(1)
/// recursion `X_j = ρ X_{j−1} + √(1−ρ²) ε_j`; the response is
/// `Y = Σ_{j<10} β_j X_j`.
pub fn gen_sim4<T: Scalar>(spec: &SimulationSpec) -> Result<Dataset<T>> {
    check(spec, 4)?;
    let n = spec.n;
    let rho = spec.sim4_ar_rho;
    let innov = (1.0 - rho * rho).sqrt();
    let mut columns: Vec<Vec<f64>> = (0..spec.p)
        .into_par_iter()
        .map(|j| {
            let mut rng = feature_rng(spec.seed, j);
            (0..n).map(|_| rng.sample::<f64, _>(StandardNormal)).collect()
        })
        .collect();
    for j in 1..spec.p {
        let (done, rest) = columns.split_at_mut(j);
        let prev = &done[j - 1];
        for (x, &xp) in rest[0].iter_mut().zip(prev) {
            *x = rho * xp + innov * *x;
        }
    }
    let y: Vec<f64> = (0..n)
        .map(|i| {
            spec.sim4_beta
                .iter()
                .enumerate()
                .map(|(j, &b)| b * columns[j][i])
                .sum()
        })
        .collect();
    let cast = |v: Vec<f64>| v.into_iter().map(T::lit).collect::<Vec<T>>();
    let matrix = NumericMatrix::from_columns(columns.into_iter().map(cast).collect())?;
    Ok(Dataset {
        design: Design::Numeric(matrix),
        response: ResponseVector::continuous(cast(y))?,
        truth: spec.truth(),
    })
}

/// Dispatches on `spec.design_id`.
pub fn generate<T: Scalar>(spec: &SimulationSpec) -> Result<Dataset<T>> {
    match spec.design_id {
        1 => gen_sim1(spec),
        2 => gen_sim2(spec),
        3 => gen_sim3(spec),
        4 => gen_sim4(spec),
        other => Err(Error::Config(format!("design id must be 1..=4, got {other}"))),
    }
}

/// Population correlation between each design-1 feature and `Y` when
/// `P(Y = 1) = p_y`; noise features are independent of `Y` and get 0.
pub fn sim1_population_correlation(spec: &SimulationSpec, p_y: f64) -> Vec<f64> {
    let pm = [1.0 - p_y, p_y];
    let sd_y = (p_y * (1.0 - p_y)).sqrt();
    (0..spec.p)
        .map(|j| {
            if j >= 10 {
                return 0.0;
            }
            let mut joint = [[0.0; 2]; 3];
            for m in 0..2 {
                let theta = binomial2_probs(spec.sim1_pi[m][j]);
                for k in 0..3 {
                    joint[k][m] = theta[k] * pm[m];
                }
            }
            let px: Vec<f64> = joint.iter().map(|r| r[0] + r[1]).collect();
            let ex: f64 = (0..3).map(|k| k as f64 * px[k]).sum();
            let var_x: f64 = (0..3).map(|k| (k as f64 - ex).powi(2) * px[k]).sum();
            let cov: f64 = (0..3)
                .flat_map(|k| (0..2).map(move |m| (k, m)))
                .map(|(k, m)| (k as f64 - ex) * (m as f64 - p_y) * joint[k][m])
                .sum();
            cov / (var_x.sqrt() * sd_y)
        })
        .collect()
}
