//! Replication harness: every method screens the same per-replicate dataset,
//! and the harness aggregates minimum model sizes and top-`d` inclusion.

use std::fmt::Write as _;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::{Method, TrueModel};
use crate::error::{Error, Result};
use crate::rng::replicate_seed;
use crate::screen::{screen, ScreenerConfig};
use crate::select::minimum_model_size;
use crate::simgen::{generate, sim1_population_correlation, SimulationSpec};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchSpec {
    pub sim: SimulationSpec,
    pub replications: usize,
    pub methods: Vec<Method>,
    pub d_list: Vec<usize>,
    pub master_seed: u64,
    /// Per-method replicate caps; a capped method runs on the first
    /// `cap` replicates only (the expensive screeners need this at scale).
    #[serde(default)]
    pub replication_caps: Vec<(Method, usize)>,
    #[serde(default)]
    pub screener: ScreenerConfig,
}

impl BenchSpec {
    pub fn new(sim: SimulationSpec, replications: usize, methods: Vec<Method>) -> Self {
        Self {
            sim,
            replications,
            methods,
            d_list: vec![10, 15, 20],
            master_seed: 0,
            replication_caps: Vec::new(),
            screener: ScreenerConfig::default(),
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.master_seed = seed;
        self
    }

    pub fn with_d_list(mut self, d_list: Vec<usize>) -> Self {
        self.d_list = d_list;
        self
    }

    pub fn with_cap(mut self, method: Method, cap: usize) -> Self {
        self.replication_caps.retain(|(m, _)| *m != method);
        self.replication_caps.push((method, cap));
        self
    }

    /// Number of replicates `method` runs on.
    pub fn replications_for(&self, method: Method) -> usize {
        self.replication_caps
            .iter()
            .find(|(m, _)| *m == method)
            .map_or(self.replications, |&(_, cap)| cap.min(self.replications))
    }

    pub fn validate(&self) -> Result<()> {
        self.sim.validate()?;
        self.screener.validate()?;
        if self.replications == 0 {
            return Err(Error::Config("replications must be at least 1".into()));
        }
        if self.methods.is_empty() {
            return Err(Error::Config("at least one method is required".into()));
        }
        if self.d_list.is_empty() {
            return Err(Error::Config("d_list must not be empty".into()));
        }
        if let Some(&d) = self.d_list.iter().find(|&&d| d == 0 || d > self.sim.p) {
            return Err(Error::Config(format!(
                "every d must lie in 1..={}, got {d}",
                self.sim.p
            )));
        }
        if self.replication_caps.iter().any(|&(_, c)| c == 0) {
            return Err(Error::Config("replication caps must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodSummary {
    pub method: Method,
    pub replications: usize,
    pub mean_mms: f64,
    /// One minimum model size per replicate, in replicate order.
    pub raw_mms: Vec<usize>,
    /// `inclusion[i][k]`: share of replicates where causative feature `k`
    /// ranked in the top `d_list[i]`.
    pub inclusion: Vec<Vec<f64>>,
    pub wall_clock_secs: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub spec: BenchSpec,
    /// Causative features, 0-based.
    pub truth: Vec<usize>,
    pub methods: Vec<MethodSummary>,
}

impl BenchReport {
    pub fn summary(&self, method: Method) -> Option<&MethodSummary> {
        self.methods.iter().find(|s| s.method == method)
    }

    /// Mean MMS of `method` restricted to the first `reps` replicates.
    pub fn mean_mms_over(&self, method: Method, reps: usize) -> Option<f64> {
        let s = self.summary(method)?;
        let k = reps.min(s.raw_mms.len());
        (k > 0).then(|| s.raw_mms[..k].iter().sum::<usize>() as f64 / k as f64)
    }
}

struct ReplicateOutcome {
    /// Indexed like `spec.methods`; `None` when the method is capped out.
    per_method: Vec<Option<(usize, Vec<Vec<bool>>, Duration)>>,
}

fn run_replicate(spec: &BenchSpec, index: usize, truth: &TrueModel) -> Result<ReplicateOutcome> {
    let sim = spec
        .sim
        .clone()
        .with_seed(replicate_seed(spec.master_seed, index as u64));
    let data = generate::<f64>(&sim).map_err(|e| Error::Replicate {
        index,
        source: Box::new(e),
    })?;
    let mut per_method = Vec::with_capacity(spec.methods.len());
    for &method in &spec.methods {
        if index >= spec.replications_for(method) {
            per_method.push(None);
            continue;
        }
        let start = Instant::now();
        let result = screen(method, &data.design, &data.response, &spec.screener).map_err(|e| {
            Error::Replicate {
                index,
                source: Box::new(e),
            }
        })?;
        let elapsed = start.elapsed();
        let mms = minimum_model_size(&result, truth);
        let pos = result.positions();
        let hits = spec
            .d_list
            .iter()
            .map(|&d| truth.indices().iter().map(|&j| pos[j] <= d).collect())
            .collect();
        per_method.push(Some((mms, hits, elapsed)));
    }
    Ok(ReplicateOutcome { per_method })
}

/// Runs all replicates and aggregates per method.
pub fn run_bench(spec: &BenchSpec) -> Result<BenchReport> {
    spec.validate()?;
    let truth = spec.sim.truth();
    let outcomes: Vec<ReplicateOutcome> = (0..spec.replications)
        .into_par_iter()
        .map(|r| run_replicate(spec, r, &truth))
        .collect::<Result<_>>()?;

    let k = truth.len();
    let methods = spec
        .methods
        .iter()
        .enumerate()
        .map(|(mi, &method)| {
            let mut raw = Vec::new();
            let mut counts = vec![vec![0usize; k]; spec.d_list.len()];
            let mut wall = Duration::ZERO;
            for o in &outcomes {
                if let Some((mms, hits, t)) = &o.per_method[mi] {
                    raw.push(*mms);
                    wall += *t;
                    for (row, hit_row) in counts.iter_mut().zip(hits) {
                        for (c, &h) in row.iter_mut().zip(hit_row) {
                            *c += usize::from(h);
                        }
                    }
                }
            }
            let reps = raw.len();
            let denom = reps.max(1) as f64;
            MethodSummary {
                method,
                replications: reps,
                mean_mms: raw.iter().sum::<usize>() as f64 / denom,
                raw_mms: raw,
                inclusion: counts
                    .into_iter()
                    .map(|row| row.into_iter().map(|c| c as f64 / denom).collect())
                    .collect(),
                wall_clock_secs: wall.as_secs_f64(),
            }
        })
        .collect();

    Ok(BenchReport {
        spec: spec.clone(),
        truth: truth.indices().to_vec(),
        methods,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TableFormat {
    Markdown,
    Tsv,
    Json,
}

impl std::str::FromStr for TableFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "markdown" | "md" => Ok(TableFormat::Markdown),
            "tsv" => Ok(TableFormat::Tsv),
            "json" => Ok(TableFormat::Json),
            other => Err(Error::Config(format!("unknown table format `{other}`"))),
        }
    }
}

fn row(cells: &[String], format: TableFormat) -> String {
    match format {
        TableFormat::Tsv => cells.join("\t"),
        _ => format!("| {} |", cells.join(" | ")),
    }
}

fn rule(width: usize) -> String {
    format!("|{}", "---|".repeat(width))
}

/// Renders the mean-MMS table followed by one inclusion table per method.
pub fn emit_tables(report: &BenchReport, format: TableFormat) -> Result<String> {
    if format == TableFormat::Json {
        return Ok(serde_json::to_string_pretty(report)?);
    }
    let md = format == TableFormat::Markdown;
    let spec = &report.spec;
    let mut out = String::new();

    let title = format!(
        "Mean Minimum Model Sizes (n = {}, p = {})",
        spec.sim.n, spec.sim.p
    );
    let _ = writeln!(out, "{}{title}", if md { "### " } else { "# " });
    if md {
        out.push('\n');
    }
    let mut header = vec![String::new()];
    header.extend(report.methods.iter().map(|s| s.method.label().to_string()));
    let _ = writeln!(out, "{}", row(&header, format));
    if md {
        let _ = writeln!(out, "{}", rule(header.len()));
    }
    let mut values = vec!["Mean Minimum Model Size".to_string()];
    values.extend(report.methods.iter().map(|s| format!("{:.3}", s.mean_mms)));
    let _ = writeln!(out, "{}", row(&values, format));

    for s in &report.methods {
        out.push('\n');
        let _ = writeln!(
            out,
            "{}Proportion of Replications Where X_j is in the Top d: {}",
            if md { "### " } else { "# " },
            s.method.label()
        );
        if md {
            out.push('\n');
        }
        let mut header = vec![String::new()];
        header.extend(report.truth.iter().map(|j| format!("X{}", j + 1)));
        let _ = writeln!(out, "{}", row(&header, format));
        if md {
            let _ = writeln!(out, "{}", rule(header.len()));
        }
        for (d, props) in spec.d_list.iter().zip(&s.inclusion) {
            let mut cells = vec![format!("d = {d}")];
            cells.extend(props.iter().map(|v| format!("{v:.3}")));
            let _ = writeln!(out, "{}", row(&cells, format));
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeRow {
    pub n: usize,
    /// Median over replicates of `max_j |ρ̂_j − |ρ_j||`.
    pub median_max_error: f64,
    /// Share of replicates whose top-`|S_T|` prefix equals the true set.
    pub exact_recovery: f64,
}

/// Monte Carlo check of screening consistency on design-1 data with
/// `P(Y = 1)` fixed at 0.5, where the population correlations are exact.
pub fn consistency_probe(
    n_grid: &[usize],
    base: &SimulationSpec,
    reps: usize,
    master_seed: u64,
) -> Result<Vec<ProbeRow>> {
    if base.design_id != 1 {
        return Err(Error::Config("the consistency probe needs design 1".into()));
    }
    if reps == 0 || n_grid.is_empty() {
        return Err(Error::Config("probe needs reps >= 1 and a non-empty grid".into()));
    }
    let mut spec = base.clone();
    spec.fixed_p_y = Some(0.5);
    let rho: Vec<f64> = sim1_population_correlation(&spec, 0.5)
        .into_iter()
        .map(f64::abs)
        .collect();
    let truth = spec.truth();
    let k = truth.len();

    n_grid
        .iter()
        .enumerate()
        .map(|(gi, &n)| {
            let per_rep: Vec<(f64, bool)> = (0..reps)
                .into_par_iter()
                .map(|r| {
                    let seed = replicate_seed(master_seed, (gi * reps + r) as u64);
                    let sim = spec.clone().with_size(n, spec.p).with_seed(seed);
                    let data = generate::<f64>(&sim).map_err(|e| Error::Replicate {
                        index: r,
                        source: Box::new(e),
                    })?;
                    let res = crate::screen::cat_sis(&data.design, &data.response)?;
                    let err = res
                        .scores
                        .iter()
                        .zip(&rho)
                        .map(|(&s, &t)| (s - t).abs())
                        .fold(0.0, f64::max);
                    let mut top = res.top(k).to_vec();
                    top.sort_unstable();
                    Ok((err, top == truth.indices()))
                })
                .collect::<Result<_>>()?;
            let mut errs: Vec<f64> = per_rep.iter().map(|x| x.0).collect();
            errs.sort_by(f64::total_cmp);
            let m = errs.len();
            let median = if m % 2 == 1 {
                errs[m / 2]
            } else {
                0.5 * (errs[m / 2 - 1] + errs[m / 2])
            };
            let hits = per_rep.iter().filter(|x| x.1).count();
            Ok(ProbeRow {
                n,
                median_max_error: median,
                exact_recovery: hits as f64 / reps as f64,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(design: u8) -> BenchSpec {
        BenchSpec::new(
            SimulationSpec::defaults(design).with_size(60, 40),
            4,
            vec![Method::CatSis, Method::HlwSis],
        )
        .with_seed(5)
    }

    #[test]
    fn validation_rejects_bad_specs() {
        assert!(small(1).with_d_list(vec![]).validate().is_err());
        assert!(small(1).with_d_list(vec![41]).validate().is_err());
        let mut s = small(1);
        s.replications = 0;
        assert!(s.validate().is_err());
    }

    #[test]
    fn caps_limit_replicates() {
        let spec = small(1).with_cap(Method::HlwSis, 2);
        let r = run_bench(&spec).unwrap();
        assert_eq!(r.summary(Method::CatSis).unwrap().raw_mms.len(), 4);
        assert_eq!(r.summary(Method::HlwSis).unwrap().raw_mms.len(), 2);
    }

    #[test]
    fn report_shapes() {
        let r = run_bench(&small(3)).unwrap();
        for s in &r.methods {
            assert_eq!(s.inclusion.len(), 3);
            assert!(s.inclusion.iter().all(|row| row.len() == 5));
            assert!(s.mean_mms >= 5.0);
        }
    }

    #[test]
    fn markdown_has_one_inclusion_table_per_method() {
        let r = run_bench(&small(1)).unwrap();
        let md = emit_tables(&r, TableFormat::Markdown).unwrap();
        assert_eq!(md.matches("Proportion of Replications").count(), 2);
        assert!(md.contains("| d = 15 |"));
        let tsv = emit_tables(&r, TableFormat::Tsv).unwrap();
        assert!(tsv.contains("\tCAT-SIS\tHLW-SIS"));
    }
}
