use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{Context, Result};
use catsis::bench::{emit_tables, run_bench, BenchSpec, TableFormat};
use catsis::io::{
    default_feature_names, load_dataset, save_dataset, write_json, write_ranking, LoadedDataset,
    Provenance, ResponseMode, Sidecar,
};
use catsis::logit::{
    adaptive_lasso, cv_select, default_alpha_grid, elastic_net_grid, CvOptions, PenaltySpec,
};
use catsis::pipeline::{run_pipeline, P1Search, PipelineSpec, PostMethod};
use catsis::simgen::{generate, SimulationSpec};
use catsis::{screen, select, Method, ScreenerConfig, SelectionRule};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;

#[derive(Parser, Debug)]
#[command(name = "catsis", version, about = "Feature screening for categorical data with a binary response")]
struct Cli {
    /// Worker threads; 0 uses every available core, 1 gives bitwise
    /// reproducible runs.
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a dataset from one of the four simulation designs.
    Simulate(SimulateArgs),
    /// Rank features of a CSV dataset with one or all screeners.
    Screen(ScreenArgs),
    /// Run the replication benchmark and write its tables.
    Bench(BenchArgs),
    /// Fit a penalized logistic model to every feature of a CSV dataset.
    Postscreen(PostscreenArgs),
    /// Two-stage iterative screening followed by post-screening fits.
    Pipeline(PipelineArgs),
}

#[derive(Args, Debug, Serialize)]
struct SimulateArgs {
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=4))]
    sim: u8,
    #[arg(long, default_value_t = 200)]
    n: usize,
    /// Defaults to 5000 for designs 1-3 and 1000 for design 4.
    #[arg(long)]
    p: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output CSV; a `.json` sidecar with the truth and provenance is written
    /// next to it.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug, Serialize)]
struct InputArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long, default_value = "y")]
    response_col: String,
}

#[derive(Args, Debug, Serialize)]
struct ScreenArgs {
    #[command(flatten)]
    input: InputArgs,
    /// cat-sis, mmle, dc-sis, hlw-sis, or all.
    #[arg(long, default_value = "cat-sis")]
    method: String,
    /// Optional model selection: `top:D`, `cutoff:C`, or `ratio[:FLOOR]`.
    #[arg(long)]
    select: Option<String>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output directory; one `<method>.csv` ranking and `<method>.json`
    /// sidecar per method.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug, Serialize)]
struct BenchArgs {
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=4))]
    sim: u8,
    #[arg(long, default_value_t = 200)]
    n: usize,
    #[arg(long)]
    p: Option<usize>,
    #[arg(long, default_value_t = 500)]
    reps: usize,
    /// Comma-separated list, or `all`.
    #[arg(long, default_value = "all")]
    methods: String,
    #[arg(long, default_value = "10,15,20", value_delimiter = ',')]
    d_list: Vec<usize>,
    /// Per-method replicate caps, e.g. `dc-sis=100,mmle=200`.
    #[arg(long)]
    caps: Option<String>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output directory for `tables.md`, `tables.tsv`, and `report.json`.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug, Serialize)]
struct PostscreenArgs {
    #[command(flatten)]
    input: InputArgs,
    /// lasso, adaptive, or enet.
    #[arg(long, default_value = "lasso")]
    method: String,
    /// Comma-separated α values for enet; defaults to 0.01, 0.02, ..., 0.99.
    #[arg(long, value_delimiter = ',')]
    alpha_grid: Option<Vec<f64>>,
    #[arg(long, default_value_t = 10)]
    folds: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output JSON file.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug, Serialize)]
struct PipelineArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long, default_value_t = 5)]
    p1_min: usize,
    /// Defaults to n / ln n, rounded.
    #[arg(long)]
    p1_max: Option<usize>,
    #[arg(long, default_value_t = 200)]
    tuning_reps: usize,
    /// Evaluate every p1 instead of the coarse-to-fine search.
    #[arg(long)]
    exhaustive: bool,
    /// Defaults to n^0.8 / ln n^0.8, rounded.
    #[arg(long)]
    final_d: Option<usize>,
    #[arg(long, default_value = "lasso,adaptive,enet", value_delimiter = ',')]
    post: Vec<String>,
    #[arg(long, value_delimiter = ',')]
    alpha_grid: Option<Vec<f64>>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output directory for `report.json` and `summary.md`.
    #[arg(long)]
    out: PathBuf,
}

fn parse_methods(s: &str) -> Result<Vec<Method>> {
    if s.trim() == "all" {
        return Ok(Method::ALL.to_vec());
    }
    s.split(',')
        .map(|m| m.trim().parse::<Method>().map_err(anyhow::Error::from))
        .collect()
}

fn parse_rule(s: &str) -> Result<SelectionRule> {
    let (kind, arg) = s.split_once(':').map_or((s, None), |(k, a)| (k, Some(a)));
    let rule = match (kind, arg) {
        ("top", Some(d)) => SelectionRule::TopD(d.parse().context("top:D needs an integer")?),
        ("cutoff", Some(c)) => SelectionRule::Cutoff(c.parse().context("cutoff:C needs a number")?),
        ("ratio", None) => SelectionRule::ratio_default(),
        ("ratio", Some(f)) => SelectionRule::RatioArgmax {
            floor: f.parse().context("ratio:FLOOR needs a number")?,
        },
        _ => return Err(catsis::Error::Config(format!("unknown selection rule `{s}`")).into()),
    };
    Ok(rule)
}

fn parse_caps(s: &str) -> Result<Vec<(Method, usize)>> {
    s.split(',')
        .map(|part| {
            let (m, c) = part
                .split_once('=')
                .ok_or_else(|| catsis::Error::Config(format!("cap `{part}` is not METHOD=COUNT")))?;
            let count = c
                .trim()
                .parse()
                .map_err(|_| catsis::Error::Config(format!("cap `{part}` has a bad count")))?;
            Ok((m.trim().parse()?, count))
        })
        .collect()
}

fn sidecar_path(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".json");
    PathBuf::from(s)
}

fn simulate(args: &SimulateArgs) -> Result<()> {
    let start = Instant::now();
    let mut spec = SimulationSpec::defaults(args.sim).with_seed(args.seed);
    spec.n = args.n;
    if let Some(p) = args.p {
        spec.p = p;
    }
    let data = generate::<f64>(&spec)?;
    let loaded = LoadedDataset {
        feature_names: default_feature_names(spec.p),
        response_name: "y".into(),
        design: data.design,
        response: data.response,
    };
    save_dataset(&args.out, &loaded)?;
    #[derive(Serialize)]
    struct Payload<'a> {
        spec: &'a SimulationSpec,
        truth: Vec<usize>,
    }
    let doc = Sidecar {
        provenance: Provenance::new(
            "simulate",
            args.seed,
            serde_json::to_value(args)?,
            start.elapsed().as_secs_f64(),
        ),
        payload: Payload {
            spec: &spec,
            truth: data.truth.indices().iter().map(|j| j + 1).collect(),
        },
    };
    write_json(&sidecar_path(&args.out), &doc)?;
    Ok(())
}

fn screen_cmd(args: &ScreenArgs) -> Result<()> {
    let methods = parse_methods(&args.method)?;
    let rule = args.select.as_deref().map(parse_rule).transpose()?;
    let data = load_dataset(&args.input.input, &args.input.response_col, ResponseMode::Auto)?;
    fs::create_dir_all(&args.out)?;
    let cfg = ScreenerConfig::default();
    for method in methods {
        let start = Instant::now();
        let result = screen(method, &data.design, &data.response, &cfg)?;
        let elapsed = start.elapsed().as_secs_f64();
        let selected = rule
            .map(|r| select(&result, r))
            .transpose()?
            .map(|m| {
                m.indices()
                    .iter()
                    .map(|&j| data.feature_names[j].clone())
                    .collect::<Vec<_>>()
            });
        let csv_path = args.out.join(format!("{}.csv", method.slug()));
        write_ranking(fs::File::create(&csv_path)?, &result, &data.feature_names)?;
        #[derive(Serialize)]
        struct Payload {
            method: Method,
            n: usize,
            p: usize,
            selection_rule: Option<SelectionRule>,
            selected: Option<Vec<String>>,
            degenerate: Vec<String>,
            flagged: Vec<String>,
        }
        let names = |bits: &[bool]| {
            bits.iter()
                .enumerate()
                .filter(|(_, &b)| b)
                .map(|(j, _)| data.feature_names[j].clone())
                .collect()
        };
        let doc = Sidecar {
            provenance: Provenance::new("screen", args.seed, serde_json::to_value(args)?, elapsed),
            payload: Payload {
                method,
                n: data.design.n(),
                p: data.design.p(),
                selection_rule: rule,
                selected,
                degenerate: names(&result.degenerate),
                flagged: names(&result.flagged),
            },
        };
        write_json(&args.out.join(format!("{}.json", method.slug())), &doc)?;
    }
    Ok(())
}

fn bench_cmd(args: &BenchArgs) -> Result<()> {
    let start = Instant::now();
    let mut sim = SimulationSpec::defaults(args.sim);
    sim.n = args.n;
    if let Some(p) = args.p {
        sim.p = p;
    }
    let mut spec = BenchSpec::new(sim, args.reps, parse_methods(&args.methods)?)
        .with_seed(args.seed)
        .with_d_list(args.d_list.clone());
    if let Some(caps) = &args.caps {
        for (m, c) in parse_caps(caps)? {
            spec = spec.with_cap(m, c);
        }
    }
    let report = run_bench(&spec)?;
    fs::create_dir_all(&args.out)?;
    fs::write(args.out.join("tables.md"), emit_tables(&report, TableFormat::Markdown)?)?;
    fs::write(args.out.join("tables.tsv"), emit_tables(&report, TableFormat::Tsv)?)?;
    let doc = Sidecar {
        provenance: Provenance::new(
            "bench",
            args.seed,
            serde_json::to_value(args)?,
            start.elapsed().as_secs_f64(),
        ),
        payload: &report,
    };
    write_json(&args.out.join("report.json"), &doc)?;
    print!("{}", emit_tables(&report, TableFormat::Markdown)?);
    Ok(())
}

fn binary_matrix(data: &LoadedDataset) -> Result<(catsis::NumericMatrixF64, Vec<u8>)> {
    let all: Vec<usize> = (0..data.design.p()).collect();
    Ok((data.design.to_numeric(&all), data.response.labels()?))
}

fn postscreen_cmd(args: &PostscreenArgs) -> Result<()> {
    let start = Instant::now();
    let method: PostMethod = args.method.parse()?;
    let data = load_dataset(&args.input.input, &args.input.response_col, ResponseMode::Binary)?;
    let (x, y) = binary_matrix(&data)?;
    let opts = CvOptions::default().with_folds(args.folds).with_seed(args.seed);
    let fit = match method {
        PostMethod::Lasso => cv_select(&x, &y, &PenaltySpec::lasso(), &opts)?,
        PostMethod::Adaptive => adaptive_lasso(&x, &y, &opts)?,
        PostMethod::Enet => {
            let grid = args.alpha_grid.clone().unwrap_or_else(default_alpha_grid);
            elastic_net_grid(&x, &y, &grid, &opts)?
        }
    };
    #[derive(Serialize)]
    struct Payload<'a> {
        method: PostMethod,
        selected: Vec<&'a str>,
        fit: &'a catsis::logit::PenalizedFit,
    }
    let doc = Sidecar {
        provenance: Provenance::new(
            "postscreen",
            args.seed,
            serde_json::to_value(args)?,
            start.elapsed().as_secs_f64(),
        ),
        payload: Payload {
            method,
            selected: fit
                .active_set()
                .iter()
                .map(|&j| data.feature_names[j].as_str())
                .collect(),
            fit: &fit,
        },
    };
    write_json(&args.out, &doc)?;
    Ok(())
}

fn pipeline_cmd(args: &PipelineArgs) -> Result<()> {
    let start = Instant::now();
    let data = load_dataset(&args.input.input, &args.input.response_col, ResponseMode::Binary)?;
    let post = args
        .post
        .iter()
        .map(|s| s.parse::<PostMethod>())
        .collect::<catsis::Result<Vec<_>>>()?;
    let spec = PipelineSpec {
        p1_min: args.p1_min,
        p1_max: args.p1_max,
        tuning_reps: args.tuning_reps,
        final_d: args.final_d,
        post_methods: post,
        search: if args.exhaustive {
            P1Search::Exhaustive
        } else {
            P1Search::CoarseToFine { stride: 8 }
        },
        alpha_grid: args.alpha_grid.clone().unwrap_or_else(default_alpha_grid),
        seed: args.seed,
        ..PipelineSpec::default()
    };
    let report = run_pipeline(&data.design, &data.response, &spec)?;
    fs::create_dir_all(&args.out)?;
    let summary = report.summary_table();
    fs::write(args.out.join("summary.md"), &summary)?;
    #[derive(Serialize)]
    struct Payload<'a> {
        selected: Vec<&'a str>,
        report: &'a catsis::pipeline::PipelineReport,
    }
    let doc = Sidecar {
        provenance: Provenance::new(
            "pipeline",
            args.seed,
            serde_json::to_value(args)?,
            start.elapsed().as_secs_f64(),
        ),
        payload: Payload {
            selected: report
                .selected
                .iter()
                .map(|&j| data.feature_names[j].as_str())
                .collect(),
            report: &report,
        },
    };
    write_json(&args.out.join("report.json"), &doc)?;
    print!("{summary}");
    Ok(())
}

fn run(cli: &Cli) -> Result<()> {
    if cli.threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(cli.threads)
            .build_global()
            .context("configuring the thread pool")?;
    }
    match &cli.command {
        Command::Simulate(a) => simulate(a),
        Command::Screen(a) => screen_cmd(a),
        Command::Bench(a) => bench_cmd(a),
        Command::Postscreen(a) => postscreen_cmd(a),
        Command::Pipeline(a) => pipeline_cmd(a),
    }
}

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<catsis::Error>() {
        Some(e) if e.is_usage() => 2,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use anyhow::bail;

    #[test]
    fn rule_parsing() {
        assert_eq!(parse_rule("top:12").unwrap(), SelectionRule::TopD(12));
        assert_eq!(parse_rule("ratio").unwrap(), SelectionRule::ratio_default());
        assert_eq!(
            parse_rule("ratio:0").unwrap(),
            SelectionRule::RatioArgmax { floor: 0.0 }
        );
        assert!(parse_rule("best").is_err());
    }

    #[test]
    fn cap_parsing() {
        assert_eq!(
            parse_caps("dc-sis=100, mmle=20").unwrap(),
            vec![(Method::DcSis, 100), (Method::Mmle, 20)]
        );
        let err = parse_caps("dc-sis").unwrap_err();
        assert_eq!(exit_code(&err), 2);
    }

    #[test]
    fn bail_is_a_runtime_error() {
        let err = (|| -> Result<()> { bail!("boom") })().unwrap_err();
        assert_eq!(exit_code(&err), 1);
    }
}
