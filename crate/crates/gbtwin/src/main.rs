use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use gbtwin::bench::{parallel_grid_search, run_benchmark, write_results, BenchConfig};
use gbtwin::config::KvConfig;
use gbtwin::io::{self, CsvOptions, LabelMap, ModelFile};
use gbtwin::report::run_stats;
use gbtwin_core::dataset::{gen_crossplane, gen_ndc, minmax_normalize};
use gbtwin_core::eval::accuracy;
use gbtwin_core::granular::generate_balls;
use gbtwin_core::models::train_pipeline;
use gbtwin_core::{BallSet, GridSpec, HyperParams, KernelKind, SolverConfig, Variant};

#[derive(Parser)]
#[command(name = "gbtwin", version, about = "Granular-ball least-squares twin SVMs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a synthetic dataset as CSV.
    GenData(GenArgs),
    /// Fit one model and save it.
    Train(RunArgs),
    /// Label the rows of a CSV with a saved model.
    Predict(PredictArgs),
    /// Run every dataset × noise × variant cell and write the result tables.
    Benchmark(RunArgs),
    /// Ranks, Friedman, Wilcoxon and win-tie-loss over an accuracy table.
    Stats(StatsArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Generator {
    Crossplane,
    Ndc,
}

#[derive(Args)]
struct GenArgs {
    #[arg(value_enum)]
    generator: Generator,
    /// Number of samples.
    #[arg(long, default_value_t = 200)]
    n: usize,
    /// Feature count (ndc).
    #[arg(long, default_value_t = 2)]
    dim: usize,
    /// Class separation in cluster standard deviations (ndc).
    #[arg(long, default_value_t = 6.0)]
    separation: f64,
    /// Perpendicular jitter (crossplane).
    #[arg(long, default_value_t = 0.0)]
    jitter: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct RunArgs {
    /// Key-value config file; flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Dataset CSV; repeat for several.
    #[arg(long)]
    data: Vec<PathBuf>,
    /// Model variant; repeat or comma-separate (benchmark).
    #[arg(long, value_delimiter = ',')]
    variant: Vec<String>,
    #[arg(long)]
    kernel: Option<String>,
    /// Training label-noise rates; repeat or comma-separate.
    #[arg(long, value_delimiter = ',')]
    noise: Vec<f64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Hyperparameter search: coarse, full or fixed.
    #[arg(long)]
    grid: Option<String>,
    #[arg(long)]
    c1: Option<f64>,
    #[arg(long)]
    c2: Option<f64>,
    #[arg(long)]
    c3: Option<f64>,
    #[arg(long)]
    c4: Option<f64>,
    #[arg(long)]
    sigma: Option<f64>,
    #[arg(long)]
    pur: Option<f64>,
    #[arg(long)]
    num: Option<usize>,
    #[arg(long)]
    folds: Option<usize>,
    #[arg(long)]
    train_fraction: Option<f64>,
    /// Skip min-max scaling.
    #[arg(long)]
    no_normalize: bool,
    /// Also corrupt test labels.
    #[arg(long)]
    noise_on_test: bool,
    /// Zero-based label column; default last.
    #[arg(long)]
    label_column: Option<usize>,
    /// Label value mapped to +1; everything else is -1.
    #[arg(long)]
    positive_label: Option<f64>,
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long)]
    max_sweeps: Option<usize>,
    #[arg(long)]
    tolerance: Option<f64>,
    /// Output directory (benchmark) or model file (train).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write the training ball set as CSV (train).
    #[arg(long)]
    balls: Option<PathBuf>,
}

#[derive(Args)]
struct PredictArgs {
    #[arg(long)]
    model: PathBuf,
    /// Feature CSV; a trailing label column is used to report accuracy.
    #[arg(long)]
    data: PathBuf,
    #[arg(long)]
    label_column: Option<usize>,
    #[arg(long)]
    positive_label: Option<f64>,
    /// Prediction file; default stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum StatsFormat {
    Text,
    Kv,
}

#[derive(Args)]
struct StatsArgs {
    /// Accuracy table CSV.
    #[arg(long)]
    data: PathBuf,
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    #[arg(long, value_enum, default_value_t = StatsFormat::Text)]
    format: StatsFormat,
    /// Report file; default stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Flag values merged over the config file.
struct Resolved {
    data: Vec<PathBuf>,
    variants: Vec<Variant>,
    kernel: KernelKind,
    noise: Vec<f64>,
    seed: u64,
    grid: GridSpec,
    folds: usize,
    train_fraction: f64,
    normalize: bool,
    noise_on_test: bool,
    csv: CsvOptions,
    workers: Option<usize>,
    solver: SolverConfig,
    out: Option<PathBuf>,
    balls: Option<PathBuf>,
}

fn parse_variant(s: &str) -> Result<Variant> {
    Variant::parse(s).ok_or_else(|| anyhow!("unknown variant {s:?} (lstsvm, gblstsvm, lsgblstsvm)"))
}

fn parse_kernel(s: &str) -> Result<KernelKind> {
    match s.to_ascii_lowercase().as_str() {
        "linear" => Ok(KernelKind::Linear),
        "gaussian" | "rbf" => Ok(KernelKind::Gaussian),
        _ => bail!("unknown kernel {s:?} (linear, gaussian)"),
    }
}

fn pick<T: FromStr>(flag: Option<T>, cfg: &KvConfig, key: &str) -> Result<Option<T>>
where
    T::Err: std::error::Error + Send + Sync + 'static,
{
    match flag {
        Some(v) => Ok(Some(v)),
        None => cfg.get(key),
    }
}

fn pick_list<T: FromStr>(flag: Vec<T>, cfg: &KvConfig, key: &str) -> Result<Vec<T>>
where
    T::Err: std::error::Error + Send + Sync + 'static,
{
    if flag.is_empty() {
        cfg.get_list(key)
    } else {
        Ok(flag)
    }
}

fn resolve(a: RunArgs) -> Result<Resolved> {
    let cfg = match &a.config {
        Some(p) => KvConfig::load(p)?,
        None => KvConfig::default(),
    };
    let variants = pick_list(a.variant, &cfg, "variant")?;
    let variants = if variants.is_empty() {
        Variant::ALL.to_vec()
    } else {
        variants.iter().map(|s| parse_variant(s)).collect::<Result<_>>()?
    };
    let kernel = match pick::<String>(a.kernel, &cfg, "kernel")? {
        Some(s) => parse_kernel(&s)?,
        None => KernelKind::Linear,
    };
    let mut noise = pick_list(a.noise, &cfg, "noise")?;
    if noise.is_empty() {
        noise.push(0.0);
    }

    let d = HyperParams::default();
    let c1 = pick(a.c1, &cfg, "c1")?;
    let c2 = pick(a.c2, &cfg, "c2")?;
    let c3 = pick(a.c3, &cfg, "c3")?;
    let c4 = pick(a.c4, &cfg, "c4")?;
    let sigma = pick(a.sigma, &cfg, "sigma")?;
    let pur = pick(a.pur, &cfg, "pur")?;
    let num = pick(a.num, &cfg, "num")?;
    let any_fixed = [c1, c2, c3, c4, sigma, pur].iter().any(Option::is_some) || num.is_some();
    let hyper = HyperParams {
        c1: c1.unwrap_or(d.c1),
        c2: c2.or(c1).unwrap_or(d.c2),
        c3: c3.unwrap_or(d.c3),
        c4: c4.or(c3).unwrap_or(d.c4),
        sigma: sigma.unwrap_or(d.sigma),
        pur: pur.unwrap_or(d.pur),
        num: num.unwrap_or(d.num),
    };
    hyper.validate()?;
    let grid = match pick::<String>(a.grid, &cfg, "grid")?.as_deref() {
        Some("coarse") => GridSpec::coarse(),
        Some("full") => GridSpec::full(),
        Some("fixed") => GridSpec::single(hyper),
        Some(other) => bail!("unknown grid {other:?} (coarse, full, fixed)"),
        None if any_fixed => GridSpec::single(hyper),
        None => GridSpec::coarse(),
    };

    let mut solver = SolverConfig::default();
    if let Some(t) = pick(a.tolerance, &cfg, "tolerance")? {
        solver.tolerance = t;
    }
    solver.max_sweeps = pick(a.max_sweeps, &cfg, "max-sweeps")?;
    solver.validate()?;

    let positive = pick(a.positive_label, &cfg, "positive-label")?;
    let csv = CsvOptions {
        label_column: pick(a.label_column, &cfg, "label-column")?,
        label_map: positive.map_or(LabelMap::Auto, LabelMap::Positive),
    };
    let flag_or_cfg = |flag: bool, key: &str| -> Result<bool> { Ok(flag || cfg.get::<bool>(key)?.unwrap_or(false)) };

    Ok(Resolved {
        data: pick_list(a.data, &cfg, "data")?,
        variants,
        kernel,
        noise,
        seed: pick(a.seed, &cfg, "seed")?.unwrap_or(0),
        grid,
        folds: pick(a.folds, &cfg, "folds")?.unwrap_or(5),
        train_fraction: pick(a.train_fraction, &cfg, "train-fraction")?.unwrap_or(0.7),
        normalize: !flag_or_cfg(a.no_normalize, "no-normalize")?,
        noise_on_test: flag_or_cfg(a.noise_on_test, "noise-on-test")?,
        csv,
        workers: pick(a.workers, &cfg, "workers")?,
        solver,
        out: pick(a.out, &cfg, "out")?,
        balls: pick(a.balls, &cfg, "balls")?,
    })
}

fn dataset_name(p: &Path) -> String {
    p.file_stem()
        .map_or_else(|| p.display().to_string(), |s| s.to_string_lossy().into_owned())
}

fn gen_data(a: GenArgs) -> Result<()> {
    let d = match a.generator {
        Generator::Crossplane => gen_crossplane(a.n, a.jitter, a.seed)?,
        Generator::Ndc => gen_ndc(a.n, a.dim, a.separation, a.seed)?,
    };
    io::write_csv(&d, &a.out)?;
    log::info!("wrote {} rows to {}", d.len(), a.out.display());
    Ok(())
}

fn train(r: Resolved) -> Result<()> {
    let [path] = r.data.as_slice() else {
        bail!("train takes exactly one --data file");
    };
    let [variant] = r.variants.as_slice() else {
        bail!("train takes exactly one --variant");
    };
    let out = r
        .out
        .as_ref()
        .ok_or_else(|| anyhow!("train needs --out <model file>"))?;
    let data = io::load_csv(path, &r.csv)?;
    let (data, norm) = if r.normalize {
        let (d, p) = minmax_normalize(&data);
        (d, Some(p))
    } else {
        (data, None)
    };
    let points = r.grid.points(*variant, r.kernel)?;
    let hyper = if points.len() == 1 {
        points[0]
    } else {
        let best = parallel_grid_search(&data, &r.grid, r.folds, *variant, r.kernel, r.seed, &r.solver)?;
        log::info!("selected {:?} with cv accuracy {:.4}", best.hyper, best.score);
        best.hyper
    };
    let trained = train_pipeline(&data, &hyper, *variant, r.kernel, r.seed, &r.solver)?;
    if let Some(path) = &r.balls {
        let bs = if variant.uses_balls() {
            generate_balls(&data, hyper.pur, hyper.num, r.seed)?
        } else {
            BallSet::singletons(&data)
        };
        io::write_ballset(&bs, path)?;
    }
    if !trained.converged {
        log::warn!("dual solver stopped at its sweep limit before converging");
    }
    let acc = accuracy(&trained.predict(data.features())?, data.labels())?;
    println!(
        "variant={} kernel={} k={} train_accuracy={acc:.6}",
        variant.name(),
        r.kernel.name(),
        trained.n_balls
    );
    io::save_model(&ModelFile::new(trained, norm), out)?;
    Ok(())
}

fn predict(a: PredictArgs) -> Result<()> {
    let model = io::load_model(&a.model)?;
    let features = io::load_features(&a.data)?;
    let dim = model.trained.model.dim();
    let (x, truth) = if features.ncols() == dim {
        (features, None)
    } else if features.ncols() == dim + 1 {
        let opts = CsvOptions {
            label_column: a.label_column,
            label_map: a.positive_label.map_or(LabelMap::Auto, LabelMap::Positive),
        };
        let d = io::load_csv(&a.data, &opts)?;
        (d.features().clone(), Some(d.labels().to_vec()))
    } else {
        bail!(
            "{} has {} columns; the model expects {dim} features",
            a.data.display(),
            features.ncols()
        );
    };
    let pred = model.predict(&x)?;
    let mut text = String::with_capacity(pred.len() * 3);
    for p in &pred {
        text.push_str(&p.as_i8().to_string());
        text.push('\n');
    }
    match &a.out {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display()))?,
        None => print!("{text}"),
    }
    if let Some(t) = truth {
        eprintln!("accuracy={:.6}", accuracy(&pred, &t)?);
    }
    Ok(())
}

/// Returns whether at least one row was produced.
fn benchmark(r: Resolved) -> Result<bool> {
    let out = r.out.clone().unwrap_or_else(|| PathBuf::from("gbtwin-out"));
    if r.data.is_empty() {
        bail!("benchmark needs at least one --data file");
    }
    let mut datasets = Vec::new();
    for p in &r.data {
        match io::load_csv(p, &r.csv) {
            Ok(d) => datasets.push((dataset_name(p), d)),
            Err(e) => log::warn!("skipping {}: {e:#}", p.display()),
        }
    }
    if datasets.is_empty() {
        bail!("no dataset could be loaded");
    }
    let cfg = BenchConfig {
        datasets,
        variants: r.variants,
        kernel: r.kernel,
        noise: r.noise,
        seed: r.seed,
        grid: r.grid,
        folds: r.folds,
        train_fraction: r.train_fraction,
        normalize: r.normalize,
        noise_on_test: r.noise_on_test,
        solver: r.solver,
        workers: r.workers,
    };
    let report = run_benchmark(&cfg)?;
    fs::create_dir_all(&out).with_context(|| format!("creating {}", out.display()))?;
    write_results(&report.rows, &out.join("results.csv"))?;
    io::write_accuracy_table(&report.table, &out.join("accuracy.csv"))?;
    let mut ok = true;
    if report.table.n_models() >= 2 && report.table.n_datasets() >= 2 {
        let stats = run_stats(&report.table, 0.05)?;
        fs::write(out.join("stats.txt"), stats.render_text())?;
        if let Err(e) = &stats.friedman {
            log::warn!("friedman: {e}");
            ok = false;
        }
    }
    for r in &report.rows {
        println!(
            "{} noise={} {} accuracy={:.4} k={} fit_ms={:.2}",
            r.dataset,
            r.noise,
            r.variant.name(),
            r.accuracy,
            r.k,
            r.fit_ms
        );
    }
    println!("wrote {}", out.display());
    Ok(ok && !report.rows.is_empty())
}

fn stats(a: StatsArgs) -> Result<bool> {
    let table = io::read_accuracy_table(&a.data)?;
    let report = run_stats(&table, a.alpha)?;
    let text = match a.format {
        StatsFormat::Text => report.render_text(),
        StatsFormat::Kv => report.render_kv(),
    };
    match &a.out {
        Some(p) => fs::write(p, &text).with_context(|| format!("writing {}", p.display()))?,
        None => print!("{text}"),
    }
    Ok(report.ok())
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::GenData(a) => gen_data(a).map(|_| true),
        Command::Train(a) => train(resolve(a)?).map(|_| true),
        Command::Predict(a) => predict(a).map(|_| true),
        Command::Benchmark(a) => benchmark(resolve(a)?),
        Command::Stats(a) => stats(a),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
