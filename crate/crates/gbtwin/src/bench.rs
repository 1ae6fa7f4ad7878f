//! The dataset × noise × variant benchmark.
//!
//! Per cell: scale features to `[0, 1]`, split 70/30, corrupt training
//! labels, pick hyperparameters by k-fold grid search on the training
//! part, refit on the whole training part and score the test part.

use std::path::Path;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use gbtwin_core::dataset::{inject_label_noise, minmax_normalize, train_test_split};
use gbtwin_core::eval::{accuracy, cv_score, kfold_indices, pick_best, point_seed, GridResult};
use gbtwin_core::models::train_pipeline;
use gbtwin_core::{
    derive_seed, AccuracyTable, Dataset, GridSpec, HyperParams, KernelKind, Matrix, SolverConfig, Variant,
};
use rayon::prelude::*;

#[derive(Debug, Clone)]
pub struct BenchConfig {
    /// `(name, data)` pairs.
    pub datasets: Vec<(String, Dataset)>,
    pub variants: Vec<Variant>,
    pub kernel: KernelKind,
    pub noise: Vec<f64>,
    pub seed: u64,
    pub grid: GridSpec,
    pub folds: usize,
    pub train_fraction: f64,
    pub normalize: bool,
    /// Corrupt the test labels too.
    pub noise_on_test: bool,
    pub solver: SolverConfig,
    /// Thread cap; `None` uses rayon's default.
    pub workers: Option<usize>,
}

impl BenchConfig {
    pub fn new(datasets: Vec<(String, Dataset)>) -> Self {
        BenchConfig {
            datasets,
            variants: Variant::ALL.to_vec(),
            kernel: KernelKind::Linear,
            noise: vec![0.0],
            seed: 0,
            grid: GridSpec::coarse(),
            folds: 5,
            train_fraction: 0.7,
            normalize: true,
            noise_on_test: false,
            solver: SolverConfig::default(),
            workers: None,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.datasets.is_empty() {
            bail!("no datasets given");
        }
        if self.variants.is_empty() {
            bail!("no model variants given");
        }
        if self.noise.is_empty() {
            bail!("no noise levels given");
        }
        if let Some(r) = self.noise.iter().find(|r| !(0.0..=0.5).contains(*r)) {
            bail!("noise level {r} outside [0, 0.5]");
        }
        self.solver.validate()?;
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub dataset: String,
    pub noise: f64,
    pub variant: Variant,
    pub kernel: KernelKind,
    pub accuracy: f64,
    pub cv_accuracy: f64,
    /// Points the planes were fitted to (balls, or samples for LSTSVM).
    pub k: usize,
    pub m_train: usize,
    /// Wall-clock time of the final fit, granulation included.
    pub fit_ms: f64,
    pub converged: bool,
    pub hyper: HyperParams,
}

#[derive(Debug, Clone)]
pub struct BenchReport {
    pub rows: Vec<ResultRow>,
    /// Test accuracy per (dataset, noise) row and variant column. Rows with
    /// any failed cell are left out.
    pub table: AccuracyTable,
    /// `(cell description, error)` for every failed cell.
    pub failures: Vec<(String, String)>,
}

/// Grid search with the points scored in parallel. Same result as the
/// sequential core version.
pub fn parallel_grid_search(
    data: &Dataset,
    grid: &GridSpec,
    k: usize,
    variant: Variant,
    kind: KernelKind,
    seed: u64,
    cfg: &SolverConfig,
) -> gbtwin_core::Result<GridResult> {
    let folds = kfold_indices(data.len(), k, seed)?;
    let points = grid.points(variant, kind)?;
    let scores: Vec<_> = points
        .par_iter()
        .enumerate()
        .map(|(i, hp)| cv_score(data, &folds, hp, variant, kind, point_seed(seed, i), cfg))
        .collect();
    pick_best(&points, &scores)
}

struct Cell {
    dataset: usize,
    noise: usize,
    variant: Variant,
}

fn prepare(cfg: &BenchConfig, ds: usize, noise: usize) -> Result<(Dataset, Dataset, u64)> {
    let data = &cfg.datasets[ds].1;
    let data = if cfg.normalize {
        minmax_normalize(data).0
    } else {
        data.clone()
    };
    let ds_seed = derive_seed(cfg.seed, ds as u64);
    let (train, test) = train_test_split(&data, cfg.train_fraction, ds_seed)?;
    let noise_seed = derive_seed(ds_seed, 1 + noise as u64);
    let rate = cfg.noise[noise];
    let train = inject_label_noise(&train, rate, noise_seed)?;
    let test = if cfg.noise_on_test {
        inject_label_noise(&test, rate, derive_seed(noise_seed, 1))?
    } else {
        test
    };
    Ok((train, test, derive_seed(ds_seed, 1000 + noise as u64)))
}

fn run_cell(cfg: &BenchConfig, cell: &Cell) -> Result<ResultRow> {
    let (train, test, seed) = prepare(cfg, cell.dataset, cell.noise)?;
    let best = parallel_grid_search(
        &train,
        &cfg.grid,
        cfg.folds,
        cell.variant,
        cfg.kernel,
        seed,
        &cfg.solver,
    )
    .context("grid search")?;
    let start = Instant::now();
    let model =
        train_pipeline(&train, &best.hyper, cell.variant, cfg.kernel, seed, &cfg.solver).context("final fit")?;
    let fit_ms = start.elapsed().as_secs_f64() * 1e3;
    let acc = accuracy(&model.predict(test.features())?, test.labels())?;
    Ok(ResultRow {
        dataset: cfg.datasets[cell.dataset].0.clone(),
        noise: cfg.noise[cell.noise],
        variant: cell.variant,
        kernel: cfg.kernel,
        accuracy: acc,
        cv_accuracy: best.score,
        k: model.n_balls,
        m_train: train.len(),
        fit_ms,
        converged: model.converged,
        hyper: best.hyper,
    })
}

fn row_name(cfg: &BenchConfig, ds: usize, noise: usize) -> String {
    if cfg.noise.len() == 1 {
        cfg.datasets[ds].0.clone()
    } else {
        format!("{}@{}", cfg.datasets[ds].0, cfg.noise[noise])
    }
}

pub fn run_benchmark(cfg: &BenchConfig) -> Result<BenchReport> {
    cfg.validate()?;
    let cells: Vec<Cell> = (0..cfg.datasets.len())
        .flat_map(|dataset| {
            (0..cfg.noise.len()).flat_map(move |noise| {
                cfg.variants.iter().map(move |&variant| Cell {
                    dataset,
                    noise,
                    variant,
                })
            })
        })
        .collect();

    let run_all = || -> Vec<Result<ResultRow>> { cells.par_iter().map(|c| run_cell(cfg, c)).collect() };
    let outcomes = match cfg.workers {
        Some(n) => rayon::ThreadPoolBuilder::new().num_threads(n).build()?.install(run_all),
        None => run_all(),
    };

    let mut rows = Vec::new();
    let mut failures = Vec::new();
    let mut table_rows: Vec<(String, Vec<f64>)> = Vec::new();
    let per_row = cfg.variants.len();
    for (chunk_cells, chunk) in cells.chunks(per_row).zip(outcomes.chunks(per_row)) {
        let (ds, noise) = (chunk_cells[0].dataset, chunk_cells[0].noise);
        let mut accs = Vec::with_capacity(per_row);
        for (cell, outcome) in chunk_cells.iter().zip(chunk) {
            match outcome {
                Ok(r) => {
                    accs.push(r.accuracy);
                    rows.push(r.clone());
                }
                Err(e) => {
                    let what = format!(
                        "{} noise={} variant={}",
                        cfg.datasets[ds].0,
                        cfg.noise[noise],
                        cell.variant.name()
                    );
                    log::warn!("{what}: {e:#}");
                    failures.push((what, format!("{e:#}")));
                }
            }
        }
        if accs.len() == per_row {
            table_rows.push((row_name(cfg, ds, noise), accs));
        }
    }
    if rows.is_empty() {
        bail!("every benchmark cell failed; first error: {}", failures[0].1);
    }
    if table_rows.is_empty() {
        bail!("no dataset completed for every variant");
    }
    let models = cfg.variants.iter().map(|v| v.name().to_string()).collect();
    let (names, values): (Vec<String>, Vec<Vec<f64>>) = table_rows.into_iter().unzip();
    let table = AccuracyTable::new(models, names, Matrix::from_rows(&values)?)?;
    Ok(BenchReport { rows, table, failures })
}

pub const RESULTS_HEADER: [&str; 17] = [
    "dataset",
    "noise",
    "variant",
    "kernel",
    "accuracy",
    "cv_accuracy",
    "k",
    "m_train",
    "fit_ms",
    "converged",
    "c1",
    "c2",
    "c3",
    "c4",
    "sigma",
    "pur",
    "num",
];

pub fn write_results(rows: &[ResultRow], path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path).with_context(|| format!("creating {}", path.display()))?;
    w.write_record(RESULTS_HEADER)?;
    for r in rows {
        let h = &r.hyper;
        w.write_record([
            r.dataset.clone(),
            r.noise.to_string(),
            r.variant.name().to_string(),
            r.kernel.name().to_string(),
            format!("{:.6}", r.accuracy),
            format!("{:.6}", r.cv_accuracy),
            r.k.to_string(),
            r.m_train.to_string(),
            format!("{:.3}", r.fit_ms),
            r.converged.to_string(),
            h.c1.to_string(),
            h.c2.to_string(),
            h.c3.to_string(),
            h.c4.to_string(),
            h.sigma.to_string(),
            h.pur.to_string(),
            h.num.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use gbtwin_core::dataset::{gen_crossplane, gen_ndc};
    use gbtwin_core::eval::kfold_grid_search;

    #[test]
    fn parallel_search_matches_sequential() {
        let d = gen_ndc(80, 3, 3.0, 4).unwrap();
        let cfg = SolverConfig::default();
        let grid = GridSpec::coarse();
        for v in Variant::ALL {
            let seq = kfold_grid_search(&d, &grid, 4, v, KernelKind::Linear, 9, &cfg).unwrap();
            let par = parallel_grid_search(&d, &grid, 4, v, KernelKind::Linear, 9, &cfg).unwrap();
            assert_eq!(seq, par);
        }
    }

    #[test]
    fn shape_and_determinism() {
        let mut cfg = BenchConfig::new(vec![
            ("cross".into(), gen_crossplane(60, 0.01, 1).unwrap()),
            ("ndc".into(), gen_ndc(80, 4, 4.0, 2).unwrap()),
        ]);
        cfg.variants = vec![Variant::Lstsvm, Variant::Gblstsvm];
        cfg.noise = vec![0.0, 0.2];
        cfg.seed = 3;
        let a = run_benchmark(&cfg).unwrap();
        assert_eq!(a.rows.len(), 8);
        for r in &a.rows {
            assert!((0.0..=1.0).contains(&r.accuracy));
            assert!(r.k <= r.m_train);
            assert!(r.fit_ms > 0.0);
        }
        assert_eq!(a.table.n_datasets(), 4);
        let b = run_benchmark(&cfg).unwrap();
        assert_eq!(a.table, b.table);
    }

    #[test]
    fn rejects_bad_noise() {
        let mut cfg = BenchConfig::new(vec![("c".into(), gen_crossplane(20, 0.0, 1).unwrap())]);
        cfg.noise = vec![0.7];
        assert!(run_benchmark(&cfg).is_err());
    }
}
