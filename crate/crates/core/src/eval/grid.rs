use alloc::vec;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{accuracy, HyperParams};
use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::kernel::KernelKind;
use crate::math;
use crate::models::{train_pipeline, Variant};
use crate::solver::SolverConfig;

/// Candidate values per hyperparameter. `c12` feeds `c1`/`c2`, `c34`
/// feeds `c3`/`c4`; with `tied` set each pair moves together.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GridSpec {
    pub c12: Vec<f64>,
    pub c34: Vec<f64>,
    pub sigma: Vec<f64>,
    pub pur: Vec<f64>,
    pub num: Vec<usize>,
    pub tied: bool,
}

fn powers(base: f64, lo: i32, hi: i32) -> Vec<f64> {
    (lo..=hi).map(|e| math::powi(base, e)).collect()
}

impl GridSpec {
    /// `c ∈ {10⁻⁵ … 10⁵}`, `σ ∈ {2⁻⁵ … 2⁵}`, `pur ∈ {0.925 … 0.985}`, `num ∈ {2, 3, 4}`.
    pub fn full() -> GridSpec {
        GridSpec {
            c12: powers(10.0, -5, 5),
            c34: powers(10.0, -5, 5),
            sigma: powers(2.0, -5, 5),
            pur: vec![0.925, 0.94, 0.955, 0.97, 0.985],
            num: vec![2, 3, 4],
            tied: true,
        }
    }

    /// A small grid for quick runs.
    pub fn coarse() -> GridSpec {
        GridSpec {
            c12: vec![1e-2, 1.0, 1e2],
            c34: vec![1e-2, 1.0, 1e2],
            sigma: vec![0.25, 1.0, 4.0],
            pur: vec![0.94, 0.97],
            num: vec![2],
            tied: true,
        }
    }

    /// A grid containing `hp`: exactly one point when `hp` is tied,
    /// otherwise the four `c` pairings of its values.
    pub fn single(hp: HyperParams) -> GridSpec {
        let tied = hp.c1 == hp.c2 && hp.c3 == hp.c4;
        GridSpec {
            c12: if tied { vec![hp.c1] } else { vec![hp.c1, hp.c2] },
            c34: if tied { vec![hp.c3] } else { vec![hp.c3, hp.c4] },
            sigma: vec![hp.sigma],
            pur: vec![hp.pur],
            num: vec![hp.num],
            tied,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.c12.is_empty()
            || self.c34.is_empty()
            || self.sigma.is_empty()
            || self.pur.is_empty()
            || self.num.is_empty()
        {
            return Err(Error::Empty("hyperparameter grid axis"));
        }
        Ok(())
    }

    /// Enumerates the grid in a fixed order. Axes the variant or kernel
    /// ignore collapse to their first value.
    pub fn points(&self, variant: Variant, kind: KernelKind) -> Result<Vec<HyperParams>> {
        self.validate()?;
        let first = |v: &[f64]| vec![v[0]];
        let c34 = if variant == Variant::Lsgblstsvm {
            self.c34.clone()
        } else {
            first(&self.c34)
        };
        let sigma = if kind == KernelKind::Gaussian {
            self.sigma.clone()
        } else {
            first(&self.sigma)
        };
        let (pur, num) = if variant.uses_balls() {
            (self.pur.clone(), self.num.clone())
        } else {
            (first(&self.pur), vec![self.num[0]])
        };
        let pairs = |v: &[f64]| -> Vec<(f64, f64)> {
            if self.tied {
                v.iter().map(|&c| (c, c)).collect()
            } else {
                v.iter().flat_map(|&a| v.iter().map(move |&b| (a, b))).collect()
            }
        };
        let c12 = pairs(&self.c12);
        let c34 = pairs(&c34);

        let mut out = Vec::with_capacity(c12.len() * c34.len() * sigma.len() * pur.len() * num.len());
        for &(c1, c2) in &c12 {
            for &(c3, c4) in &c34 {
                for &sigma in &sigma {
                    for &pur in &pur {
                        for &num in &num {
                            out.push(HyperParams {
                                c1,
                                c2,
                                c3,
                                c4,
                                sigma,
                                pur,
                                num,
                            });
                        }
                    }
                }
            }
        }
        Ok(out)
    }
}

/// Seed used for grid point `index`, so points can be scored in any order.
pub fn point_seed(seed: u64, index: usize) -> u64 {
    math::mix_seed(seed, index as u64)
}

/// Shuffled `k`-fold partition of `0..m`; returns each fold's sorted test indices.
pub fn kfold_indices(m: usize, k: usize, seed: u64) -> Result<Vec<Vec<usize>>> {
    if k < 2 {
        return Err(Error::param("k", "need at least two folds"));
    }
    if m < k {
        return Err(Error::param("k", "more folds than samples"));
    }
    let mut idx: Vec<usize> = (0..m).collect();
    idx.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let mut folds = vec![Vec::with_capacity(m / k + 1); k];
    for (pos, i) in idx.into_iter().enumerate() {
        folds[pos % k].push(i);
    }
    for f in &mut folds {
        f.sort_unstable();
    }
    Ok(folds)
}

/// Mean held-out accuracy over `folds`. Folds whose training side lacks a
/// class are skipped.
pub fn cv_score(
    data: &Dataset,
    folds: &[Vec<usize>],
    hp: &HyperParams,
    variant: Variant,
    kind: KernelKind,
    seed: u64,
    cfg: &SolverConfig,
) -> Result<f64> {
    let mut in_test = vec![false; data.len()];
    let mut total = 0.0;
    let mut used = 0usize;
    for (f, test_idx) in folds.iter().enumerate() {
        if test_idx.is_empty() {
            continue;
        }
        in_test.iter_mut().for_each(|t| *t = false);
        for &i in test_idx {
            in_test[i] = true;
        }
        let train_idx: Vec<usize> = (0..data.len()).filter(|&i| !in_test[i]).collect();
        let train = data.subset(&train_idx);
        if !train.has_both_classes() {
            continue;
        }
        let model = match train_pipeline(&train, hp, variant, kind, math::mix_seed(seed, f as u64), cfg) {
            Ok(m) => m,
            Err(Error::SingleClass | Error::MissingClass(_)) => continue,
            Err(e) => return Err(e),
        };
        let test = data.subset(test_idx);
        total += accuracy(&model.predict(test.features())?, test.labels())?;
        used += 1;
    }
    if used == 0 {
        return Err(Error::AllFoldsFailed);
    }
    Ok(total / used as f64)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridResult {
    pub hyper: HyperParams,
    pub score: f64,
    /// Position of `hyper` in [`GridSpec::points`] order.
    pub index: usize,
    pub n_points: usize,
}

/// Highest score wins; ties go to the earliest point. Failed points are
/// ignored unless every point failed, in which case the first error is returned.
pub fn pick_best(points: &[HyperParams], scores: &[Result<f64>]) -> Result<GridResult> {
    if points.len() != scores.len() {
        return Err(Error::DimensionMismatch {
            expected: points.len(),
            found: scores.len(),
        });
    }
    let mut best: Option<(usize, f64)> = None;
    for (i, s) in scores.iter().enumerate() {
        if let Ok(s) = *s {
            if best.is_none_or(|(_, b)| s > b) {
                best = Some((i, s));
            }
        }
    }
    match best {
        Some((index, score)) => Ok(GridResult {
            hyper: points[index],
            score,
            index,
            n_points: points.len(),
        }),
        None => Err(scores
            .iter()
            .find_map(|s| s.clone().err())
            .unwrap_or(Error::Empty("hyperparameter grid"))),
    }
}

/// Exhaustive `k`-fold grid search. Every point sees the same folds.
pub fn kfold_grid_search(
    data: &Dataset,
    grid: &GridSpec,
    k: usize,
    variant: Variant,
    kind: KernelKind,
    seed: u64,
    cfg: &SolverConfig,
) -> Result<GridResult> {
    let folds = kfold_indices(data.len(), k, seed)?;
    let points = grid.points(variant, kind)?;
    let scores: Vec<Result<f64>> = points
        .iter()
        .enumerate()
        .map(|(i, hp)| cv_score(data, &folds, hp, variant, kind, point_seed(seed, i), cfg))
        .collect();
    pick_best(&points, &scores)
}
