//! Accuracy, cross-validated grid search and multi-dataset comparison statistics.

mod grid;
mod stats;

pub use grid::{cv_score, kfold_grid_search, kfold_indices, pick_best, point_seed, GridResult, GridSpec};
pub use stats::{
    average_ranks, friedman, rank_rows, wilcoxon_signed_rank, win_tie_loss, win_tie_threshold, AccuracyTable, Friedman,
    Wilcoxon, WinTieLoss,
};

use crate::dataset::Label;
use crate::error::{Error, Result};

/// Trainer constants. Each variant reads only the fields it needs:
/// LSTSVM `c1, c2`; GBLSTSVM adds `pur, num`; LS-GBLSTSVM adds `c3, c4`;
/// `sigma` only matters for the Gaussian kernel.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct HyperParams {
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    pub c4: f64,
    pub sigma: f64,
    pub pur: f64,
    pub num: usize,
}

impl Default for HyperParams {
    fn default() -> Self {
        HyperParams {
            c1: 1.0,
            c2: 1.0,
            c3: 1.0,
            c4: 1.0,
            sigma: 1.0,
            pur: 0.95,
            num: 2,
        }
    }
}

impl HyperParams {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("c1", self.c1),
            ("c2", self.c2),
            ("c3", self.c3),
            ("c4", self.c4),
            ("sigma", self.sigma),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::param(name, "must be positive and finite"));
            }
        }
        if !(self.pur > 0.5 && self.pur <= 1.0) {
            return Err(Error::param("pur", "purity threshold must lie in (0.5, 1]"));
        }
        if self.num < 2 {
            return Err(Error::param("num", "minimum ball count must be at least 2"));
        }
        Ok(())
    }

    /// Sets `c2 = c1` and `c4 = c3`.
    pub fn tied(mut self) -> Self {
        self.c2 = self.c1;
        self.c4 = self.c3;
        self
    }
}

/// Fraction of positions where `predicted` equals `actual`.
pub fn accuracy(predicted: &[Label], actual: &[Label]) -> Result<f64> {
    if predicted.len() != actual.len() {
        return Err(Error::DimensionMismatch {
            expected: actual.len(),
            found: predicted.len(),
        });
    }
    if actual.is_empty() {
        return Err(Error::Empty("label vector"));
    }
    let hits = predicted.iter().zip(actual).filter(|(p, a)| p == a).count();
    Ok(hits as f64 / actual.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use Label::{Neg, Pos};

    #[test]
    fn accuracy_examples() {
        assert_eq!(accuracy(&[Pos, Neg], &[Pos, Neg]).unwrap(), 1.0);
        assert_eq!(accuracy(&[Pos, Pos], &[Neg, Neg]).unwrap(), 0.0);
        assert_eq!(accuracy(&[Pos, Neg, Pos], &[Pos, Pos, Pos]).unwrap(), 2.0 / 3.0);
        assert!(accuracy(&[Pos], &[Pos, Neg]).is_err());
        assert!(accuracy(&[], &[]).is_err());
    }

    #[test]
    fn hyperparam_validation() {
        assert!(HyperParams::default().validate().is_ok());
        let bad = [
            HyperParams {
                c3: 0.0,
                ..Default::default()
            },
            HyperParams {
                sigma: f64::INFINITY,
                ..Default::default()
            },
            HyperParams {
                pur: 0.5,
                ..Default::default()
            },
            HyperParams {
                pur: 1.01,
                ..Default::default()
            },
            HyperParams {
                num: 1,
                ..Default::default()
            },
        ];
        for hp in bad {
            assert!(hp.validate().is_err(), "{hp:?}");
        }
        let t = HyperParams {
            c1: 3.0,
            c2: 5.0,
            c3: 7.0,
            c4: 9.0,
            ..Default::default()
        }
        .tied();
        assert_eq!((t.c2, t.c4), (3.0, 7.0));
    }
}
