use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::math;

/// Accuracies closer than this count as equal when ranking and comparing.
pub const TIE_TOLERANCE: f64 = 1e-12;

/// Test accuracies of `l` models on `M` datasets, one row per dataset.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct AccuracyTable {
    models: Vec<String>,
    datasets: Vec<String>,
    acc: Matrix,
}

impl AccuracyTable {
    pub fn new(models: Vec<String>, datasets: Vec<String>, acc: Matrix) -> Result<AccuracyTable> {
        if models.is_empty() || datasets.is_empty() {
            return Err(Error::Empty("accuracy table"));
        }
        if acc.ncols() != models.len() {
            return Err(Error::DimensionMismatch {
                expected: models.len(),
                found: acc.ncols(),
            });
        }
        if acc.nrows() != datasets.len() {
            return Err(Error::DimensionMismatch {
                expected: datasets.len(),
                found: acc.nrows(),
            });
        }
        if acc.as_slice().iter().any(|a| !(0.0..=1.0).contains(a)) {
            return Err(Error::InvalidDataset("accuracies must lie in [0, 1]".into()));
        }
        Ok(AccuracyTable { models, datasets, acc })
    }

    pub fn models(&self) -> &[String] {
        &self.models
    }

    pub fn datasets(&self) -> &[String] {
        &self.datasets
    }

    /// `M × l` accuracy matrix.
    pub fn acc(&self) -> &Matrix {
        &self.acc
    }

    pub fn n_models(&self) -> usize {
        self.models.len()
    }

    pub fn n_datasets(&self) -> usize {
        self.datasets.len()
    }

    pub fn model_index(&self, name: &str) -> Option<usize> {
        self.models.iter().position(|m| m == name)
    }

    /// Accuracies of model `j` across all datasets.
    pub fn column(&self, j: usize) -> Vec<f64> {
        self.acc.rows().map(|r| r[j]).collect()
    }
}

/// Midranks of `values`, largest first: rank 1 is the best, and tied values
/// share the mean of the positions they occupy.
fn midranks_desc(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[b].total_cmp(&values[a]));
    midranks_in_order(values, &order)
}

fn midranks_in_order(values: &[f64], order: &[usize]) -> Vec<f64> {
    let mut ranks = alloc::vec![0.0; values.len()];
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && (values[order[end]] - values[order[start]]).abs() <= TIE_TOLERANCE {
            end += 1;
        }
        // positions start+1 ..= end
        let mid = (start + 1 + end) as f64 / 2.0;
        for &i in &order[start..end] {
            ranks[i] = mid;
        }
        start = end;
    }
    ranks
}

/// Per-dataset ranks of every model (`M × l`).
pub fn rank_rows(acc: &Matrix) -> Matrix {
    let mut out = Matrix::zeros(acc.nrows(), acc.ncols());
    for (i, row) in acc.rows().enumerate() {
        out.row_mut(i).copy_from_slice(&midranks_desc(row));
    }
    out
}

/// Mean rank of each model over the datasets.
pub fn average_ranks(t: &AccuracyTable) -> Vec<f64> {
    let ranks = rank_rows(t.acc());
    let m = t.n_datasets() as f64;
    (0..t.n_models())
        .map(|j| ranks.rows().map(|r| r[j]).sum::<f64>() / m)
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Friedman {
    pub chi2: f64,
    pub ff: f64,
    /// Degrees of freedom of `ff`: `(l − 1, (l − 1)(M − 1))`.
    pub df: (f64, f64),
    pub critical: f64,
    pub reject: bool,
}

/// Friedman χ² and the Iman–Davenport F statistic from average ranks over
/// `m` datasets. `reject` is `ff > critical`.
pub fn friedman(avg_ranks: &[f64], m: usize, critical: f64) -> Result<Friedman> {
    let l = avg_ranks.len();
    if l < 2 {
        return Err(Error::param("ranks", "need at least two models"));
    }
    if m < 2 {
        return Err(Error::param("m", "need at least two datasets"));
    }
    let (lf, mf) = (l as f64, m as f64);
    let sum_sq: f64 = avg_ranks.iter().map(|r| r * r).sum();
    let chi2 = 12.0 * mf / (lf * (lf + 1.0)) * (sum_sq - lf * (lf + 1.0) * (lf + 1.0) / 4.0);
    let denom = mf * (lf - 1.0) - chi2;
    if denom.abs() <= 1e-12 * mf * (lf - 1.0) {
        return Err(Error::DegenerateFriedman { chi2 });
    }
    let ff = (mf - 1.0) * chi2 / denom;
    Ok(Friedman {
        chi2,
        ff,
        df: (lf - 1.0, (lf - 1.0) * (mf - 1.0)),
        critical,
        reject: ff > critical,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Wilcoxon {
    /// Rank sum of the pairs where `b` beats `a`.
    pub r_plus: f64,
    pub r_minus: f64,
    /// Number of non-zero differences.
    pub n: usize,
    pub z: f64,
    /// Two-sided, normal approximation with tie correction.
    pub p: f64,
}

/// Signed-rank test on the differences `b − a`.
pub fn wilcoxon_signed_rank(a: &[f64], b: &[f64]) -> Result<Wilcoxon> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch {
            expected: a.len(),
            found: b.len(),
        });
    }
    let diffs: Vec<f64> = a
        .iter()
        .zip(b)
        .map(|(x, y)| y - x)
        .filter(|d| d.abs() > TIE_TOLERANCE)
        .collect();
    let n = diffs.len();
    if n == 0 {
        return Ok(Wilcoxon {
            r_plus: 0.0,
            r_minus: 0.0,
            n: 0,
            z: 0.0,
            p: 1.0,
        });
    }
    let abs: Vec<f64> = diffs.iter().map(|d| d.abs()).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| abs[i].total_cmp(&abs[j]));
    let ranks = midranks_in_order(&abs, &order);

    let (mut r_plus, mut r_minus) = (0.0, 0.0);
    for (d, r) in diffs.iter().zip(&ranks) {
        if *d > 0.0 {
            r_plus += r;
        } else {
            r_minus += r;
        }
    }

    // tie correction: every group of t equal |d| removes (t³ − t)/48
    let mut tie_term = 0.0;
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && ranks[order[end]] == ranks[order[start]] {
            end += 1;
        }
        let t = (end - start) as f64;
        tie_term += (t * t * t - t) / 48.0;
        start = end;
    }
    let nf = n as f64;
    let var = nf * (nf + 1.0) * (2.0 * nf + 1.0) / 24.0 - tie_term;
    let (z, p) = if var > 0.0 {
        let z = (r_plus - nf * (nf + 1.0) / 4.0) / math::sqrt(var);
        (z, math::erfc(z.abs() / core::f64::consts::SQRT_2).min(1.0))
    } else {
        (0.0, 1.0)
    };
    Ok(Wilcoxon {
        r_plus,
        r_minus,
        n,
        z,
        p,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WinTieLoss {
    pub wins: usize,
    pub ties: usize,
    pub losses: usize,
    /// Wins plus half the ties (one tie dropped when odd).
    pub adj_wins: usize,
    pub adj_losses: usize,
}

impl WinTieLoss {
    /// Whether the adjusted wins reach the sign-test threshold for `wins + ties + losses` datasets.
    pub fn significant(&self) -> bool {
        self.adj_wins as f64 >= win_tie_threshold(self.wins + self.ties + self.losses)
    }
}

/// `M/2 + 1.96·√M/2`: wins needed for significance at 5% over `M` datasets.
pub fn win_tie_threshold(m: usize) -> f64 {
    let m = m as f64;
    m / 2.0 + 1.96 * math::sqrt(m) / 2.0
}

/// Counts datasets where `a` beats, ties or loses to `b`.
pub fn win_tie_loss(a: &[f64], b: &[f64]) -> Result<WinTieLoss> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch {
            expected: a.len(),
            found: b.len(),
        });
    }
    let (mut wins, mut ties, mut losses) = (0, 0, 0);
    for (x, y) in a.iter().zip(b) {
        if (x - y).abs() <= TIE_TOLERANCE {
            ties += 1;
        } else if x > y {
            wins += 1;
        } else {
            losses += 1;
        }
    }
    let half = ties / 2;
    Ok(WinTieLoss {
        wins,
        ties,
        losses,
        adj_wins: wins + half,
        adj_losses: losses + half,
    })
}
