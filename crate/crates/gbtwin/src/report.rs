//! Significance tests over an accuracy table.

use std::fmt::Write;

use anyhow::{bail, Result};
use gbtwin_core::eval::{
    average_ranks, friedman, wilcoxon_signed_rank, win_tie_loss, win_tie_threshold, Friedman, Wilcoxon, WinTieLoss,
};
use gbtwin_core::AccuracyTable;
use statrs::distribution::{ContinuousCDF, FisherSnedecor};

/// `challenger` (the later column) against `baseline`.
#[derive(Debug, Clone, PartialEq)]
pub struct PairReport {
    pub baseline: String,
    pub challenger: String,
    /// Signed-rank test on `challenger − baseline`.
    pub wilcoxon: Wilcoxon,
    /// Challenger wins, ties and losses.
    pub wtl: WinTieLoss,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StatsReport {
    pub models: Vec<String>,
    pub n_datasets: usize,
    pub avg_ranks: Vec<f64>,
    pub friedman: Result<Friedman, String>,
    pub win_tie_threshold: f64,
    pub pairs: Vec<PairReport>,
}

impl StatsReport {
    pub fn ok(&self) -> bool {
        self.friedman.is_ok()
    }

    pub fn render_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "datasets: {}", self.n_datasets);
        let _ = writeln!(s, "average ranks:");
        for (m, r) in self.models.iter().zip(&self.avg_ranks) {
            let _ = writeln!(s, "  {m:<14} {r:.4}");
        }
        match &self.friedman {
            Ok(f) => {
                let _ = writeln!(
                    s,
                    "friedman: chi2 = {:.4}, F_F = {:.4}, df = ({}, {}), critical = {:.4}, {}",
                    f.chi2,
                    f.ff,
                    f.df.0,
                    f.df.1,
                    f.critical,
                    if f.reject {
                        "reject equal performance"
                    } else {
                        "no significant difference"
                    }
                );
            }
            Err(e) => {
                let _ = writeln!(s, "friedman: {e}");
            }
        }
        let _ = writeln!(s, "win-tie-loss threshold: {:.3}", self.win_tie_threshold);
        for p in &self.pairs {
            let _ = writeln!(
                s,
                "{} vs {}: R+ = {}, R- = {}, z = {:.4}, p = {:.4e}; W-T-L = {}-{}-{}{}",
                p.challenger,
                p.baseline,
                p.wilcoxon.r_plus,
                p.wilcoxon.r_minus,
                p.wilcoxon.z,
                p.wilcoxon.p,
                p.wtl.wins,
                p.wtl.ties,
                p.wtl.losses,
                if p.wtl.significant() { " (significant)" } else { "" }
            );
        }
        s
    }

    /// One `key=value` per line.
    pub fn render_kv(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "datasets={}", self.n_datasets);
        for (m, r) in self.models.iter().zip(&self.avg_ranks) {
            let _ = writeln!(s, "rank.{m}={r}");
        }
        match &self.friedman {
            Ok(f) => {
                let _ = writeln!(s, "friedman.chi2={}", f.chi2);
                let _ = writeln!(s, "friedman.ff={}", f.ff);
                let _ = writeln!(s, "friedman.critical={}", f.critical);
                let _ = writeln!(s, "friedman.reject={}", f.reject);
            }
            Err(e) => {
                let _ = writeln!(s, "friedman.error={e}");
            }
        }
        let _ = writeln!(s, "wtl.threshold={}", self.win_tie_threshold);
        for p in &self.pairs {
            let key = format!("{}.vs.{}", p.challenger, p.baseline);
            let _ = writeln!(s, "wilcoxon.{key}.r_plus={}", p.wilcoxon.r_plus);
            let _ = writeln!(s, "wilcoxon.{key}.r_minus={}", p.wilcoxon.r_minus);
            let _ = writeln!(s, "wilcoxon.{key}.p={}", p.wilcoxon.p);
            let _ = writeln!(s, "wtl.{key}={}-{}-{}", p.wtl.wins, p.wtl.ties, p.wtl.losses);
        }
        s
    }
}

/// Upper `alpha` quantile of `F(d1, d2)`.
pub fn f_critical(alpha: f64, d1: f64, d2: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 1.0) {
        bail!("alpha must lie in (0, 1), got {alpha}");
    }
    Ok(FisherSnedecor::new(d1, d2)?.inverse_cdf(1.0 - alpha))
}

pub fn run_stats(table: &AccuracyTable, alpha: f64) -> Result<StatsReport> {
    let l = table.n_models();
    let m = table.n_datasets();
    let avg_ranks = average_ranks(table);
    let friedman = if l < 2 || m < 2 {
        Err(format!("need at least two models and two datasets, have {l} and {m}"))
    } else {
        let (d1, d2) = ((l - 1) as f64, ((l - 1) * (m - 1)) as f64);
        let critical = f_critical(alpha, d1, d2)?;
        friedman(&avg_ranks, m, critical).map_err(|e| e.to_string())
    };
    let mut pairs = Vec::new();
    for i in 0..l {
        for j in i + 1..l {
            let (a, b) = (table.column(i), table.column(j));
            pairs.push(PairReport {
                baseline: table.models()[i].clone(),
                challenger: table.models()[j].clone(),
                wilcoxon: wilcoxon_signed_rank(&a, &b)?,
                wtl: win_tie_loss(&b, &a)?,
            });
        }
    }
    Ok(StatsReport {
        models: table.models().to_vec(),
        n_datasets: m,
        avg_ranks,
        friedman,
        win_tie_threshold: win_tie_threshold(m),
        pairs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use gbtwin_core::Matrix;

    fn table(rows: &[[f64; 3]]) -> AccuracyTable {
        let names = (0..rows.len()).map(|i| format!("d{i}")).collect();
        AccuracyTable::new(
            vec!["a".into(), "b".into(), "c".into()],
            names,
            Matrix::from_rows(rows).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn f_critical_known_value() {
        // F(2, 10) upper 5% point from standard tables
        assert_relative_eq!(f_critical(0.05, 2.0, 10.0).unwrap(), 4.1028, epsilon = 1e-3);
    }

    #[test]
    fn strictly_ordered_models() {
        let rows: Vec<[f64; 3]> = (0..8).map(|i| [0.7 + 0.01 * i as f64, 0.8, 0.9]).collect();
        let r = run_stats(&table(&rows), 0.05).unwrap();
        assert_eq!(r.avg_ranks, vec![3.0, 2.0, 1.0]);
        assert!(r.friedman.as_ref().is_err(), "perfect agreement puts chi2 on M(l-1)");
        let ab = &r.pairs[0];
        assert_eq!((ab.wtl.wins, ab.wtl.losses), (8, 0));
        assert_eq!(ab.wilcoxon.r_minus, 0.0);
    }

    #[test]
    fn identical_columns() {
        let rows: Vec<[f64; 3]> = (0..6).map(|i| [0.5 + 0.05 * i as f64; 3]).collect();
        let r = run_stats(&table(&rows), 0.05).unwrap();
        let f = r.friedman.as_ref().unwrap();
        assert_eq!(f.chi2, 0.0);
        assert!(!f.reject);
        for p in &r.pairs {
            assert_eq!(p.wilcoxon.p, 1.0);
            assert_eq!(p.wtl.ties, 6);
        }
        assert!(r.render_kv().contains("friedman.reject=false"));
    }
}
