//! Property tests for resampling, solvers and the comparison statistics.

mod common;

use common::*;
use gbtwin_core::dataset::{
    gen_crossplane, gen_ndc, inject_label_noise_indexed, minmax_normalize, noise_count, split_indices, Label,
};
use gbtwin_core::eval::{average_ranks, friedman, kfold_indices, rank_rows, wilcoxon_signed_rank, win_tie_loss};
use gbtwin_core::solver::{qp_coordinate_ascent, solve_spd};
use gbtwin_core::{AccuracyTable, Dataset, Matrix, QpProblem, SolverConfig};
use nalgebra::DMatrix;
use proptest::prelude::*;

fn matrix(max_rows: usize, max_cols: usize) -> impl Strategy<Value = Matrix> {
    (1..=max_rows, 1..=max_cols).prop_flat_map(|(r, c)| {
        prop::collection::vec(-100.0..100.0f64, r * c).prop_map(move |v| Matrix::from_vec(r, c, v).unwrap())
    })
}

fn labelled(max_rows: usize, max_cols: usize) -> impl Strategy<Value = Dataset> {
    matrix(max_rows, max_cols).prop_flat_map(|x| {
        let m = x.nrows();
        prop::collection::vec(any::<bool>(), m).prop_map(move |bits| {
            let labels = bits.iter().map(|&b| if b { Label::Pos } else { Label::Neg }).collect();
            Dataset::new(x.clone(), labels).unwrap()
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn split_is_a_partition(m in 2usize..300, frac in 0.05f64..0.95, seed in any::<u64>()) {
        match split_indices(m, frac, seed) {
            Ok((train, test)) => {
                prop_assert_eq!(train.len(), (frac * m as f64).round() as usize);
                let mut all = [train.clone(), test.clone()].concat();
                all.sort_unstable();
                prop_assert_eq!(all, (0..m).collect::<Vec<_>>());
                prop_assert_eq!((train, test), split_indices(m, frac, seed).unwrap());
            }
            Err(_) => {
                let n = (frac * m as f64).round() as usize;
                prop_assert!(n == 0 || n >= m);
            }
        }
    }

    #[test]
    fn noise_flips_exactly_the_reported_labels(d in labelled(60, 3), rate in 0.0f64..=0.5, seed in any::<u64>()) {
        let (noisy, flipped) = inject_label_noise_indexed(&d, rate, seed).unwrap();
        prop_assert_eq!(flipped.len(), noise_count(d.len(), rate));
        prop_assert_eq!(flipped.len(), (rate * d.len() as f64 + 1e-9).floor() as usize);
        prop_assert_eq!(noisy.features(), d.features());
        for i in 0..d.len() {
            let changed = noisy.labels()[i] != d.labels()[i];
            prop_assert_eq!(changed, flipped.binary_search(&i).is_ok());
        }
    }

    #[test]
    fn normalisation_lands_in_unit_box_and_inverts(d in labelled(40, 5)) {
        let (scaled, params) = minmax_normalize(&d);
        prop_assert!(scaled.features().as_slice().iter().all(|v| (0.0..=1.0).contains(v)));
        let back = params.invert(scaled.features()).unwrap();
        for j in 0..d.n_features() {
            let col: Vec<f64> = d.features().rows().map(|r| r[j]).collect();
            let constant = col.iter().all(|v| *v == col[0]);
            if constant {
                prop_assert!(scaled.features().rows().all(|r| r[j] == 0.0));
                continue;
            }
            for (i, orig) in col.iter().enumerate() {
                let err = (back[(i, j)] - orig).abs();
                prop_assert!(err <= 1e-12 * orig.abs().max(1.0) * 100.0, "{} vs {}", back[(i, j)], orig);
            }
        }
    }

    #[test]
    fn kfold_is_a_partition(m in 2usize..200, k in 2usize..8, seed in any::<u64>()) {
        prop_assume!(m >= k);
        let folds = kfold_indices(m, k, seed).unwrap();
        let mut all = folds.concat();
        all.sort_unstable();
        prop_assert_eq!(all, (0..m).collect::<Vec<_>>());
        let (lo, hi) = (m / k, m.div_ceil(k));
        prop_assert!(folds.iter().all(|f| f.len() == lo || f.len() == hi));
    }

    #[test]
    fn ranks_sum_to_triangular_number(rows in prop::collection::vec(prop::collection::vec(0.0f64..=1.0, 4), 1..20)) {
        let acc = Matrix::from_rows(&rows).unwrap();
        let ranks = rank_rows(&acc);
        for r in ranks.rows() {
            prop_assert!((r.iter().sum::<f64>() - 10.0).abs() < 1e-12);
        }
    }

    #[test]
    fn friedman_statistic_is_non_negative(
        rows in prop::collection::vec(prop::collection::vec((0u8..5).prop_map(|v| v as f64 / 4.0), 5), 2..40),
    ) {
        let m = rows.len();
        let t = AccuracyTable::new(
            (0..5).map(|j| format!("m{j}")).collect(),
            (0..m).map(|i| format!("d{i}")).collect(),
            Matrix::from_rows(&rows).unwrap(),
        ).unwrap();
        let ranks = average_ranks(&t);
        let all_equal = ranks.iter().all(|r| (r - 3.0).abs() < 1e-12);
        match friedman(&ranks, m, 2.0) {
            Ok(f) => {
                prop_assert!(f.chi2 >= -1e-9);
                prop_assert_eq!(f.chi2.abs() < 1e-9, all_equal);
            }
            Err(gbtwin_core::Error::DegenerateFriedman { chi2 }) => prop_assert!((chi2 - (m * 4) as f64).abs() < 1e-6),
            Err(e) => prop_assert!(false, "{e}"),
        }
    }

    #[test]
    fn signed_rank_sums_cover_all_ranks(perm in Just((1..=30).collect::<Vec<u32>>()).prop_shuffle(), signs in prop::collection::vec(any::<bool>(), 30), n in 1usize..30) {
        // distinct magnitudes, so no ties
        let b: Vec<f64> = perm[..n].iter().zip(&signs).map(|(&p, &s)| if s { p as f64 } else { -(p as f64) }).collect();
        let a = vec![0.0; n];
        let w = wilcoxon_signed_rank(&a, &b).unwrap();
        prop_assert_eq!(w.r_plus + w.r_minus, (n * (n + 1) / 2) as f64);
        prop_assert!((0.0..=1.0).contains(&w.p));
    }

    #[test]
    fn win_tie_loss_adjusted_total(a in prop::collection::vec(0u8..4, 1..60), seed in any::<u64>()) {
        let mut r = rng(seed);
        let b: Vec<f64> = a.iter().map(|_| rand::Rng::random_range(&mut r, 0u8..4) as f64).collect();
        let a: Vec<f64> = a.iter().map(|&v| v as f64).collect();
        let w = win_tie_loss(&a, &b).unwrap();
        prop_assert_eq!(w.wins + w.ties + w.losses, a.len());
        let total = w.adj_wins + w.adj_losses;
        prop_assert!(total == a.len() || total + 1 == a.len());
    }
}

fn pd_problem(n: usize, seed: u64) -> QpProblem {
    use rand::Rng;
    let mut r = rng(seed);
    let a = DMatrix::from_fn(n, n, |_, _| r.random_range(-1.0..1.0));
    let q = &a * a.transpose() / n as f64 + DMatrix::identity(n, n) * r.random_range(0.1..2.0);
    let b = (0..n).map(|_| r.random_range(-3.0..3.0)).collect();
    QpProblem::new(from_na(&q), b).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn coordinate_sweeps_never_increase_objective(n in 1usize..40, seed in any::<u64>()) {
        let p = pd_problem(n, seed);
        let sol = qp_coordinate_ascent(&p, &SolverConfig::default()).unwrap();
        prop_assert!(sol.converged);
        for w in sol.objective_trace.windows(2) {
            prop_assert!(w[1] <= w[0] + 1e-12 * w[0].abs().max(1.0));
        }
        let direct = solve_spd(p.q(), &p.b().iter().map(|v| -v).collect::<Vec<_>>(), 0.0).unwrap();
        prop_assert!(max_abs_diff(&sol.z, &direct) <= 10.0 * SolverConfig::default().tolerance);
    }

    #[test]
    fn spd_residual_is_small(n in 1usize..40, seed in any::<u64>()) {
        let p = pd_problem(n, seed);
        let ridge = 1e-8;
        let z = solve_spd(p.q(), p.b(), ridge).unwrap();
        let shift = ridge * p.q().trace() / n as f64;
        let qz = p.q().mul_vec(&z);
        let scale = 1.0 + p.b().iter().fold(0.0f64, |m, v| m.max(v.abs()));
        for i in 0..n {
            prop_assert!((qz[i] + shift * z[i] - p.b()[i]).abs() <= 1e-8 * scale);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn generators_are_pure_functions_of_seed(seed in any::<u64>(), n in 4usize..200) {
        prop_assert_eq!(gen_crossplane(n, 0.01, seed).unwrap(), gen_crossplane(n, 0.01, seed).unwrap());
        prop_assert_eq!(gen_ndc(n, 3, 2.0, seed).unwrap(), gen_ndc(n, 3, 2.0, seed).unwrap());
    }
}
