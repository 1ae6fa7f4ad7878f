#![allow(dead_code)]

use gbtwin_core::dataset::Label;
use gbtwin_core::granular::GranularBall;
use gbtwin_core::{BallSet, Dataset, Matrix};
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn to_na(m: &Matrix) -> DMatrix<f64> {
    DMatrix::from_row_slice(m.nrows(), m.ncols(), m.as_slice())
}

pub fn from_na(m: &DMatrix<f64>) -> Matrix {
    let rows: Vec<Vec<f64>> = (0..m.nrows()).map(|i| m.row(i).iter().copied().collect()).collect();
    Matrix::from_vec(m.nrows(), m.ncols(), rows.concat()).unwrap()
}

/// `[x e]`
pub fn augment(x: &Matrix) -> DMatrix<f64> {
    let mut out = DMatrix::from_element(x.nrows(), x.ncols() + 1, 1.0);
    for i in 0..x.nrows() {
        for j in 0..x.ncols() {
            out[(i, j)] = x[(i, j)];
        }
    }
    out
}

pub fn dense_solve(m: &DMatrix<f64>, rhs: &DVector<f64>) -> DVector<f64> {
    m.clone().lu().solve(rhs).expect("oracle system is nonsingular")
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Uniform features in `[-1, 1]` with both labels present.
pub fn random_dataset(rng: &mut ChaCha8Rng, m: usize, n: usize) -> Dataset {
    let data: Vec<f64> = (0..m * n).map(|_| rng.random_range(-1.0..1.0)).collect();
    let mut labels: Vec<Label> = (0..m)
        .map(|_| if rng.random_bool(0.5) { Label::Pos } else { Label::Neg })
        .collect();
    labels[0] = Label::Pos;
    labels[m - 1] = Label::Neg;
    Dataset::new(Matrix::from_vec(m, n, data).unwrap(), labels).unwrap()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Balls with random centres and radii, `k1` labelled +1 then `k2` labelled −1.
pub fn random_ballset(rng: &mut ChaCha8Rng, k1: usize, k2: usize, n: usize) -> BallSet {
    let balls = (0..k1 + k2)
        .map(|i| GranularBall {
            center: (0..n).map(|_| rng.random_range(-1.0..1.0)).collect(),
            radius: rng.random_range(0.0..0.5),
            label: if i < k1 { Label::Pos } else { Label::Neg },
            size: 1,
            purity: 1.0,
            members: vec![i],
        })
        .collect();
    BallSet::from_balls(balls, n).unwrap()
}

pub fn one_d_balls(radius: f64) -> BallSet {
    let ball = |x: f64, label, i| GranularBall {
        center: vec![x],
        radius,
        label,
        size: 1,
        purity: 1.0,
        members: vec![i],
    };
    BallSet::from_balls(vec![ball(1.0, Label::Pos, 0), ball(-1.0, Label::Neg, 1)], 1).unwrap()
}
