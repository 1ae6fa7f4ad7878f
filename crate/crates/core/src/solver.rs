//! Numeric back-ends for the trainers.
//!
//! [`solve_spd`] is the ridge-stabilised Cholesky solve used by the
//! closed-form trainers. [`coordinate_ascent`] minimises an unconstrained
//! strictly convex quadratic one coordinate at a time; the duals of the
//! regularised trainer carry only equality-constraint multipliers, so there
//! are no box constraints to respect and every coordinate step is exact.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::math;

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SolverConfig {
    /// Stop once `‖Qz + b‖∞` falls to this value.
    pub tolerance: f64,
    /// Sweep cap; `None` means `10·n + 1000`.
    pub max_sweeps: Option<usize>,
    /// Relative ridge for [`solve_spd`], scaled by `tr(M)/n`.
    pub ridge: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            tolerance: 1e-8,
            max_sweeps: None,
            ridge: 1e-8,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tolerance > 0.0) {
            return Err(Error::param("tolerance", "must be positive"));
        }
        if !(self.ridge >= 0.0 && self.ridge.is_finite()) {
            return Err(Error::param("ridge", "must be finite and non-negative"));
        }
        Ok(())
    }

    pub fn sweep_limit(&self, n: usize) -> usize {
        self.max_sweeps.unwrap_or(10 * n + 1000)
    }
}

/// Absolute diagonal shift applied by [`solve_spd`] for a given matrix.
pub fn ridge_shift(m: &Matrix, ridge: f64) -> f64 {
    let n = m.nrows().max(1) as f64;
    let scale = m.trace() / n;
    if scale > 0.0 {
        ridge * scale
    } else {
        ridge
    }
}

/// Solves `(M + ε·tr(M)/n · I) z = rhs` by Cholesky factorisation with one
/// step of iterative refinement. `M` must be symmetric; only its lower
/// triangle is read by the factorisation.
pub fn solve_spd(m: &Matrix, rhs: &[f64], ridge: f64) -> Result<Vec<f64>> {
    let n = m.nrows();
    if m.ncols() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: m.ncols(),
        });
    }
    if rhs.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: rhs.len(),
        });
    }
    if n == 0 {
        return Err(Error::Empty("system matrix"));
    }
    if !(ridge >= 0.0 && ridge.is_finite()) {
        return Err(Error::param("ridge", "must be finite and non-negative"));
    }
    let scale = m.as_slice().iter().fold(0.0f64, |a, v| a.max(v.abs()));
    if m.max_asymmetry() > 1e-10 * scale.max(1.0) {
        return Err(Error::param("M", "matrix is not symmetric"));
    }

    let shift = ridge_shift(m, ridge);
    let mut shifted = m.clone();
    for i in 0..n {
        shifted[(i, i)] += shift;
    }
    let chol = Cholesky::factor(&shifted).map_err(|pivot| Error::Factorization { pivot, ridge: shift })?;

    let mut z = chol.solve(rhs);
    let ax = shifted.mul_vec(&z);
    let residual: Vec<f64> = rhs.iter().zip(&ax).map(|(r, a)| r - a).collect();
    let correction = chol.solve(&residual);
    for (zi, ci) in z.iter_mut().zip(&correction) {
        *zi += ci;
    }
    if z.iter().any(|v| !v.is_finite()) {
        return Err(Error::Factorization { pivot: n, ridge: shift });
    }
    Ok(z)
}

/// Lower-triangular Cholesky factor, stored densely.
struct Cholesky {
    l: Matrix,
}

impl Cholesky {
    /// Fails with the index of the first non-positive pivot.
    fn factor(a: &Matrix) -> core::result::Result<Cholesky, usize> {
        let n = a.nrows();
        let mut l = Matrix::zeros(n, n);
        for j in 0..n {
            let row_j = l.row(j)[..j].to_vec();
            let d = a[(j, j)] - math::dot(&row_j, &row_j);
            if !(d > 0.0) || !d.is_finite() {
                return Err(j);
            }
            let pivot = math::sqrt(d);
            l[(j, j)] = pivot;
            for i in (j + 1)..n {
                let s = a[(i, j)] - math::dot(&l.row(i)[..j], &row_j);
                l[(i, j)] = s / pivot;
            }
        }
        Ok(Cholesky { l })
    }

    fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = b.len();
        let l = &self.l;
        let mut y = vec![0.0; n];
        for i in 0..n {
            y[i] = (b[i] - math::dot(&l.row(i)[..i], &y[..i])) / l[(i, i)];
        }
        let mut x = vec![0.0; n];
        for i in (0..n).rev() {
            let mut s = y[i];
            for k in (i + 1)..n {
                s -= l[(k, i)] * x[k];
            }
            x[i] = s / l[(i, i)];
        }
        x
    }
}

/// A symmetric positive-definite quadratic `½ zᵀQz` accessed row by row.
///
/// `Cache` lets structured forms keep `Qz` cheap to evaluate while single
/// coordinates of `z` change.
pub trait QuadraticForm {
    type Cache;

    fn dim(&self) -> usize;

    fn diag(&self, i: usize) -> f64;

    fn cache(&self, z: &[f64]) -> Self::Cache;

    /// `(Qz)_i`, given a cache consistent with `z`.
    fn row_dot(&self, i: usize, z: &[f64], cache: &Self::Cache) -> f64;

    /// Informs the cache that `z_i` moved by `delta`.
    fn update(&self, i: usize, delta: f64, cache: &mut Self::Cache);

    /// Full product `Qz`, computed from scratch.
    fn mul(&self, z: &[f64]) -> Vec<f64>;
}

/// Dense problem `min ½ zᵀQz + bᵀz`.
#[derive(Debug, Clone, PartialEq)]
pub struct QpProblem {
    q: Matrix,
    b: Vec<f64>,
}

impl QpProblem {
    pub fn new(q: Matrix, b: Vec<f64>) -> Result<QpProblem> {
        let n = q.nrows();
        if q.ncols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: q.ncols(),
            });
        }
        if b.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: b.len(),
            });
        }
        if q.max_asymmetry() > 1e-10 {
            return Err(Error::param("Q", "not symmetric within 1e-10"));
        }
        if let Some(i) = (0..n).find(|&i| !(q[(i, i)] > 0.0)) {
            return Err(Error::param("Q", format!("diagonal entry {i} is not positive")));
        }
        Ok(QpProblem { q, b })
    }

    pub fn q(&self) -> &Matrix {
        &self.q
    }

    pub fn b(&self) -> &[f64] {
        &self.b
    }

    pub fn objective(&self, z: &[f64]) -> f64 {
        let qz = self.q.mul_vec(z);
        0.5 * math::dot(z, &qz) + math::dot(&self.b, z)
    }

    pub fn gradient(&self, z: &[f64]) -> Vec<f64> {
        let mut g = self.q.mul_vec(z);
        for (gi, bi) in g.iter_mut().zip(&self.b) {
            *gi += bi;
        }
        g
    }
}

impl QuadraticForm for Matrix {
    type Cache = ();

    fn dim(&self) -> usize {
        self.nrows()
    }

    fn diag(&self, i: usize) -> f64 {
        self[(i, i)]
    }

    fn cache(&self, _z: &[f64]) {}

    fn row_dot(&self, i: usize, z: &[f64], _cache: &()) -> f64 {
        math::dot(self.row(i), z)
    }

    fn update(&self, _i: usize, _delta: f64, _cache: &mut ()) {}

    fn mul(&self, z: &[f64]) -> Vec<f64> {
        self.mul_vec(z)
    }
}

/// `Q = UUᵀ + diag(d)` with `U` of size `n × r`, `r ≪ n`.
///
/// The cache is `v = Uᵀz`, so a coordinate step costs `O(r)` rather than `O(n)`.
#[derive(Debug, Clone)]
pub struct LowRankPlusDiag {
    pub u: Matrix,
    pub d: Vec<f64>,
}

impl LowRankPlusDiag {
    pub fn to_dense(&self) -> Matrix {
        let mut q = self.u.matmul(&self.u.transpose()).expect("U Uᵀ is square");
        for (i, di) in self.d.iter().enumerate() {
            q[(i, i)] += di;
        }
        q
    }
}

impl QuadraticForm for LowRankPlusDiag {
    type Cache = Vec<f64>;

    fn dim(&self) -> usize {
        self.u.nrows()
    }

    fn diag(&self, i: usize) -> f64 {
        let ui = self.u.row(i);
        math::dot(ui, ui) + self.d[i]
    }

    fn cache(&self, z: &[f64]) -> Vec<f64> {
        let mut v = vec![0.0; self.u.ncols()];
        for (ui, &zi) in self.u.rows().zip(z) {
            for (vk, uk) in v.iter_mut().zip(ui) {
                *vk += zi * uk;
            }
        }
        v
    }

    fn row_dot(&self, i: usize, z: &[f64], v: &Vec<f64>) -> f64 {
        math::dot(self.u.row(i), v) + self.d[i] * z[i]
    }

    fn update(&self, i: usize, delta: f64, v: &mut Vec<f64>) {
        for (vk, uk) in v.iter_mut().zip(self.u.row(i)) {
            *vk += delta * uk;
        }
    }

    fn mul(&self, z: &[f64]) -> Vec<f64> {
        let v = self.cache(z);
        self.u
            .rows()
            .zip(z)
            .zip(&self.d)
            .map(|((ui, zi), di)| math::dot(ui, &v) + di * zi)
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct QpSolution {
    pub z: Vec<f64>,
    pub sweeps: usize,
    pub converged: bool,
    /// `‖Qz + b‖∞` at return.
    pub gradient_norm: f64,
    /// Objective at the start and after every sweep.
    pub objective_trace: Vec<f64>,
}

/// Cyclic exact coordinate minimisation of `½ zᵀQz + bᵀz` from `z = 0`.
///
/// Each step sets `z_i ← z_i − (Q_i·z + b_i)/Q_ii`, which never increases
/// the objective. Returns the last iterate; `converged` is false when the
/// sweep limit was reached first.
pub fn coordinate_ascent<F: QuadraticForm>(q: &F, b: &[f64], cfg: &SolverConfig) -> Result<QpSolution> {
    cfg.validate()?;
    let n = q.dim();
    if b.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: b.len(),
        });
    }
    let diag: Vec<f64> = (0..n).map(|i| q.diag(i)).collect();
    if let Some(i) = diag.iter().position(|&d| !(d > 0.0)) {
        return Err(Error::param("Q", format!("diagonal entry {i} is not positive")));
    }

    let mut z = vec![0.0; n];
    let mut cache = q.cache(&z);
    let mut trace = vec![0.0];
    let mut grad_norm = b.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let limit = cfg.sweep_limit(n);
    let mut sweeps = 0;

    while grad_norm > cfg.tolerance && sweeps < limit {
        for i in 0..n {
            let g = q.row_dot(i, &z, &cache) + b[i];
            let delta = -g / diag[i];
            if delta != 0.0 {
                z[i] += delta;
                q.update(i, delta, &mut cache);
            }
        }
        sweeps += 1;
        // refresh from scratch so incremental round-off cannot accumulate
        cache = q.cache(&z);
        let mut g = q.mul(&z);
        let mut objective = 0.0;
        for ((gi, bi), zi) in g.iter_mut().zip(b).zip(&z) {
            objective += 0.5 * zi * *gi + bi * zi;
            *gi += bi;
        }
        grad_norm = g.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        trace.push(objective);
    }

    Ok(QpSolution {
        z,
        sweeps,
        converged: grad_norm <= cfg.tolerance,
        gradient_norm: grad_norm,
        objective_trace: trace,
    })
}

pub fn qp_coordinate_ascent(p: &QpProblem, cfg: &SolverConfig) -> Result<QpSolution> {
    coordinate_ascent(&p.q, &p.b, cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn spd_identity_and_diagonal() {
        let z = solve_spd(&Matrix::identity(2), &[3.0, -4.0], 1e-8).unwrap();
        assert_abs_diff_eq!(z[0], 3.0, epsilon = 3.0 * 1e-8);
        assert_abs_diff_eq!(z[1], -4.0, epsilon = 4.0 * 1e-8);
        let m = Matrix::from_rows(&[[2.0, 0.0], [0.0, 4.0]]).unwrap();
        let z = solve_spd(&m, &[2.0, 8.0], 0.0).unwrap();
        assert_eq!(z, vec![1.0, 2.0]);
    }

    #[test]
    fn spd_reports_failure_with_ridge() {
        let m = Matrix::from_rows(&[[1.0, 2.0], [2.0, 1.0]]).unwrap();
        match solve_spd(&m, &[1.0, 1.0], 0.0) {
            Err(Error::Factorization { pivot: 1, ridge }) => assert_eq!(ridge, 0.0),
            other => panic!("unexpected {other:?}"),
        }
        let asym = Matrix::from_rows(&[[1.0, 2.0], [0.0, 1.0]]).unwrap();
        assert!(solve_spd(&asym, &[1.0, 1.0], 1e-8).is_err());
        assert!(solve_spd(&Matrix::identity(2), &[1.0], 1e-8).is_err());
    }

    #[test]
    fn qp_closed_form_examples() {
        let cfg = SolverConfig::default();
        let p = QpProblem::new(Matrix::from_rows(&[[2.0, 0.0], [0.0, 2.0]]).unwrap(), vec![-2.0, 4.0]).unwrap();
        let s = qp_coordinate_ascent(&p, &cfg).unwrap();
        assert!(s.converged);
        assert_abs_diff_eq!(s.z[0], 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(s.z[1], -2.0, epsilon = 1e-12);

        let p = QpProblem::new(Matrix::from_rows(&[[2.0, 1.0], [1.0, 2.0]]).unwrap(), vec![-3.0, -3.0]).unwrap();
        let s = qp_coordinate_ascent(&p, &cfg).unwrap();
        assert!(s.converged && s.gradient_norm <= 1e-8);
        assert_abs_diff_eq!(s.z[0], 1.0, epsilon = 1e-8);
        assert_abs_diff_eq!(s.z[1], 1.0, epsilon = 1e-8);
        assert!(s.objective_trace.windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn qp_rejects_bad_problems() {
        assert!(QpProblem::new(Matrix::from_rows(&[[0.0, 0.0], [0.0, 1.0]]).unwrap(), vec![0.0, 0.0]).is_err());
        assert!(QpProblem::new(Matrix::from_rows(&[[1.0, 0.5], [0.0, 1.0]]).unwrap(), vec![0.0, 0.0]).is_err());
        assert!(QpProblem::new(Matrix::identity(2), vec![0.0]).is_err());
    }

    #[test]
    fn sweep_cap_sets_flag() {
        let q = Matrix::from_rows(&[[1.0, 0.999], [0.999, 1.0]]).unwrap();
        let cfg = SolverConfig {
            max_sweeps: Some(3),
            ..SolverConfig::default()
        };
        let s = coordinate_ascent(&q, &[1.0, -1.0], &cfg).unwrap();
        assert!(!s.converged);
        assert_eq!(s.sweeps, 3);
        assert_eq!(s.objective_trace.len(), 4);
    }

    #[test]
    fn low_rank_form_agrees_with_dense() {
        let u = Matrix::from_rows(&[[1.0, 0.5, 1.0], [-0.3, 2.0, 1.0], [0.7, 0.1, 1.0], [0.0, -1.0, 1.0]]).unwrap();
        let form = LowRankPlusDiag {
            u,
            d: vec![0.5, 0.5, 2.0, 2.0],
        };
        let dense = form.to_dense();
        let b = [0.0, 0.0, 1.0, 1.0];
        let cfg = SolverConfig::default();
        let a = coordinate_ascent(&form, &b, &cfg).unwrap();
        let c = coordinate_ascent(&dense, &b, &cfg).unwrap();
        for (x, y) in a.z.iter().zip(&c.z) {
            assert_abs_diff_eq!(x, y, epsilon = 1e-8);
        }
        let z = [0.3, -1.0, 2.0, 0.5];
        for (x, y) in form.mul(&z).iter().zip(dense.mul_vec(&z)) {
            assert_abs_diff_eq!(*x, y, epsilon = 1e-12);
        }
    }
}
