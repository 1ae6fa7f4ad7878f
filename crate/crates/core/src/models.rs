//! Twin-plane trainers and the nearest-plane classifier.
//!
//! Every trainer produces two hyperplanes `f₁(x) = w₁·x + b₁` (close to the
//! +1 class) and `f₂(x) = w₂·x + b₂` (close to the −1 class). A sample goes
//! to the class whose plane is nearer in perpendicular distance.
//!
//! * LSTSVM fits the planes to the raw class matrices `A`, `B`.
//! * GBLSTSVM fits them to the granular-ball centres `C`, `D`, with each
//!   ball's radius added to the unit margin of the opposite plane.
//! * LS-GBLSTSVM adds `c₃(‖w‖² + b²)` style regularisation and solves the
//!   dual by coordinate ascent, never factoring a matrix.
//!
//! Kernel versions expand each plane over the ball centres `O = [C; D]`,
//! replacing every centre `x` by its kernel row `K(x, O)`.

use alloc::vec;
use alloc::vec::Vec;

use crate::dataset::{Dataset, Label};
use crate::error::{Error, Result};
use crate::eval::HyperParams;
use crate::granular::{generate_balls, BallSet};
use crate::kernel::{Kernel, KernelKind};
use crate::linalg::{augmented_gram, augmented_tmul, Matrix};
use crate::math;
use crate::solver::{coordinate_ascent, solve_spd, LowRankPlusDiag, QpProblem, SolverConfig};

/// Plane norms below this use `|b|` as the distance.
pub const DEGENERATE_NORM: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum Variant {
    Lstsvm,
    Gblstsvm,
    Lsgblstsvm,
}

impl Variant {
    pub const ALL: [Variant; 3] = [Variant::Lstsvm, Variant::Gblstsvm, Variant::Lsgblstsvm];

    pub fn name(self) -> &'static str {
        match self {
            Variant::Lstsvm => "lstsvm",
            Variant::Gblstsvm => "gblstsvm",
            Variant::Lsgblstsvm => "lsgblstsvm",
        }
    }

    pub fn uses_balls(self) -> bool {
        !matches!(self, Variant::Lstsvm)
    }

    pub fn parse(s: &str) -> Option<Variant> {
        Variant::ALL.into_iter().find(|v| v.name().eq_ignore_ascii_case(s))
    }
}

/// Linear plane pair `(w₁, b₁, w₂, b₂)`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PlanePair {
    pub w1: Vec<f64>,
    pub b1: f64,
    pub w2: Vec<f64>,
    pub b2: f64,
}

impl PlanePair {
    fn from_augmented(mut p1: Vec<f64>, mut p2: Vec<f64>) -> PlanePair {
        let b1 = p1.pop().expect("augmented vector");
        let b2 = p2.pop().expect("augmented vector");
        PlanePair { w1: p1, b1, w2: p2, b2 }
    }

    pub fn dim(&self) -> usize {
        self.w1.len()
    }

    /// Perpendicular distances of `x` to plane 1 and plane 2.
    pub fn distances(&self, x: &[f64]) -> Result<(f64, f64)> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: x.len(),
            });
        }
        let n1 = math::sqrt(math::dot(&self.w1, &self.w1));
        let n2 = math::sqrt(math::dot(&self.w2, &self.w2));
        Ok((
            plane_distance(math::dot(&self.w1, x) + self.b1, n1, self.b1),
            plane_distance(math::dot(&self.w2, x) + self.b2, n2, self.b2),
        ))
    }

    pub fn classify(&self, x: &[f64]) -> Result<Label> {
        let (d1, d2) = self.distances(x)?;
        Ok(nearer(d1, d2))
    }
}

/// Plane pair expanded over anchor points: `f_i(x) = Σ_j u_i[j]·k(o_j, x) + b_i`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct KernelPlanePair {
    pub u1: Vec<f64>,
    pub b1: f64,
    pub u2: Vec<f64>,
    pub b2: f64,
    pub anchors: Matrix,
    pub kernel: Kernel,
    pub gram_anchors: Matrix,
    /// `‖w_i‖ = sqrt(u_iᵀ K(O,O) u_i)`.
    pub norms: [f64; 2],
}

impl KernelPlanePair {
    pub fn new(
        u1: Vec<f64>,
        b1: f64,
        u2: Vec<f64>,
        b2: f64,
        anchors: Matrix,
        kernel: Kernel,
        gram_anchors: Matrix,
    ) -> Result<Self> {
        let k = anchors.nrows();
        if u1.len() != k || u2.len() != k {
            return Err(Error::DimensionMismatch {
                expected: k,
                found: if u1.len() != k { u1.len() } else { u2.len() },
            });
        }
        if gram_anchors.nrows() != k || gram_anchors.ncols() != k {
            return Err(Error::DimensionMismatch {
                expected: k,
                found: gram_anchors.nrows(),
            });
        }
        let norm = |u: &[f64]| math::sqrt(math::dot(u, &gram_anchors.mul_vec(u)).max(0.0));
        let norms = [norm(&u1), norm(&u2)];
        Ok(KernelPlanePair {
            u1,
            b1,
            u2,
            b2,
            anchors,
            kernel,
            gram_anchors,
            norms,
        })
    }

    pub fn dim(&self) -> usize {
        self.anchors.ncols()
    }

    /// Raw plane values `(f₁(x), f₂(x))`.
    pub fn decision(&self, x: &[f64]) -> Result<(f64, f64)> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: x.len(),
            });
        }
        let kx = self.kernel.row_against(x, &self.anchors);
        Ok((math::dot(&self.u1, &kx) + self.b1, math::dot(&self.u2, &kx) + self.b2))
    }

    pub fn distances(&self, x: &[f64]) -> Result<(f64, f64)> {
        let (f1, f2) = self.decision(x)?;
        Ok((
            plane_distance(f1, self.norms[0], self.b1),
            plane_distance(f2, self.norms[1], self.b2),
        ))
    }

    pub fn classify(&self, x: &[f64]) -> Result<Label> {
        let (d1, d2) = self.distances(x)?;
        Ok(nearer(d1, d2))
    }
}

#[inline]
fn plane_distance(value: f64, norm: f64, bias: f64) -> f64 {
    if norm < DEGENERATE_NORM {
        bias.abs()
    } else {
        value.abs() / norm
    }
}

// Ties go to +1.
#[inline]
fn nearer(d1: f64, d2: f64) -> Label {
    if d1 <= d2 {
        Label::Pos
    } else {
        Label::Neg
    }
}

/// Dual multipliers of the regularised trainer: `(α, β)` for plane 1 and
/// `(λ, θ)` for plane 2.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DualSolution {
    /// One per +1 ball.
    pub alpha: Vec<f64>,
    /// One per −1 ball.
    pub beta: Vec<f64>,
    /// One per −1 ball.
    pub lambda: Vec<f64>,
    /// One per +1 ball.
    pub theta: Vec<f64>,
    pub converged: bool,
    pub sweeps: usize,
}

fn check_positive(name: &'static str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::param(name, "must be positive and finite"))
    }
}

fn check_classes(bs: &BallSet) -> Result<()> {
    if bs.k_pos() == 0 {
        return Err(Error::MissingClass(1));
    }
    if bs.k_neg() == 0 {
        return Err(Error::MissingClass(-1));
    }
    Ok(())
}

/// Closed-form twin planes for rows `p` (+1 side) and `q` (−1 side) with
/// per-row margin offsets:
///
/// `[w₁;b₁] = −(QᵀQ + PᵀP/c₁)⁻¹ [Q e]ᵀ(e + r_q)`,
/// `[w₂;b₂] =  (PᵀP + QᵀQ/c₂)⁻¹ [P e]ᵀ(e + r_p)`, with `P = [p e]`, `Q = [q e]`.
fn closed_form_pair(
    p: &Matrix,
    q: &Matrix,
    r_p: &[f64],
    r_q: &[f64],
    c1: f64,
    c2: f64,
    ridge: f64,
) -> Result<(Vec<f64>, Vec<f64>)> {
    check_positive("c1", c1)?;
    check_positive("c2", c2)?;
    let ptp = augmented_gram(p);
    let qtq = augmented_gram(q);

    let mut m1 = qtq.clone();
    m1.add_scaled(1.0 / c1, &ptp);
    let rhs1 = augmented_tmul(q, &r_q.iter().map(|r| 1.0 + r).collect::<Vec<_>>());
    let mut z1 = solve_spd(&m1, &rhs1, ridge)?;
    z1.iter_mut().for_each(|v| *v = -*v);

    let mut m2 = ptp;
    m2.add_scaled(1.0 / c2, &qtq);
    let rhs2 = augmented_tmul(p, &r_p.iter().map(|r| 1.0 + r).collect::<Vec<_>>());
    let z2 = solve_spd(&m2, &rhs2, ridge)?;
    Ok((z1, z2))
}

/// LSTSVM on class matrices `a` (+1) and `b` (−1).
pub fn fit_lstsvm(a: &Matrix, b: &Matrix, c1: f64, c2: f64, ridge: f64) -> Result<PlanePair> {
    if a.nrows() == 0 || b.nrows() == 0 {
        return Err(Error::SingleClass);
    }
    if a.ncols() != b.ncols() {
        return Err(Error::DimensionMismatch {
            expected: a.ncols(),
            found: b.ncols(),
        });
    }
    let (z1, z2) = closed_form_pair(a, b, &vec![0.0; a.nrows()], &vec![0.0; b.nrows()], c1, c2, ridge)?;
    Ok(PlanePair::from_augmented(z1, z2))
}

/// Linear GBLSTSVM on ball centres and radii.
pub fn fit_gblstsvm_linear(bs: &BallSet, c1: f64, c2: f64, ridge: f64) -> Result<PlanePair> {
    check_classes(bs)?;
    let (z1, z2) = closed_form_pair(bs.c(), bs.d(), bs.r_plus(), bs.r_minus(), c1, c2, ridge)?;
    Ok(PlanePair::from_augmented(z1, z2))
}

/// Kernel GBLSTSVM: the linear system with every centre replaced by its
/// kernel row against all centres. Radii stay the input-space radii.
pub fn fit_gblstsvm_kernel(bs: &BallSet, c1: f64, c2: f64, kernel: Kernel, ridge: f64) -> Result<KernelPlanePair> {
    check_classes(bs)?;
    kernel.validate()?;
    let anchors = bs.anchors();
    let k_c = kernel.gram(bs.c(), &anchors)?;
    let k_d = kernel.gram(bs.d(), &anchors)?;
    let (z1, z2) = closed_form_pair(&k_c, &k_d, bs.r_plus(), bs.r_minus(), c1, c2, ridge)?;
    let gram = k_c.vstack(&k_d)?;
    let (mut u1, mut u2) = (z1, z2);
    let b1 = u1.pop().expect("augmented");
    let b2 = u2.pop().expect("augmented");
    KernelPlanePair::new(u1, b1, u2, b2, anchors, kernel, gram)
}

/// Regularisation constants of the LS-GBLSTSVM duals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LsConstants {
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    pub c4: f64,
}

impl LsConstants {
    fn validate(&self) -> Result<()> {
        check_positive("c1", self.c1)?;
        check_positive("c2", self.c2)?;
        check_positive("c3", self.c3)?;
        check_positive("c4", self.c4)
    }
}

// [rows e] for the low-rank dual form; the trailing ones column is the
// all-ones matrix that eliminating the bias adds to Q.
fn with_ones(first: &Matrix, second: &Matrix) -> Matrix {
    let n = first.ncols().max(second.ncols());
    let mut u = Matrix::zeros(first.nrows() + second.nrows(), n + 1);
    for (i, r) in first.rows().chain(second.rows()).enumerate() {
        let row = u.row_mut(i);
        row[..n].copy_from_slice(r);
        row[n] = 1.0;
    }
    u
}

fn dual_linear_term(first_len: usize, radii: &[f64], scale: f64) -> Vec<f64> {
    let mut b = vec![0.0; first_len];
    b.extend(radii.iter().map(|r| scale * (1.0 + r)));
    b
}

/// The two dense duals `min ½zᵀQz + bᵀz`, with Gram blocks from `kernel`:
///
/// `Q₁ = [[K(C,C)+c₃I, K(C,D)], [K(D,C), K(D,D)+(c₃/c₁)I]] + 𝟙𝟙ᵀ`, `b₁ = [0; c₃(e+R⁻)]` over `z = (α, β)`;
/// `Q₂ = [[K(D,D)+c₄I, K(D,C)], [K(C,D), K(C,C)+(c₄/c₂)I]] + 𝟙𝟙ᵀ`, `b₂ = [0; c₄(e+R⁺)]` over `z = (λ, θ)`.
pub fn ls_dual_problems(bs: &BallSet, c: &LsConstants, kernel: Kernel) -> Result<(QpProblem, QpProblem)> {
    check_classes(bs)?;
    c.validate()?;
    kernel.validate()?;
    let (k1, k2) = (bs.k_pos(), bs.k_neg());
    let gram = kernel.gram(&bs.anchors(), &bs.anchors())?;
    Ok((
        QpProblem::new(
            dual_matrix(&gram, k1, k2, false, c.c3, c.c3 / c.c1),
            dual_linear_term(k1, bs.r_minus(), c.c3),
        )?,
        QpProblem::new(
            dual_matrix(&gram, k1, k2, true, c.c4, c.c4 / c.c2),
            dual_linear_term(k2, bs.r_plus(), c.c4),
        )?,
    ))
}

// Gram over [C; D], optionally reordered to [D; C], plus ones and the block diagonal.
fn dual_matrix(gram: &Matrix, k1: usize, k2: usize, swap: bool, diag_first: f64, diag_second: f64) -> Matrix {
    let k = k1 + k2;
    let order: Vec<usize> = if swap {
        (k1..k).chain(0..k1).collect()
    } else {
        (0..k).collect()
    };
    let first_len = if swap { k2 } else { k1 };
    let mut q = Matrix::zeros(k, k);
    for (i, &oi) in order.iter().enumerate() {
        for (j, &oj) in order.iter().enumerate() {
            q[(i, j)] = gram[(oi, oj)] + 1.0;
        }
        q[(i, i)] += if i < first_len { diag_first } else { diag_second };
    }
    q
}

/// Linear LS-GBLSTSVM. The duals are solved on the factored form
/// `Q = UUᵀ + diag` with `U = [centres e]`, so each coordinate step is
/// `O(N)`; `[w₁;b₁] = Uᵀ(α;β)/c₃` and `[w₂;b₂] = −Uᵀ(λ;θ)/c₄`.
pub fn fit_lsgblstsvm_linear(bs: &BallSet, c: &LsConstants, cfg: &SolverConfig) -> Result<(PlanePair, DualSolution)> {
    check_classes(bs)?;
    c.validate()?;
    let (k1, k2) = (bs.k_pos(), bs.k_neg());

    let u1 = with_ones(bs.c(), bs.d());
    let mut d1 = vec![c.c3; k1];
    d1.extend(core::iter::repeat_n(c.c3 / c.c1, k2));
    let form1 = LowRankPlusDiag { u: u1, d: d1 };
    let sol1 = coordinate_ascent(&form1, &dual_linear_term(k1, bs.r_minus(), c.c3), cfg)?;

    let u2 = with_ones(bs.d(), bs.c());
    let mut d2 = vec![c.c4; k2];
    d2.extend(core::iter::repeat_n(c.c4 / c.c2, k1));
    let form2 = LowRankPlusDiag { u: u2, d: d2 };
    let sol2 = coordinate_ascent(&form2, &dual_linear_term(k2, bs.r_plus(), c.c4), cfg)?;

    let p1: Vec<f64> = transpose_mul(&form1.u, &sol1.z).into_iter().map(|v| v / c.c3).collect();
    let p2: Vec<f64> = transpose_mul(&form2.u, &sol2.z)
        .into_iter()
        .map(|v| -v / c.c4)
        .collect();
    let dual = DualSolution {
        alpha: sol1.z[..k1].to_vec(),
        beta: sol1.z[k1..].to_vec(),
        lambda: sol2.z[..k2].to_vec(),
        theta: sol2.z[k2..].to_vec(),
        converged: sol1.converged && sol2.converged,
        sweeps: sol1.sweeps.max(sol2.sweeps),
    };
    Ok((PlanePair::from_augmented(p1, p2), dual))
}

fn transpose_mul(u: &Matrix, z: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; u.ncols()];
    for (row, &zi) in u.rows().zip(z) {
        for (o, v) in out.iter_mut().zip(row) {
            *o += zi * v;
        }
    }
    out
}

/// Kernel LS-GBLSTSVM on the dense Gram duals. Plane coefficients over the
/// anchors `O = [C; D]`: `u₁ = (α; β)/c₃`, `u₂ = −(θ; λ)/c₄`.
pub fn fit_lsgblstsvm_kernel(
    bs: &BallSet,
    c: &LsConstants,
    kernel: Kernel,
    cfg: &SolverConfig,
) -> Result<(KernelPlanePair, DualSolution)> {
    check_classes(bs)?;
    c.validate()?;
    kernel.validate()?;
    let (k1, k2) = (bs.k_pos(), bs.k_neg());
    let anchors = bs.anchors();
    let gram = kernel.gram(&anchors, &anchors)?;

    let q1 = dual_matrix(&gram, k1, k2, false, c.c3, c.c3 / c.c1);
    let sol1 = coordinate_ascent(&q1, &dual_linear_term(k1, bs.r_minus(), c.c3), cfg)?;
    let q2 = dual_matrix(&gram, k1, k2, true, c.c4, c.c4 / c.c2);
    let sol2 = coordinate_ascent(&q2, &dual_linear_term(k2, bs.r_plus(), c.c4), cfg)?;

    let u1: Vec<f64> = sol1.z.iter().map(|v| v / c.c3).collect();
    let b1 = sol1.z.iter().sum::<f64>() / c.c3;
    let (lambda, theta) = sol2.z.split_at(k2);
    let u2: Vec<f64> = theta.iter().chain(lambda).map(|v| -v / c.c4).collect();
    let b2 = -sol2.z.iter().sum::<f64>() / c.c4;

    let dual = DualSolution {
        alpha: sol1.z[..k1].to_vec(),
        beta: sol1.z[k1..].to_vec(),
        lambda: lambda.to_vec(),
        theta: theta.to_vec(),
        converged: sol1.converged && sol2.converged,
        sweeps: sol1.sweeps.max(sol2.sweeps),
    };
    Ok((KernelPlanePair::new(u1, b1, u2, b2, anchors, kernel, gram)?, dual))
}

/// A fitted plane pair of either form.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "form", rename_all = "lowercase"))]
pub enum Model {
    Linear(PlanePair),
    Kernel(KernelPlanePair),
}

impl Model {
    pub fn dim(&self) -> usize {
        match self {
            Model::Linear(p) => p.dim(),
            Model::Kernel(p) => p.dim(),
        }
    }

    pub fn distances(&self, x: &[f64]) -> Result<(f64, f64)> {
        match self {
            Model::Linear(p) => p.distances(x),
            Model::Kernel(p) => p.distances(x),
        }
    }

    pub fn classify(&self, x: &[f64]) -> Result<Label> {
        let (d1, d2) = self.distances(x)?;
        Ok(nearer(d1, d2))
    }

    pub fn predict(&self, x: &Matrix) -> Result<Vec<Label>> {
        x.rows().map(|r| self.classify(r)).collect()
    }
}

/// A model together with how it was trained.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TrainedModel {
    pub variant: Variant,
    pub kernel: Kernel,
    pub hyper: HyperParams,
    /// Training points the planes were fitted to: ball count, or `m` for LSTSVM.
    pub n_balls: usize,
    /// `false` when the dual solver hit its sweep limit.
    pub converged: bool,
    pub model: Model,
}

impl TrainedModel {
    pub fn classify(&self, x: &[f64]) -> Result<Label> {
        self.model.classify(x)
    }

    pub fn predict(&self, x: &Matrix) -> Result<Vec<Label>> {
        self.model.predict(x)
    }
}

/// Granulates when the variant needs it, then fits.
pub fn train_pipeline(
    data: &Dataset,
    hp: &HyperParams,
    variant: Variant,
    kind: KernelKind,
    seed: u64,
    cfg: &SolverConfig,
) -> Result<TrainedModel> {
    if !data.has_both_classes() {
        return Err(Error::SingleClass);
    }
    hp.validate()?;
    let kernel = kind.with_sigma(hp.sigma)?;
    let ridge = cfg.ridge;

    let (model, n_balls, converged) = match variant {
        Variant::Lstsvm => {
            let model = match kernel {
                Kernel::Linear => {
                    let (a, b) = data.class_matrices();
                    Model::Linear(fit_lstsvm(&a, &b, hp.c1, hp.c2, ridge)?)
                }
                // kernel LSTSVM: every training point is a zero-radius ball
                Kernel::Gaussian { .. } => Model::Kernel(fit_gblstsvm_kernel(
                    &BallSet::singletons(data),
                    hp.c1,
                    hp.c2,
                    kernel,
                    ridge,
                )?),
            };
            (model, data.len(), true)
        }
        Variant::Gblstsvm => {
            let bs = generate_balls(data, hp.pur, hp.num, seed)?;
            let model = match kernel {
                Kernel::Linear => Model::Linear(fit_gblstsvm_linear(&bs, hp.c1, hp.c2, ridge)?),
                Kernel::Gaussian { .. } => Model::Kernel(fit_gblstsvm_kernel(&bs, hp.c1, hp.c2, kernel, ridge)?),
            };
            (model, bs.len(), true)
        }
        Variant::Lsgblstsvm => {
            let bs = generate_balls(data, hp.pur, hp.num, seed)?;
            let c = LsConstants {
                c1: hp.c1,
                c2: hp.c2,
                c3: hp.c3,
                c4: hp.c4,
            };
            let (model, dual) = match kernel {
                Kernel::Linear => {
                    let (p, d) = fit_lsgblstsvm_linear(&bs, &c, cfg)?;
                    (Model::Linear(p), d)
                }
                Kernel::Gaussian { .. } => {
                    let (p, d) = fit_lsgblstsvm_kernel(&bs, &c, kernel, cfg)?;
                    (Model::Kernel(p), d)
                }
            };
            (model, bs.len(), dual.converged)
        }
    };
    Ok(TrainedModel {
        variant,
        kernel,
        hyper: *hp,
        n_balls,
        converged,
        model,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::granular::GranularBall;
    use approx::assert_abs_diff_eq;

    fn one_d_balls(r: f64) -> BallSet {
        let ball = |x: f64, label| GranularBall {
            center: vec![x],
            radius: r,
            label,
            size: 1,
            purity: 1.0,
            members: vec![0],
        };
        BallSet::from_balls(vec![ball(1.0, Label::Pos), ball(-1.0, Label::Neg)], 1).unwrap()
    }

    #[test]
    fn classify_hand_examples() {
        let p = PlanePair {
            w1: vec![0.5],
            b1: -0.5,
            w2: vec![0.5],
            b2: 0.5,
        };
        let (d1, d2) = p.distances(&[2.0]).unwrap();
        assert_abs_diff_eq!(d1, 1.0);
        assert_abs_diff_eq!(d2, 3.0);
        assert_eq!(p.classify(&[2.0]).unwrap(), Label::Pos);
        assert_eq!(p.classify(&[-2.0]).unwrap(), Label::Neg);
        assert_eq!(p.classify(&[0.0]).unwrap(), Label::Pos);
        assert!(p.classify(&[0.0, 1.0]).is_err());
    }

    #[test]
    fn degenerate_plane_uses_bias() {
        let p = PlanePair {
            w1: vec![0.0],
            b1: 0.2,
            w2: vec![1.0],
            b2: 0.0,
        };
        assert_eq!(p.distances(&[5.0]).unwrap(), (0.2, 5.0));
    }

    #[test]
    fn missing_class_is_an_error() {
        let ball = GranularBall {
            center: vec![1.0],
            radius: 0.0,
            label: Label::Pos,
            size: 1,
            purity: 1.0,
            members: vec![0],
        };
        let bs = BallSet::from_balls(vec![ball], 1).unwrap();
        assert_eq!(fit_gblstsvm_linear(&bs, 1.0, 1.0, 1e-8), Err(Error::MissingClass(-1)));
        let c = LsConstants {
            c1: 1.0,
            c2: 1.0,
            c3: 1.0,
            c4: 1.0,
        };
        assert!(fit_lsgblstsvm_linear(&bs, &c, &SolverConfig::default()).is_err());
    }

    #[test]
    fn lsgblstsvm_dense_dual_of_one_d_example() {
        let c = LsConstants {
            c1: 1.0,
            c2: 1.0,
            c3: 1.0,
            c4: 1.0,
        };
        let (p1, p2) = ls_dual_problems(&one_d_balls(0.0), &c, Kernel::Linear).unwrap();
        assert_eq!(p1.q(), &Matrix::from_rows(&[[3.0, 0.0], [0.0, 3.0]]).unwrap());
        assert_eq!(p1.b(), &[0.0, 1.0]);
        assert_eq!(p2.q(), &Matrix::from_rows(&[[3.0, 0.0], [0.0, 3.0]]).unwrap());
    }

    #[test]
    fn rejects_non_positive_constants() {
        assert!(fit_gblstsvm_linear(&one_d_balls(0.0), 0.0, 1.0, 1e-8).is_err());
        let c = LsConstants {
            c1: 1.0,
            c2: 1.0,
            c3: -1.0,
            c4: 1.0,
        };
        assert!(fit_lsgblstsvm_linear(&one_d_balls(0.0), &c, &SolverConfig::default()).is_err());
    }
}
