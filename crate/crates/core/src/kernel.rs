//! Linear and Gaussian kernels and rectangular Gram matrices.

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::math;

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "kind", rename_all = "lowercase"))]
pub enum Kernel {
    Linear,
    /// `exp(−‖x − y‖² / (2σ²))`
    Gaussian {
        sigma: f64,
    },
}

/// Kernel family without its width, for grids that sweep σ separately.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum KernelKind {
    Linear,
    Gaussian,
}

impl KernelKind {
    pub fn with_sigma(self, sigma: f64) -> Result<Kernel> {
        match self {
            KernelKind::Linear => Ok(Kernel::Linear),
            KernelKind::Gaussian => Kernel::gaussian(sigma),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            KernelKind::Linear => "linear",
            KernelKind::Gaussian => "gaussian",
        }
    }
}

impl Kernel {
    pub fn kind(&self) -> KernelKind {
        match self {
            Kernel::Linear => KernelKind::Linear,
            Kernel::Gaussian { .. } => KernelKind::Gaussian,
        }
    }

    pub fn gaussian(sigma: f64) -> Result<Kernel> {
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(Error::param("sigma", "Gaussian width must be positive and finite"));
        }
        Ok(Kernel::Gaussian { sigma })
    }

    pub fn name(&self) -> &'static str {
        match self {
            Kernel::Linear => "linear",
            Kernel::Gaussian { .. } => "gaussian",
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            Kernel::Linear => Ok(()),
            Kernel::Gaussian { sigma } => Kernel::gaussian(sigma).map(|_| ()),
        }
    }

    pub fn value(&self, x: &[f64], y: &[f64]) -> Result<f64> {
        if x.len() != y.len() {
            return Err(Error::DimensionMismatch {
                expected: x.len(),
                found: y.len(),
            });
        }
        Ok(self.value_unchecked(x, y))
    }

    #[inline]
    pub(crate) fn value_unchecked(&self, x: &[f64], y: &[f64]) -> f64 {
        match *self {
            Kernel::Linear => math::dot(x, y),
            Kernel::Gaussian { sigma } => math::exp(-math::sq_dist(x, y) / (2.0 * sigma * sigma)),
        }
    }

    /// `K[i][j] = k(x_i, y_j)` for the rows of `x` and `y`.
    pub fn gram(&self, x: &Matrix, y: &Matrix) -> Result<Matrix> {
        if x.ncols() != y.ncols() {
            return Err(Error::DimensionMismatch {
                expected: x.ncols(),
                found: y.ncols(),
            });
        }
        let mut out = Matrix::zeros(x.nrows(), y.nrows());
        match *self {
            Kernel::Linear => {
                for (i, xi) in x.rows().enumerate() {
                    for (o, yj) in out.row_mut(i).iter_mut().zip(y.rows()) {
                        *o = math::dot(xi, yj);
                    }
                }
            }
            Kernel::Gaussian { sigma } => {
                let scale = -1.0 / (2.0 * sigma * sigma);
                let x_sq: alloc::vec::Vec<f64> = x.rows().map(|r| math::dot(r, r)).collect();
                let y_sq: alloc::vec::Vec<f64> = y.rows().map(|r| math::dot(r, r)).collect();
                for (i, xi) in x.rows().enumerate() {
                    let xs = x_sq[i];
                    for ((o, yj), &ys) in out.row_mut(i).iter_mut().zip(y.rows()).zip(&y_sq) {
                        // the expansion can dip below zero by round-off
                        let d2 = (xs + ys - 2.0 * math::dot(xi, yj)).max(0.0);
                        *o = math::exp(d2 * scale);
                    }
                }
            }
        }
        Ok(out)
    }

    /// `k(x, o_j)` for every row `o_j` of `anchors`.
    pub fn row_against(&self, x: &[f64], anchors: &Matrix) -> alloc::vec::Vec<f64> {
        anchors.rows().map(|a| self.value_unchecked(a, x)).collect()
    }
}
