//! Granular-ball least-squares twin support vector machines.
//!
//! This crate is the algorithmic core: dataset synthesis and resampling,
//! granular-ball covering, kernels, the dense linear and coordinate-ascent
//! solvers, the three twin-plane trainers (LSTSVM, GBLSTSVM, LS-GBLSTSVM)
//! and the multi-dataset comparison statistics. It is `no_std` and only
//! needs `alloc`; file formats, timing and the command line live in the
//! `gbtwin` crate.

#![no_std]
// `!(x > 0.0)` is used on purpose so NaN fails the check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod dataset;
pub mod error;
pub mod eval;
pub mod granular;
pub mod kernel;
pub mod linalg;
pub mod models;
pub mod solver;

mod math;

pub use dataset::{Dataset, Label, NormParams};
pub use error::{Error, Result};
pub use eval::{AccuracyTable, GridSpec, HyperParams};
pub use granular::{BallSet, GranularBall};
pub use kernel::{Kernel, KernelKind};
pub use linalg::Matrix;
pub use models::{KernelPlanePair, Model, PlanePair, TrainedModel, Variant};
pub use solver::{QpProblem, QpSolution, SolverConfig};

/// Derives an independent child seed from `seed` and `salt`.
pub fn derive_seed(seed: u64, salt: u64) -> u64 {
    math::mix_seed(seed, salt)
}
