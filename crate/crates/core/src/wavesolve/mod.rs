//! The β-shifted convolution reformulation and the profile solver built on it.

pub mod align;
pub mod beta;
pub mod decay;
pub mod green;
pub mod hypotheses;
pub mod profile;
pub mod projected;
pub mod residual;
pub mod solver;

use thiserror::Error;

use crate::charspec::CharError;
use crate::kernels::KernelError;
use crate::model::ModelError;

pub use align::align_translate;
pub use beta::{select_beta, BetaChoice};
pub use decay::decay_rate;
pub use green::{build_k1, ExpGreen, ExpStepper, K1Kernel};
pub use hypotheses::{verify_hypotheses, HypothesisReport};
pub use profile::{Anchor, DecayFit, Grid, LeftTail, Profile};
pub use projected::{build_k2, ProjectedKernel};
pub use residual::residual;
pub use solver::{
    fixed_point_solve, initial_profile, Init, InitPreset, IterationMap, NotConvergedReason, SolveOutcome, SolverConfig,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolveError {
    #[error("decay scale 1/lambda1 = {scale} is below 4h = {}", 4.0 * h)]
    GridTooCoarse { scale: f64, h: f64 },
    #[error("phi(-T) = {left} exceeds 1e-4 * sup = {}", 1e-4 * sup)]
    WindowTooSmall { left: f64, sup: f64 },
    #[error("left tail has {points} usable points, need 20")]
    TailTooShort { points: usize },
    #[error("f' is not finite at s = {s}")]
    NonFiniteDerivative { s: f64 },
    #[error("invalid solver input: {0}")]
    InvalidInput(String),
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error(transparent)]
    Char(#[from] CharError),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// The two atoms of the reformulated equation: `k₁*k₂` acting on `g` and
/// `k₁` acting on `f_β`.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelDecomposition {
    pub k1: K1Kernel,
    pub k2: ProjectedKernel,
}

impl KernelDecomposition {
    pub fn new(model: &crate::WaveModel, c: f64, beta: f64, h: f64) -> Result<Self, SolveError> {
        Ok(KernelDecomposition {
            k1: build_k1(c, beta),
            k2: build_k2(&model.kernel, c, h)?,
        })
    }

    /// Mass of the first atom, `∫k₁ · ∫k₂`.
    pub fn first_atom_mass(&self) -> f64 {
        self.k1.integral() * self.k2.mass()
    }
}
