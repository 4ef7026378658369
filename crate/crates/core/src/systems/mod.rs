//! The epidemic and mature/immature population systems, reduced to the
//! scalar wave equation plus a reconstruction of the second component.

pub mod epidemic;
pub mod population;

use thiserror::Error;

use crate::kernels::KernelError;
use crate::model::ModelError;
use crate::wavesolve::SolveError;

pub use epidemic::{
    epidemic_charfun, epidemic_k2, epidemic_reconstruct, epidemic_solve, CharVariant, EpidemicModel, EpidemicRun,
    ExposureLaw,
};
pub use population::{population_reconstruct, PopulationModel, Reconstruction};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SystemError {
    #[error("c z + alpha = {value} is not positive")]
    DenominatorNonPositive { value: f64 },
    #[error("invalid system parameters: {0}")]
    InvalidModel(String),
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Sup of `|r|` over `field[margin .. len − margin]`.
pub(crate) fn interior_sup(field: &[f64], margin: usize) -> f64 {
    if field.len() <= 2 * margin {
        return 0.0;
    }
    field[margin..field.len() - margin]
        .iter()
        .fold(0.0, |m, r| m.max(r.abs()))
}
