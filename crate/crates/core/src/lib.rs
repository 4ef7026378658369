//! Numerical toolkit for semi-wavefronts of monostable non-local delayed
//! reaction-diffusion equations.

pub mod charspec;
pub mod extended;
pub mod io;
pub mod kernels;
pub mod model;
pub mod nonlinearity;
pub mod quadrature;
pub mod systems;
pub mod wavesolve;

pub use charspec::{CharParams, CharReport, RootPair, Verdict};
pub use kernels::{SpatialKernel, SpatioTemporalKernel, TemporalKernel};
pub use model::WaveModel;
pub use nonlinearity::{Nonlinearity, ReactionTerm};
