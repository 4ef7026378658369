//! The scalar wave model: death term `f`, birth term `g`, Lipschitz bound
//! `L` and kernel `K`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::kernels::{KernelError, SpatioTemporalKernel};
use crate::nonlinearity::{Nonlinearity, ReactionTerm};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("invalid birth function: {0}")]
    BirthFunction(String),
    #[error("invalid reaction term: {0}")]
    ReactionTerm(String),
    #[error("g'(0) = {g0} must be positive and exceed f'(0) = {f0}")]
    NotMonostable { g0: f64, f0: f64 },
    #[error("Lipschitz constant {lipschitz} is below g'(0) = {g0}")]
    LipschitzBelowSlope { lipschitz: f64, g0: f64 },
    #[error(transparent)]
    Kernel(#[from] KernelError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WaveModel {
    pub f: ReactionTerm,
    pub g: Nonlinearity,
    /// Global Lipschitz constant `L` of `g`.
    pub lipschitz: f64,
    pub kernel: SpatioTemporalKernel,
}

impl WaveModel {
    pub fn new(
        f: ReactionTerm,
        g: Nonlinearity,
        lipschitz: f64,
        kernel: SpatioTemporalKernel,
    ) -> Result<Self, ModelError> {
        let m = WaveModel {
            f,
            g,
            lipschitz,
            kernel,
        };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        self.g.validate().map_err(ModelError::BirthFunction)?;
        self.f.validate().map_err(ModelError::ReactionTerm)?;
        self.kernel.validate()?;
        let (g0, f0) = (self.g0(), self.f0());
        if !(g0 > 0.0 && f0 < g0) {
            return Err(ModelError::NotMonostable { g0, f0 });
        }
        if !(self.lipschitz >= g0) {
            return Err(ModelError::LipschitzBelowSlope {
                lipschitz: self.lipschitz,
                g0,
            });
        }
        Ok(())
    }

    pub fn g0(&self) -> f64 {
        self.g.slope_at_zero()
    }

    pub fn f0(&self) -> f64 {
        self.f.slope_at_zero()
    }

    pub fn inf_f_prime(&self) -> f64 {
        self.f.inf_derivative()
    }

    /// Smallest positive root of `g(κ) = f(κ)` on `(0, upper]`, if any.
    pub fn equilibrium(&self, upper: f64) -> Option<f64> {
        let h = |u: f64| self.g.eval(u) - self.f.eval(u);
        let n = 4000;
        let mut prev = upper * 1e-6;
        if h(prev) <= 0.0 {
            return None;
        }
        for i in 1..=n {
            let x = upper * i as f64 / n as f64;
            if x <= prev {
                continue;
            }
            if h(x) <= 0.0 {
                let (mut lo, mut hi) = (prev, x);
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    if h(mid) > 0.0 {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                    if hi - lo <= f64::EPSILON * hi {
                        break;
                    }
                }
                return Some(if h(hi) == 0.0 { hi } else { 0.5 * (lo + hi) });
            }
            prev = x;
        }
        None
    }
}
