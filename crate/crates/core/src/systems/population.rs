//! Mature/immature population model: the mature density solves the scalar
//! wave equation and the immature density is recovered from
//! `Dψ'' − cψ' − γψ + Hφ = 0`, `Hφ = g(φ) − ∫∫K g(φ(t − cs − w))`.

use serde::{Deserialize, Serialize};

use super::{interior_sup, SystemError};
use crate::kernels::SpatioTemporalKernel;
use crate::model::WaveModel;
use crate::nonlinearity::{Nonlinearity, ReactionTerm};
use crate::wavesolve::{build_k2, ExpGreen, Profile};

/// Negative values above this are treated as round-off and clamped to 0.
pub const CLAMP_BAND: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PopulationModel {
    pub diffusivity: f64,
    pub decay: f64,
    pub kernel: SpatioTemporalKernel,
    pub f: ReactionTerm,
    pub g: Nonlinearity,
    pub lipschitz: f64,
}

impl PopulationModel {
    pub fn validate(&self) -> Result<(), SystemError> {
        for (name, v) in [("diffusivity", self.diffusivity), ("decay", self.decay)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(SystemError::InvalidModel(format!("{name} = {v} must be positive")));
            }
        }
        Ok(())
    }

    /// The mature equation on its own.
    pub fn wave_model(&self) -> Result<WaveModel, SystemError> {
        self.validate()?;
        Ok(WaveModel::new(
            self.f.clone(),
            self.g.clone(),
            self.lipschitz,
            self.kernel.clone(),
        )?)
    }

    pub fn green(&self, c: f64) -> ExpGreen {
        ExpGreen::for_operator(c, self.diffusivity, self.decay)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Reconstruction {
    pub psi: Profile,
    pub h_phi: Vec<f64>,
    /// Values in `(−CLAMP_BAND, 0)` set to 0.
    pub clamped: usize,
    /// Grid points with `ψ ≤ −CLAMP_BAND`, and the smallest such value.
    pub negative: usize,
    pub most_negative: f64,
    pub residual: f64,
}

pub fn population_reconstruct(model: &PopulationModel, phi: &Profile, c: f64) -> Result<Reconstruction, SystemError> {
    model.validate()?;
    let n = phi.values.len();
    let h = phi.grid.h;
    let k2 = build_k2(&model.kernel, c, h)?;
    let (pl, pr) = k2.pads();
    let gy: Vec<f64> = phi.extended(pl, pr).into_iter().map(|v| model.g.eval(v)).collect();
    let conv = k2.convolve_extended(&gy, pl, n);
    let h_phi: Vec<f64> = (0..n).map(|i| gy[pl + i] - conv[i]).collect();

    let green = model.green(c);
    let mut values = green.stepper(h).convolve(&h_phi, phi.left, 0.0);
    let (mut clamped, mut negative, mut most_negative) = (0, 0, 0.0f64);
    for v in values.iter_mut() {
        if *v < 0.0 {
            if *v > -CLAMP_BAND {
                *v = 0.0;
                clamped += 1;
            } else {
                negative += 1;
                most_negative = most_negative.min(*v);
            }
        }
    }
    let mut psi = Profile::new(phi.grid, values, c).with_left(phi.left);
    psi.right_value = 0.0;

    let (d, gamma) = (model.diffusivity, model.decay);
    let v = &psi.values;
    let field: Vec<f64> = (1..n.saturating_sub(1))
        .map(|i| {
            let d2 = (v[i + 1] - 2.0 * v[i] + v[i - 1]) / (h * h);
            let d1 = (v[i + 1] - v[i - 1]) / (2.0 * h);
            d * d2 - c * d1 - gamma * v[i] + h_phi[i]
        })
        .collect();
    Ok(Reconstruction {
        residual: interior_sup(&field, 5),
        psi,
        h_phi,
        clamped,
        negative,
        most_negative,
    })
}
