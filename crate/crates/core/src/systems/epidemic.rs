//! `u_t = Δu − f(u) + ∫∫K(y)g(u(t − r, x − y))·K₂ …`, where the infective
//! population enters through `K₂(w) = ∫₀^w e^{−α(w−r)} P(dr)`.

use serde::{Deserialize, Serialize};

use super::{interior_sup, SystemError};
use crate::charspec::CharParams;
use crate::kernels::{SpatialKernel, SpatioTemporalKernel, TemporalKernel};
use crate::model::WaveModel;
use crate::nonlinearity::{Nonlinearity, ReactionTerm};
use crate::wavesolve::{build_k2, fixed_point_solve, Init, Profile, SolveOutcome, SolverConfig};

/// Latency law `P` on `[0, ∞)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ExposureLaw {
    PointMass { tau: f64 },
    Exponential { rate: f64 },
    Mixture { components: Vec<WeightedExposure> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightedExposure {
    pub weight: f64,
    pub law: ExposureLaw,
}

impl ExposureLaw {
    /// Flattened `(weight, atom-or-exponential)` list.
    fn components(&self) -> Vec<(f64, ExposureLaw)> {
        match self {
            ExposureLaw::Mixture { components } => components
                .iter()
                .flat_map(|c| c.law.components().into_iter().map(move |(w, l)| (w * c.weight, l)))
                .collect(),
            other => vec![(1.0, other.clone())],
        }
    }

    pub fn validate(&self) -> Result<(), SystemError> {
        match self {
            ExposureLaw::PointMass { tau } if !(tau.is_finite() && *tau >= 0.0) => {
                Err(SystemError::InvalidModel(format!("latency tau = {tau} must be >= 0")))
            }
            ExposureLaw::Exponential { rate } if !(rate.is_finite() && *rate > 0.0) => Err(SystemError::InvalidModel(
                format!("latency rate = {rate} must be positive"),
            )),
            ExposureLaw::Mixture { components } => {
                if components.is_empty() || components.iter().any(|c| !(c.weight >= 0.0)) {
                    return Err(SystemError::InvalidModel("mixture weights must be nonnegative".into()));
                }
                let total: f64 = components.iter().map(|c| c.weight).sum();
                if (total - 1.0).abs() > 1e-10 {
                    return Err(SystemError::InvalidModel(format!("mixture weights sum to {total}")));
                }
                components.iter().try_for_each(|c| c.law.validate())
            }
            _ => Ok(()),
        }
    }

    /// `∫ e^{−xr} P(dr)`, infinite where it diverges.
    pub fn transform(&self, x: f64) -> f64 {
        self.components()
            .iter()
            .map(|(w, l)| match *l {
                ExposureLaw::PointMass { tau } => w * (-x * tau).exp(),
                ExposureLaw::Exponential { rate } => {
                    if rate + x > 0.0 {
                        w * rate / (rate + x)
                    } else {
                        f64::INFINITY
                    }
                }
                ExposureLaw::Mixture { .. } => unreachable!("components are flattened"),
            })
            .sum()
    }

    /// `P` as temporal kernels.
    pub fn as_temporal(&self) -> Vec<(f64, TemporalKernel)> {
        self.components()
            .into_iter()
            .map(|(w, l)| match l {
                ExposureLaw::PointMass { tau } => (w, TemporalKernel::PointMass { h: tau }),
                ExposureLaw::Exponential { rate } => (w, TemporalKernel::Exponential { rate, delay: 0.0 }),
                ExposureLaw::Mixture { .. } => unreachable!("components are flattened"),
            })
            .collect()
    }
}

/// `αK₂` as a mixture of probability densities on `[0, ∞)`: a point mass at
/// `τ` gives an exponential delayed by `τ`, an exponential latency with rate
/// `ρ` a two-stage law with rates `α` and `ρ`.
pub fn epidemic_k2(p: &ExposureLaw, alpha: f64) -> Vec<(f64, TemporalKernel)> {
    p.as_temporal()
        .into_iter()
        .map(|(w, t)| {
            let k = match t {
                TemporalKernel::PointMass { h } => TemporalKernel::Exponential { rate: alpha, delay: h },
                TemporalKernel::Exponential { rate, .. } => TemporalKernel::Hypoexponential {
                    first_rate: alpha,
                    second_rate: rate,
                    delay: 0.0,
                },
                other => other,
            };
            (w, k)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EpidemicModel {
    pub alpha: f64,
    pub latency: ExposureLaw,
    pub spatial: SpatialKernel,
    pub f: ReactionTerm,
    pub g: Nonlinearity,
    pub lipschitz: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CharVariant {
    Chi0,
    ChiL,
}

impl EpidemicModel {
    pub fn validate(&self) -> Result<(), SystemError> {
        if !(self.alpha.is_finite() && self.alpha > 0.0) {
            return Err(SystemError::InvalidModel(format!(
                "alpha = {} must be positive",
                self.alpha
            )));
        }
        self.latency.validate()?;
        self.spatial.validate()?;
        Ok(())
    }

    /// `K̄(w, u) = αK(u)K₂(w)`.
    pub fn induced_kernel(&self) -> SpatioTemporalKernel {
        let parts: Vec<(f64, SpatioTemporalKernel)> = epidemic_k2(&self.latency, self.alpha)
            .into_iter()
            .map(|(w, t)| (w, SpatioTemporalKernel::product(t, self.spatial)))
            .collect();
        if parts.len() == 1 {
            parts.into_iter().next().map(|(_, k)| k).unwrap()
        } else {
            SpatioTemporalKernel::Mixture {
                components: parts
                    .into_iter()
                    .map(|(weight, kernel)| crate::kernels::MixtureComponent { weight, kernel })
                    .collect(),
            }
        }
    }

    /// The scalar problem with birth `g/α`, Lipschitz bound `L/α` and kernel `K̄`.
    pub fn effective_model(&self) -> Result<WaveModel, SystemError> {
        self.validate()?;
        Ok(WaveModel::new(
            self.f.clone(),
            Nonlinearity::Scaled {
                factor: 1.0 / self.alpha,
                inner: Box::new(self.g.clone()),
            },
            self.lipschitz / self.alpha,
            self.induced_kernel(),
        )?)
    }

    /// Upper end of the `z`-domain of the characteristic function at `c`.
    pub fn abscissa(&self, c: f64) -> f64 {
        let mut a = self.spatial.abscissa();
        if c < 0.0 {
            a = a.min(self.alpha / -c);
            for (_, l) in self.latency.components() {
                if let ExposureLaw::Exponential { rate } = l {
                    a = a.min(rate / -c);
                }
            }
        }
        a
    }
}

/// `z² − cz − q + p·P̂(zc)·K̂(z)/(cz + α)`.
pub fn epidemic_charfun(model: &EpidemicModel, z: f64, c: f64, variant: CharVariant) -> Result<f64, SystemError> {
    let denom = c * z + model.alpha;
    if denom <= 0.0 {
        return Err(SystemError::DenominatorNonPositive { value: denom });
    }
    let (p, q) = match variant {
        CharVariant::Chi0 => (model.g.slope_at_zero(), model.f.slope_at_zero()),
        CharVariant::ChiL => (model.lipschitz, model.f.inf_derivative()),
    };
    let m = model.latency.transform(z * c) * model.spatial.moment(z);
    Ok(if m.is_finite() {
        z * z - c * z - q + p * m / denom
    } else {
        f64::INFINITY
    })
}

/// The induced characteristic parameters, for comparison with [`epidemic_charfun`].
pub fn induced_params(model: &EpidemicModel, variant: CharVariant) -> CharParams {
    let eff = WaveModel {
        f: model.f.clone(),
        g: Nonlinearity::Scaled {
            factor: 1.0 / model.alpha,
            inner: Box::new(model.g.clone()),
        },
        lipschitz: model.lipschitz / model.alpha,
        kernel: model.induced_kernel(),
    };
    match variant {
        CharVariant::Chi0 => CharParams::chi0(&eff),
        CharVariant::ChiL => CharParams::chi_l(&eff),
    }
}

fn projected_convolution(
    parts: &[(f64, TemporalKernel)],
    phi: &Profile,
    g: &Nonlinearity,
    c: f64,
) -> Result<Vec<f64>, SystemError> {
    let point = SpatialKernel::PointMass { a: 0.0 };
    let kernel = SpatioTemporalKernel::Mixture {
        components: parts
            .iter()
            .map(|(w, t)| crate::kernels::MixtureComponent {
                weight: *w,
                kernel: SpatioTemporalKernel::product(*t, point),
            })
            .collect(),
    };
    let k = build_k2(&kernel, c, phi.grid.h)?;
    let (pl, pr) = k.pads();
    let gy: Vec<f64> = phi.extended(pl, pr).into_iter().map(|v| g.eval(v)).collect();
    Ok(k.convolve_extended(&gy, pl, phi.values.len()))
}

/// `ψ(t) = ∫₀^∞ g(φ(t − cw))K₂(w)dw`, or `g(φ)/α` when `c = 0`.
pub fn epidemic_reconstruct(model: &EpidemicModel, phi: &Profile, c: f64) -> Result<Profile, SystemError> {
    let alpha = model.alpha;
    let values = if c == 0.0 {
        phi.values.iter().map(|v| model.g.eval(*v) / alpha).collect()
    } else {
        projected_convolution(&epidemic_k2(&model.latency, alpha), phi, &model.g, c)?
            .into_iter()
            .map(|v| v / alpha)
            .collect()
    };
    let mut psi = Profile::new(phi.grid, values, c).with_left(phi.left);
    psi.right_value = model.g.eval(phi.right_value) / alpha;
    Ok(psi)
}

/// Sup of `|cψ' + αψ − ∫g(φ(t − cs))P(ds)|` by central differences, away
/// from the window edges.
pub fn epidemic_residual(model: &EpidemicModel, phi: &Profile, psi: &Profile, c: f64) -> Result<f64, SystemError> {
    let h = phi.grid.h;
    let source = projected_convolution(&model.latency.as_temporal(), phi, &model.g, c)?;
    let v = &psi.values;
    let n = v.len();
    if n < 3 {
        return Ok(0.0);
    }
    let field: Vec<f64> = (1..n - 1)
        .map(|i| c * (v[i + 1] - v[i - 1]) / (2.0 * h) + model.alpha * v[i] - source[i])
        .collect();
    Ok(interior_sup(&field, 5))
}

#[derive(Debug, Clone, PartialEq)]
pub struct EpidemicRun {
    pub outcome: SolveOutcome,
    pub psi: Option<Profile>,
    pub residual_psi: Option<f64>,
}

pub fn epidemic_solve(
    model: &EpidemicModel,
    c: f64,
    init: Init,
    cfg: &SolverConfig,
) -> Result<EpidemicRun, SystemError> {
    let eff = model.effective_model()?;
    let outcome = fixed_point_solve(&eff, c, init, cfg)?;
    let (psi, residual_psi) = match &outcome {
        SolveOutcome::Converged(phi) => {
            let psi = epidemic_reconstruct(model, phi, c)?;
            let r = epidemic_residual(model, phi, &psi, c)?;
            (Some(psi), Some(r))
        }
        _ => (None, None),
    };
    Ok(EpidemicRun {
        outcome,
        psi,
        residual_psi,
    })
}
