//! Normalized spatio-temporal kernels `K(s, w)` on `[0, ∞) × ℝ`.
//!
//! Every family here has closed-form exponential moments, so the moment,
//! its `z`-derivative and the convergence abscissa are exact. A second,
//! quadrature-based evaluation path integrates the densities directly and
//! is used to cross-check the closed forms and to probe abscissae
//! numerically.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::quadrature::{
    integrate_from_neg_infinity, integrate_real_line, integrate_to_infinity, QuadError, QuadOptions,
};

/// Tolerance on the total mass of a valid kernel.
pub const MASS_TOLERANCE: f64 = 1e-10;

/// Half-width (relative to `max(1, γ#)`) of the band around a finite
/// abscissa inside which moments are refused.
pub const BOUNDARY_BAND: f64 = 1e-9;

/// Mass left outside the truncated support used for discretization.
pub const SUPPORT_EPS: f64 = 1e-17;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum KernelError {
    #[error("ill-formed kernel: {0}")]
    IllFormed(String),
    #[error("z = {z} is within the boundary band of the convergence abscissa {abscissa}")]
    AbscissaBoundary { z: f64, abscissa: f64 },
    #[error("decay rate must be a non-negative number, got {0}")]
    NegativeRate(f64),
    #[error("quadrature failed: {0}")]
    Quadrature(#[from] QuadError),
}

/// Which half-line a one-sided exponential lives on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    /// Support `w ≥ 0`.
    Positive,
    /// Support `w ≤ 0`.
    Negative,
}

/// A probability distribution on the spatial axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SpatialKernel {
    Gaussian {
        variance: f64,
        #[serde(default)]
        mean: f64,
    },
    /// Laplace density `(λ/2) e^{-λ|w|}`.
    TwoSidedExponential {
        rate: f64,
    },
    PointMass {
        #[serde(default)]
        a: f64,
    },
    OneSidedExponential {
        rate: f64,
        side: Side,
    },
}

/// A probability distribution of delays on `[0, ∞)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum TemporalKernel {
    PointMass {
        h: f64,
    },
    /// `rate · e^{-rate (s - delay)}` for `s ≥ delay`.
    Exponential {
        rate: f64,
        #[serde(default)]
        delay: f64,
    },
    /// Sum of two independent exponential stages, shifted by `delay`.
    Hypoexponential {
        first_rate: f64,
        second_rate: f64,
        #[serde(default)]
        delay: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MixtureComponent {
    pub weight: f64,
    pub kernel: SpatioTemporalKernel,
}

/// The kernel `K(s, w)` of the non-local term, normalized to unit mass.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum SpatioTemporalKernel {
    /// `δ(s - h) δ(w - a)`.
    PointMass {
        h: f64,
        a: f64,
    },
    /// `δ(s - h) K₀(w)`.
    #[serde(rename = "delta_time")]
    SeparableDeltaTime {
        h: f64,
        spatial: SpatialKernel,
    },
    /// `T(s) K₀(w)`.
    #[serde(rename = "product")]
    SeparableProduct {
        temporal: TemporalKernel,
        spatial: SpatialKernel,
    },
    Mixture {
        components: Vec<MixtureComponent>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentReport {
    pub mass: f64,
    pub mean_time: f64,
    pub mean_space: f64,
}

fn positive(name: &str, v: f64) -> Result<(), KernelError> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(KernelError::IllFormed(format!(
            "{name} must be positive and finite, got {v}"
        )))
    }
}

fn finite(name: &str, v: f64) -> Result<(), KernelError> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(KernelError::IllFormed(format!("{name} must be finite, got {v}")))
    }
}

fn non_negative(name: &str, v: f64) -> Result<(), KernelError> {
    if v.is_finite() && v >= 0.0 {
        Ok(())
    } else {
        Err(KernelError::IllFormed(format!("{name} must be non-negative, got {v}")))
    }
}

impl SpatialKernel {
    pub fn validate(&self) -> Result<(), KernelError> {
        match *self {
            SpatialKernel::Gaussian { variance, mean } => {
                positive("variance", variance)?;
                finite("mean", mean)
            }
            SpatialKernel::TwoSidedExponential { rate } => positive("rate", rate),
            SpatialKernel::PointMass { a } => finite("a", a),
            SpatialKernel::OneSidedExponential { rate, .. } => positive("rate", rate),
        }
    }

    /// Location of the atom, for point masses.
    pub fn atom(&self) -> Option<f64> {
        match *self {
            SpatialKernel::PointMass { a } => Some(a),
            _ => None,
        }
    }

    /// Density of the absolutely continuous families (0 for point masses).
    pub fn density(&self, w: f64) -> f64 {
        match *self {
            SpatialKernel::Gaussian { variance, mean } => {
                let d = w - mean;
                (-d * d / (2.0 * variance)).exp() / (2.0 * std::f64::consts::PI * variance).sqrt()
            }
            SpatialKernel::TwoSidedExponential { rate } => 0.5 * rate * (-rate * w.abs()).exp(),
            SpatialKernel::PointMass { .. } => 0.0,
            SpatialKernel::OneSidedExponential { rate, side } => {
                let u = match side {
                    Side::Positive => w,
                    Side::Negative => -w,
                };
                if u >= 0.0 {
                    rate * (-rate * u).exp()
                } else {
                    0.0
                }
            }
        }
    }

    /// `K₀(w) e^{-zw}`, evaluated as a single exponential so that the two
    /// factors cannot overflow against each other.
    pub fn weighted_density(&self, w: f64, z: f64) -> f64 {
        match *self {
            SpatialKernel::Gaussian { variance, mean } => {
                let d = w - mean;
                (-d * d / (2.0 * variance) - z * w).exp() / (2.0 * std::f64::consts::PI * variance).sqrt()
            }
            SpatialKernel::TwoSidedExponential { rate } => 0.5 * rate * (-rate * w.abs() - z * w).exp(),
            SpatialKernel::PointMass { .. } => 0.0,
            SpatialKernel::OneSidedExponential { rate, side } => {
                let u = match side {
                    Side::Positive => w,
                    Side::Negative => -w,
                };
                if u >= 0.0 {
                    rate * (-rate * u - z * w).exp()
                } else {
                    0.0
                }
            }
        }
    }

    /// `∫ K₀(w) e^{-zw} dw`, `+∞` where it diverges.
    pub fn moment(&self, z: f64) -> f64 {
        match *self {
            SpatialKernel::Gaussian { variance, mean } => (-z * mean + 0.5 * z * z * variance).exp(),
            SpatialKernel::TwoSidedExponential { rate } => {
                if z.abs() < rate {
                    rate * rate / (rate * rate - z * z)
                } else {
                    f64::INFINITY
                }
            }
            SpatialKernel::PointMass { a } => (-z * a).exp(),
            SpatialKernel::OneSidedExponential { rate, side } => match side {
                Side::Positive if z > -rate => rate / (rate + z),
                Side::Negative if z < rate => rate / (rate - z),
                _ => f64::INFINITY,
            },
        }
    }

    pub fn moment_dz(&self, z: f64) -> f64 {
        match *self {
            SpatialKernel::Gaussian { variance, mean } => self.moment(z) * (z * variance - mean),
            SpatialKernel::TwoSidedExponential { rate } => {
                let d = rate * rate - z * z;
                if z.abs() < rate {
                    2.0 * z * rate * rate / (d * d)
                } else {
                    f64::INFINITY
                }
            }
            SpatialKernel::PointMass { a } => -a * (-z * a).exp(),
            SpatialKernel::OneSidedExponential { rate, side } => match side {
                Side::Positive if z > -rate => -rate / ((rate + z) * (rate + z)),
                Side::Negative if z < rate => rate / ((rate - z) * (rate - z)),
                _ => f64::INFINITY,
            },
        }
    }

    /// Supremum of `z ≥ 0` with a finite moment.
    pub fn abscissa(&self) -> f64 {
        match *self {
            SpatialKernel::TwoSidedExponential { rate } => rate,
            SpatialKernel::OneSidedExponential {
                rate,
                side: Side::Negative,
            } => rate,
            _ => f64::INFINITY,
        }
    }

    pub fn mean(&self) -> f64 {
        match *self {
            SpatialKernel::Gaussian { mean, .. } => mean,
            SpatialKernel::TwoSidedExponential { .. } => 0.0,
            SpatialKernel::PointMass { a } => a,
            SpatialKernel::OneSidedExponential { rate, side } => match side {
                Side::Positive => 1.0 / rate,
                Side::Negative => -1.0 / rate,
            },
        }
    }

    /// Points where the density has a kink or jump.
    pub fn breakpoints(&self) -> Vec<f64> {
        match *self {
            SpatialKernel::TwoSidedExponential { .. } | SpatialKernel::OneSidedExponential { .. } => {
                vec![0.0]
            }
            SpatialKernel::PointMass { a } => vec![a],
            SpatialKernel::Gaussian { .. } => vec![],
        }
    }

    /// Interval outside which at most `eps` of the mass lies.
    pub fn support(&self, eps: f64) -> (f64, f64) {
        let l = (1.0 / eps).ln();
        match *self {
            SpatialKernel::Gaussian { variance, mean } => {
                let r = (2.0 * l).sqrt() * variance.sqrt();
                (mean - r, mean + r)
            }
            SpatialKernel::TwoSidedExponential { rate } => (-l / rate, l / rate),
            SpatialKernel::PointMass { a } => (a, a),
            SpatialKernel::OneSidedExponential { rate, side } => match side {
                Side::Positive => (0.0, l / rate),
                Side::Negative => (-l / rate, 0.0),
            },
        }
    }

    /// Characteristic width used to size quadrature windows.
    pub fn scale(&self) -> f64 {
        match *self {
            SpatialKernel::Gaussian { variance, .. } => variance.sqrt(),
            SpatialKernel::TwoSidedExponential { rate } | SpatialKernel::OneSidedExponential { rate, .. } => 1.0 / rate,
            SpatialKernel::PointMass { .. } => 1.0,
        }
    }
}

impl TemporalKernel {
    pub fn validate(&self) -> Result<(), KernelError> {
        match *self {
            TemporalKernel::PointMass { h } => non_negative("h", h),
            TemporalKernel::Exponential { rate, delay } => {
                positive("rate", rate)?;
                non_negative("delay", delay)
            }
            TemporalKernel::Hypoexponential {
                first_rate,
                second_rate,
                delay,
            } => {
                positive("first_rate", first_rate)?;
                positive("second_rate", second_rate)?;
                non_negative("delay", delay)
            }
        }
    }

    pub fn atom(&self) -> Option<f64> {
        match *self {
            TemporalKernel::PointMass { h } => Some(h),
            _ => None,
        }
    }

    pub fn delay(&self) -> f64 {
        match *self {
            TemporalKernel::PointMass { h } => h,
            TemporalKernel::Exponential { delay, .. } | TemporalKernel::Hypoexponential { delay, .. } => delay,
        }
    }

    pub fn density(&self, s: f64) -> f64 {
        match *self {
            TemporalKernel::PointMass { .. } => 0.0,
            TemporalKernel::Exponential { rate, delay } => {
                let u = s - delay;
                if u >= 0.0 {
                    rate * (-rate * u).exp()
                } else {
                    0.0
                }
            }
            TemporalKernel::Hypoexponential {
                first_rate: a,
                second_rate: b,
                delay,
            } => {
                let u = s - delay;
                if u < 0.0 {
                    return 0.0;
                }
                // a b e^{-a u} (1 - e^{-(b-a)u}) / (b - a), stable as b → a
                let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
                let d = hi - lo;
                let stage = if d * u < 1e-300 { u } else { -(-d * u).exp_m1() / d };
                a * b * (-lo * u).exp() * stage
            }
        }
    }

    /// `T(s) e^{-xs}` with the exponentials combined.
    pub fn weighted_density(&self, s: f64, x: f64) -> f64 {
        match *self {
            TemporalKernel::PointMass { .. } => 0.0,
            TemporalKernel::Exponential { rate, delay } => {
                let u = s - delay;
                if u >= 0.0 {
                    rate * (-rate * u - x * s).exp()
                } else {
                    0.0
                }
            }
            TemporalKernel::Hypoexponential {
                first_rate: a,
                second_rate: b,
                delay,
            } => {
                let u = s - delay;
                if u < 0.0 {
                    return 0.0;
                }
                let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
                let d = hi - lo;
                let stage = if d * u < 1e-300 { u } else { -(-d * u).exp_m1() / d };
                a * b * (-lo * u - x * s).exp() * stage
            }
        }
    }

    /// `E[e^{-x S}]` for real `x`; `+∞` where it diverges.
    pub fn transform(&self, x: f64) -> f64 {
        match *self {
            TemporalKernel::PointMass { h } => (-x * h).exp(),
            TemporalKernel::Exponential { rate, delay } => {
                if rate + x > 0.0 {
                    (-x * delay).exp() * rate / (rate + x)
                } else {
                    f64::INFINITY
                }
            }
            TemporalKernel::Hypoexponential {
                first_rate: a,
                second_rate: b,
                delay,
            } => {
                if a.min(b) + x > 0.0 {
                    (-x * delay).exp() * a * b / ((a + x) * (b + x))
                } else {
                    f64::INFINITY
                }
            }
        }
    }

    pub fn transform_dx(&self, x: f64) -> f64 {
        let t = self.transform(x);
        if !t.is_finite() {
            return f64::INFINITY;
        }
        match *self {
            TemporalKernel::PointMass { h } => -h * t,
            TemporalKernel::Exponential { rate, delay } => t * (-delay - 1.0 / (rate + x)),
            TemporalKernel::Hypoexponential {
                first_rate: a,
                second_rate: b,
                delay,
            } => t * (-delay - 1.0 / (a + x) - 1.0 / (b + x)),
        }
    }

    /// Infimum of `x` for which the transform is finite.
    pub fn transform_lower_bound(&self) -> f64 {
        match *self {
            TemporalKernel::PointMass { .. } => f64::NEG_INFINITY,
            TemporalKernel::Exponential { rate, .. } => -rate,
            TemporalKernel::Hypoexponential {
                first_rate,
                second_rate,
                ..
            } => -first_rate.min(second_rate),
        }
    }

    pub fn mean(&self) -> f64 {
        match *self {
            TemporalKernel::PointMass { h } => h,
            TemporalKernel::Exponential { rate, delay } => delay + 1.0 / rate,
            TemporalKernel::Hypoexponential {
                first_rate,
                second_rate,
                delay,
            } => delay + 1.0 / first_rate + 1.0 / second_rate,
        }
    }

    pub fn support(&self, eps: f64) -> (f64, f64) {
        let l = (1.0 / eps).ln();
        match *self {
            TemporalKernel::PointMass { h } => (h, h),
            TemporalKernel::Exponential { rate, delay } => (delay, delay + l / rate),
            TemporalKernel::Hypoexponential {
                first_rate,
                second_rate,
                delay,
            } => {
                let slow = first_rate.min(second_rate);
                // the two-stage tail carries an extra polynomial factor
                (delay, delay + (l + 2.0 * (1.0 + l).ln()) / slow)
            }
        }
    }

    pub fn scale(&self) -> f64 {
        match *self {
            TemporalKernel::PointMass { .. } => 1.0,
            TemporalKernel::Exponential { rate, .. } => 1.0 / rate,
            TemporalKernel::Hypoexponential {
                first_rate,
                second_rate,
                ..
            } => 1.0 / first_rate + 1.0 / second_rate,
        }
    }
}

impl SpatioTemporalKernel {
    pub fn point_mass(h: f64, a: f64) -> Self {
        SpatioTemporalKernel::PointMass { h, a }
    }

    pub fn delta_time(h: f64, spatial: SpatialKernel) -> Self {
        SpatioTemporalKernel::SeparableDeltaTime { h, spatial }
    }

    pub fn product(temporal: TemporalKernel, spatial: SpatialKernel) -> Self {
        SpatioTemporalKernel::SeparableProduct { temporal, spatial }
    }

    /// Builds a mixture, rejecting negative weights and weights that do not
    /// sum to one.
    pub fn mixture(parts: Vec<(f64, SpatioTemporalKernel)>) -> Result<Self, KernelError> {
        let k = SpatioTemporalKernel::Mixture {
            components: parts
                .into_iter()
                .map(|(weight, kernel)| MixtureComponent { weight, kernel })
                .collect(),
        };
        k.validate()?;
        Ok(k)
    }

    pub fn validate(&self) -> Result<(), KernelError> {
        match self {
            SpatioTemporalKernel::PointMass { h, a } => {
                non_negative("h", *h)?;
                finite("a", *a)
            }
            SpatioTemporalKernel::SeparableDeltaTime { h, spatial } => {
                non_negative("h", *h)?;
                spatial.validate()
            }
            SpatioTemporalKernel::SeparableProduct { temporal, spatial } => {
                temporal.validate()?;
                spatial.validate()
            }
            SpatioTemporalKernel::Mixture { components } => {
                if components.is_empty() {
                    return Err(KernelError::IllFormed("mixture has no components".into()));
                }
                check_weights(components)?;
                let total: f64 = components.iter().map(|c| c.weight).sum();
                if (total - 1.0).abs() > MASS_TOLERANCE {
                    return Err(KernelError::IllFormed(format!(
                        "mixture weights sum to {total}, expected 1"
                    )));
                }
                components.iter().try_for_each(|c| c.kernel.validate())
            }
        }
    }

    /// Closed-form `∫∫ K e^{-z(cs + w)}` without the boundary-band check.
    pub fn moment_unchecked(&self, z: f64, c: f64) -> f64 {
        match self {
            SpatioTemporalKernel::PointMass { h, a } => (-z * (c * h + a)).exp(),
            SpatioTemporalKernel::SeparableDeltaTime { h, spatial } => (-z * c * h).exp() * spatial.moment(z),
            SpatioTemporalKernel::SeparableProduct { temporal, spatial } => {
                let t = temporal.transform(z * c);
                let s = spatial.moment(z);
                if t.is_finite() && s.is_finite() {
                    t * s
                } else {
                    f64::INFINITY
                }
            }
            SpatioTemporalKernel::Mixture { components } => components
                .iter()
                .filter(|c| c.weight > 0.0)
                .map(|comp| comp.weight * comp.kernel.moment_unchecked(z, c))
                .sum(),
        }
    }

    /// `∂/∂z` of the exponential moment.
    pub fn moment_dz(&self, z: f64, c: f64) -> f64 {
        match self {
            SpatioTemporalKernel::PointMass { h, a } => {
                let r = c * h + a;
                -r * (-z * r).exp()
            }
            SpatioTemporalKernel::SeparableDeltaTime { h, spatial } => {
                let e = (-z * c * h).exp();
                e * (spatial.moment_dz(z) - c * h * spatial.moment(z))
            }
            SpatioTemporalKernel::SeparableProduct { temporal, spatial } => {
                let (t, dt) = (temporal.transform(z * c), temporal.transform_dx(z * c));
                let (s, ds) = (spatial.moment(z), spatial.moment_dz(z));
                if [t, dt, s, ds].iter().all(|v| v.is_finite()) {
                    c * dt * s + t * ds
                } else {
                    f64::INFINITY
                }
            }
            SpatioTemporalKernel::Mixture { components } => components
                .iter()
                .filter(|c| c.weight > 0.0)
                .map(|comp| comp.weight * comp.kernel.moment_dz(z, c))
                .sum(),
        }
    }

    /// Convergence abscissa `γ#(c)`.
    pub fn abscissa(&self, c: f64) -> f64 {
        match self {
            SpatioTemporalKernel::PointMass { .. } => f64::INFINITY,
            SpatioTemporalKernel::SeparableDeltaTime { spatial, .. } => spatial.abscissa(),
            SpatioTemporalKernel::SeparableProduct { temporal, spatial } => {
                // temporal factor needs z c > lower bound
                let lb = temporal.transform_lower_bound();
                let t_limit = if c < 0.0 && lb.is_finite() {
                    lb / c
                } else {
                    f64::INFINITY
                };
                spatial.abscissa().min(t_limit)
            }
            SpatioTemporalKernel::Mixture { components } => components
                .iter()
                .filter(|c| c.weight > 0.0)
                .map(|comp| comp.kernel.abscissa(c))
                .fold(f64::INFINITY, f64::min),
        }
    }

    pub fn first_moments(&self) -> MomentReport {
        match self {
            SpatioTemporalKernel::PointMass { h, a } => MomentReport {
                mass: 1.0,
                mean_time: *h,
                mean_space: *a,
            },
            SpatioTemporalKernel::SeparableDeltaTime { h, spatial } => MomentReport {
                mass: 1.0,
                mean_time: *h,
                mean_space: spatial.mean(),
            },
            SpatioTemporalKernel::SeparableProduct { temporal, spatial } => MomentReport {
                mass: 1.0,
                mean_time: temporal.mean(),
                mean_space: spatial.mean(),
            },
            SpatioTemporalKernel::Mixture { components } => components.iter().fold(
                MomentReport {
                    mass: 0.0,
                    mean_time: 0.0,
                    mean_space: 0.0,
                },
                |acc, comp| {
                    let m = comp.kernel.first_moments();
                    MomentReport {
                        mass: acc.mass + comp.weight * m.mass,
                        mean_time: acc.mean_time + comp.weight * m.mean_time,
                        mean_space: acc.mean_space + comp.weight * m.mean_space,
                    }
                },
            ),
        }
    }
}

fn check_weights(components: &[MixtureComponent]) -> Result<(), KernelError> {
    for c in components {
        if !(c.weight.is_finite() && c.weight >= 0.0) {
            return Err(KernelError::IllFormed(format!(
                "mixture weight {} is negative or not finite",
                c.weight
            )));
        }
    }
    Ok(())
}

fn check_rate(z: f64) -> Result<(), KernelError> {
    if z.is_finite() && z >= 0.0 {
        Ok(())
    } else {
        Err(KernelError::NegativeRate(z))
    }
}

/// Total mass `∫₀^∞∫_ℝ K(s, w) dw ds`.
pub fn kernel_mass(k: &SpatioTemporalKernel) -> Result<f64, KernelError> {
    match k {
        SpatioTemporalKernel::Mixture { components } => {
            check_weights(components)?;
            components
                .iter()
                .map(|c| kernel_mass(&c.kernel).map(|m| c.weight * m))
                .sum()
        }
        other => {
            other.validate()?;
            Ok(1.0)
        }
    }
}

/// Exponential moment `∫₀^∞∫_ℝ K(s,w) e^{-z(cs+w)} dw ds`, or `+∞` beyond
/// the convergence abscissa.
pub fn laplace_moment(k: &SpatioTemporalKernel, z: f64, c: f64) -> Result<f64, KernelError> {
    check_rate(z)?;
    let gamma = k.abscissa(c);
    if gamma.is_finite() && (z - gamma).abs() <= BOUNDARY_BAND * gamma.max(1.0) {
        return Err(KernelError::AbscissaBoundary { z, abscissa: gamma });
    }
    if z > gamma {
        return Ok(f64::INFINITY);
    }
    Ok(k.moment_unchecked(z, c))
}

/// Convergence abscissa `γ#(c)` (possibly `+∞`).
pub fn convergence_abscissa(k: &SpatioTemporalKernel, c: f64) -> f64 {
    k.abscissa(c)
}

pub fn first_moments(k: &SpatioTemporalKernel) -> MomentReport {
    k.first_moments()
}

fn spatial_moment_quadrature(s: &SpatialKernel, z: f64, opts: &QuadOptions) -> Result<f64, KernelError> {
    if let Some(a) = s.atom() {
        return Ok((-z * a).exp());
    }
    let f = |w: f64| s.weighted_density(w, z);
    let result = match *s {
        SpatialKernel::OneSidedExponential {
            side: Side::Positive, ..
        } => integrate_to_infinity(f, 0.0, s.scale(), opts),
        SpatialKernel::OneSidedExponential {
            side: Side::Negative, ..
        } => integrate_from_neg_infinity(f, 0.0, s.scale(), opts),
        SpatialKernel::Gaussian { variance, mean } => {
            // integrand peaks at mean - z·variance
            integrate_real_line(f, mean - z * variance, &[], s.scale(), opts)
        }
        _ => integrate_real_line(f, 0.0, &s.breakpoints(), s.scale(), opts),
    };
    finite_or_divergent(result)
}

fn temporal_transform_quadrature(t: &TemporalKernel, x: f64, opts: &QuadOptions) -> Result<f64, KernelError> {
    if let Some(h) = t.atom() {
        return Ok((-x * h).exp());
    }
    let f = |s: f64| t.weighted_density(s, x);
    finite_or_divergent(integrate_to_infinity(f, t.delay(), t.scale(), opts))
}

fn finite_or_divergent(r: Result<crate::quadrature::QuadEstimate, QuadError>) -> Result<f64, KernelError> {
    match r {
        Ok(est) => Ok(est.value),
        Err(QuadError::Divergent { .. }) | Err(QuadError::NonFinite { .. }) => Ok(f64::INFINITY),
        Err(e) => Err(e.into()),
    }
}

/// The exponential moment evaluated by integrating the densities
/// numerically (atoms are sifted). Independent of the closed forms.
pub fn laplace_moment_quadrature(
    k: &SpatioTemporalKernel,
    z: f64,
    c: f64,
    opts: &QuadOptions,
) -> Result<f64, KernelError> {
    check_rate(z)?;
    match k {
        SpatioTemporalKernel::PointMass { h, a } => Ok((-z * (c * h + a)).exp()),
        SpatioTemporalKernel::SeparableDeltaTime { h, spatial } => {
            Ok((-z * c * h).exp() * spatial_moment_quadrature(spatial, z, opts)?)
        }
        SpatioTemporalKernel::SeparableProduct { temporal, spatial } => {
            let t = temporal_transform_quadrature(temporal, z * c, opts)?;
            let s = spatial_moment_quadrature(spatial, z, opts)?;
            Ok(if t.is_finite() && s.is_finite() {
                t * s
            } else {
                f64::INFINITY
            })
        }
        SpatioTemporalKernel::Mixture { components } => {
            let mut total = 0.0;
            for comp in components.iter().filter(|c| c.weight > 0.0) {
                total += comp.weight * laplace_moment_quadrature(&comp.kernel, z, c, opts)?;
            }
            Ok(total)
        }
    }
}

/// Locates `γ#(c)` without the closed forms: doubles `z` until quadrature
/// reports divergence, then bisects. Returns `+∞` if the moment stays
/// finite up to `z_max`.
pub fn probe_abscissa(k: &SpatioTemporalKernel, c: f64, z_max: f64, rel_tol: f64) -> Result<f64, KernelError> {
    let opts = QuadOptions {
        rel_tol: 1e-8,
        abs_tol: 1e-300,
        ..QuadOptions::default()
    };
    // a window that never settles (linear growth at the abscissa itself)
    // counts as divergence here
    let finite_at = |z: f64| -> Result<bool, KernelError> {
        match laplace_moment_quadrature(k, z, c, &opts) {
            Ok(v) => Ok(v.is_finite()),
            Err(KernelError::Quadrature(QuadError::WindowLimit { .. })) => Ok(false),
            Err(e) => Err(e),
        }
    };
    let mut lo = 0.0;
    let mut hi = 0.25;
    while finite_at(hi)? {
        lo = hi;
        hi *= 2.0;
        if hi > z_max {
            return Ok(f64::INFINITY);
        }
    }
    while hi - lo > rel_tol * hi {
        let mid = 0.5 * (lo + hi);
        if finite_at(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}
