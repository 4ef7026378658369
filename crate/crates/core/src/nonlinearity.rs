//! Birth functions `g` and death functions `f` from a fixed catalogue.

use serde::{Deserialize, Serialize};

/// Birth function `g` with `g(0) = 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Nonlinearity {
    /// `slope · u`
    Linear { slope: f64 },
    /// `p u / (1 + u)`
    Saturating { p: f64 },
    /// `p u / (1 + u^k)`, `k ≥ 1`
    MackeyGlass { p: f64, k: f64 },
    /// `p u e^{-a u}`
    Ricker { p: f64, a: f64 },
    /// `coefficient · u^exponent`, `exponent ≥ 1`
    Power { coefficient: f64, exponent: f64 },
    /// `factor · inner(u)`
    Scaled { factor: f64, inner: Box<Nonlinearity> },
}

/// Death function `f` with `f(0) = 0`, increasing on `[0, ∞)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ReactionTerm {
    /// `rate · s`
    Linear { rate: f64 },
    /// `rate · s + quadratic · s²`
    LinearQuadratic { rate: f64, quadratic: f64 },
    /// `rate · s / (1 + s / k)`
    Saturating { rate: f64, k: f64 },
}

fn check(name: &str, ok: bool, v: f64) -> Result<(), String> {
    if ok && v.is_finite() {
        Ok(())
    } else {
        Err(format!("{name} out of range: {v}"))
    }
}

impl Nonlinearity {
    pub fn validate(&self) -> Result<(), String> {
        match self {
            Nonlinearity::Linear { slope } => check("slope", *slope > 0.0, *slope),
            Nonlinearity::Saturating { p } => check("p", *p > 0.0, *p),
            Nonlinearity::MackeyGlass { p, k } => {
                check("p", *p > 0.0, *p)?;
                check("k", *k >= 1.0, *k)
            }
            Nonlinearity::Ricker { p, a } => {
                check("p", *p > 0.0, *p)?;
                check("a", *a > 0.0, *a)
            }
            Nonlinearity::Power { coefficient, exponent } => {
                check("coefficient", *coefficient > 0.0, *coefficient)?;
                check("exponent", *exponent >= 1.0, *exponent)
            }
            Nonlinearity::Scaled { factor, inner } => {
                check("factor", *factor > 0.0, *factor)?;
                inner.validate()
            }
        }
    }

    pub fn eval(&self, u: f64) -> f64 {
        match self {
            Nonlinearity::Linear { slope } => slope * u,
            Nonlinearity::Saturating { p } => p * u / (1.0 + u),
            Nonlinearity::MackeyGlass { p, k } => p * u / (1.0 + u.max(0.0).powf(*k)),
            Nonlinearity::Ricker { p, a } => p * u * (-a * u).exp(),
            Nonlinearity::Power { coefficient, exponent } => coefficient * u.max(0.0).powf(*exponent),
            Nonlinearity::Scaled { factor, inner } => factor * inner.eval(u),
        }
    }

    pub fn derivative(&self, u: f64) -> f64 {
        match self {
            Nonlinearity::Linear { slope } => *slope,
            Nonlinearity::Saturating { p } => p / ((1.0 + u) * (1.0 + u)),
            Nonlinearity::MackeyGlass { p, k } => {
                let uk = u.max(0.0).powf(*k);
                p * (1.0 + (1.0 - k) * uk) / ((1.0 + uk) * (1.0 + uk))
            }
            Nonlinearity::Ricker { p, a } => p * (-a * u).exp() * (1.0 - a * u),
            Nonlinearity::Power { coefficient, exponent } => {
                if *exponent == 1.0 {
                    *coefficient
                } else {
                    coefficient * exponent * u.max(0.0).powf(exponent - 1.0)
                }
            }
            Nonlinearity::Scaled { factor, inner } => factor * inner.derivative(u),
        }
    }

    pub fn slope_at_zero(&self) -> f64 {
        self.derivative(0.0)
    }

    /// Whether `g` is nondecreasing on `[0, ∞)`.
    pub fn is_monotone(&self) -> bool {
        match self {
            Nonlinearity::Linear { .. } | Nonlinearity::Saturating { .. } | Nonlinearity::Power { .. } => true,
            Nonlinearity::MackeyGlass { k, .. } => *k <= 1.0,
            Nonlinearity::Ricker { .. } => false,
            Nonlinearity::Scaled { inner, .. } => inner.is_monotone(),
        }
    }

    /// `sup |g'|` on `[0, m]`, sampled on a fine grid.
    pub fn lipschitz_on(&self, m: f64) -> f64 {
        let n = 10_000;
        (0..=n)
            .map(|i| self.derivative(m * i as f64 / n as f64).abs())
            .fold(0.0, f64::max)
    }
}

impl ReactionTerm {
    pub fn validate(&self) -> Result<(), String> {
        match self {
            ReactionTerm::Linear { rate } => check("rate", *rate >= 0.0, *rate),
            ReactionTerm::LinearQuadratic { rate, quadratic } => {
                check("rate", *rate >= 0.0, *rate)?;
                check("quadratic", *quadratic >= 0.0, *quadratic)
            }
            ReactionTerm::Saturating { rate, k } => {
                check("rate", *rate >= 0.0, *rate)?;
                check("k", *k > 0.0, *k)
            }
        }
    }

    pub fn eval(&self, s: f64) -> f64 {
        match self {
            ReactionTerm::Linear { rate } => rate * s,
            ReactionTerm::LinearQuadratic { rate, quadratic } => rate * s + quadratic * s * s,
            ReactionTerm::Saturating { rate, k } => rate * s / (1.0 + s / k),
        }
    }

    pub fn derivative(&self, s: f64) -> f64 {
        match self {
            ReactionTerm::Linear { rate } => *rate,
            ReactionTerm::LinearQuadratic { rate, quadratic } => rate + 2.0 * quadratic * s,
            ReactionTerm::Saturating { rate, k } => {
                let d = 1.0 + s / k;
                rate / (d * d)
            }
        }
    }

    pub fn slope_at_zero(&self) -> f64 {
        self.derivative(0.0)
    }

    /// `inf_{s ≥ 0} f'(s)`.
    pub fn inf_derivative(&self) -> f64 {
        match self {
            ReactionTerm::Linear { rate } | ReactionTerm::LinearQuadratic { rate, .. } => *rate,
            ReactionTerm::Saturating { .. } => 0.0,
        }
    }
}
