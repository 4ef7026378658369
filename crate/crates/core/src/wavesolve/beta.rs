//! Choice of the shift rate `β` making `f_β(s) = βs − f(s)` nonnegative.

use serde::{Deserialize, Serialize};

use super::SolveError;
use crate::charspec::mu_of;
use crate::nonlinearity::ReactionTerm;

const SAMPLES: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BetaChoice {
    pub beta: f64,
    pub sup_fprime: f64,
    /// Lipschitz constant `β − inf f'` of `f_β`.
    pub lipschitz_f_beta: f64,
}

fn derivative(f: &ReactionTerm, s: f64) -> Result<f64, SolveError> {
    let d = f.derivative(s);
    if d.is_finite() {
        Ok(d)
    } else {
        Err(SolveError::NonFiniteDerivative { s })
    }
}

/// `sup f'` on `[0, m]` by sampling, refined by golden section around the
/// best sample.
pub fn sup_derivative(f: &ReactionTerm, m: f64) -> Result<f64, SolveError> {
    let step = m / SAMPLES as f64;
    let mut best = (0.0, derivative(f, 0.0)?);
    for i in 1..=SAMPLES {
        let s = if i == SAMPLES { m } else { i as f64 * step };
        let d = derivative(f, s)?;
        if d > best.1 {
            best = (s, d);
        }
    }
    let (mut a, mut b) = ((best.0 - step).max(0.0), (best.0 + step).min(m));
    let r = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..60 {
        let x1 = b - r * (b - a);
        let x2 = a + r * (b - a);
        let (d1, d2) = (derivative(f, x1)?, derivative(f, x2)?);
        best.1 = best.1.max(d1).max(d2);
        if d1 > d2 {
            b = x2;
        } else {
            a = x1;
        }
    }
    Ok(best.1)
}

pub fn select_beta(f: &ReactionTerm, m: f64) -> Result<BetaChoice, SolveError> {
    if !(m > 0.0 && m.is_finite()) {
        return Err(SolveError::InvalidInput(format!(
            "amplitude bound {m} must be positive"
        )));
    }
    let sup_fprime = sup_derivative(f, m)?;
    let beta = f.slope_at_zero().max(sup_fprime) + 1.0;
    Ok(BetaChoice {
        beta,
        sup_fprime,
        lipschitz_f_beta: beta - f.inf_derivative(),
    })
}

/// Smallest `β' ≥ β` with `μ(c) ≥ 1.25·γ#` when the abscissa is finite.
pub fn enforce_abscissa_margin(beta: f64, c: f64, abscissa: f64) -> f64 {
    if !abscissa.is_finite() {
        return beta;
    }
    let target = 1.25 * abscissa;
    if mu_of(c, beta) >= target {
        beta
    } else {
        (target * (target - c)).max(beta)
    }
}
