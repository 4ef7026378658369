//! Exponential rate of the left tail by log-linear regression.

use super::profile::{DecayFit, Profile};
use super::SolveError;

const MIN_POINTS: usize = 20;

/// Least-squares slope of `ln y` against `t`.
pub fn log_linear_fit(t: &[f64], y: &[f64]) -> (f64, f64) {
    let n = t.len() as f64;
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let mt = t.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in t.iter().zip(&ly) {
        sxy += (a - mt) * (b - my);
        sxx += (a - mt) * (a - mt);
        syy += (b - my) * (b - my);
    }
    let slope = sxy / sxx;
    let r2 = if syy > 0.0 { sxy * sxy / (sxx * syy) } else { 1.0 };
    (slope, r2)
}

/// Fits the points left of the first crossing of `1e−3·sup` whose values lie
/// in `(1e−12·sup, 1e−3·sup)`.
pub fn decay_rate(prof: &Profile) -> Result<DecayFit, SolveError> {
    let sup = prof.values.iter().copied().fold(0.0, f64::max);
    let (lo, hi) = (1e-12 * sup, 1e-3 * sup);
    let end = prof.values.iter().position(|v| *v >= hi).unwrap_or(0);
    let (t, y): (Vec<f64>, Vec<f64>) = (0..end)
        .filter(|&i| prof.values[i] > lo)
        .map(|i| (prof.grid.t(i), prof.values[i]))
        .unzip();
    if t.len() < MIN_POINTS {
        return Err(SolveError::TailTooShort { points: t.len() });
    }
    let (rate, r2) = log_linear_fit(&t, &y);
    Ok(DecayFit {
        rate,
        r2,
        points: t.len(),
        multiplicity_warning: false,
    })
}
