//! Sup-norm residual of the profile equation
//! `φ'' − cφ' − f(φ) + ∫∫K g(φ(t − cs − w)) = 0` by central differences.

use super::profile::Profile;
use super::projected::build_k2;
use super::SolveError;
use crate::charspec::{find_positive_roots, CharParams};
use crate::model::WaveModel;

/// Pointwise residual on the interior, with the indices it covers.
pub fn residual_field(model: &WaveModel, c: f64, prof: &Profile) -> Result<(usize, Vec<f64>), SolveError> {
    let h = prof.grid.h;
    let n = prof.values.len();
    let k2 = build_k2(&model.kernel, c, h)?;
    let (pl, pr) = k2.pads();
    let gy: Vec<f64> = prof.extended(pl, pr).into_iter().map(|v| model.g.eval(v)).collect();
    let nonlocal = k2.convolve_extended(&gy, pl, n);
    let decay_scale = find_positive_roots(&CharParams::chi0(model), c)
        .ok()
        .flatten()
        .map_or(0.0, |r| 1.0 / r.lambda1);
    let margin = ((5.0 * h).max(decay_scale) / h).ceil() as usize;
    let margin = margin.max(1);
    if 2 * margin >= n {
        return Ok((margin, Vec::new()));
    }
    let v = &prof.values;
    let field = (margin..n - margin)
        .map(|i| {
            let d2 = (v[i + 1] - 2.0 * v[i] + v[i - 1]) / (h * h);
            let d1 = (v[i + 1] - v[i - 1]) / (2.0 * h);
            d2 - c * d1 - model.f.eval(v[i]) + nonlocal[i]
        })
        .collect();
    Ok((margin, field))
}

pub fn residual(model: &WaveModel, c: f64, prof: &Profile) -> Result<f64, SolveError> {
    let (_, field) = residual_field(model, c, prof)?;
    Ok(field.iter().fold(0.0, |m, r| m.max(r.abs())))
}
