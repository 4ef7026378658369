//! Sampled checks of the hypotheses behind the uniqueness criterion.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::beta::{enforce_abscissa_margin, select_beta};
use super::SolveError;
use crate::charspec::gamma_k;
use crate::model::WaveModel;

const PAIRS: usize = 10_000;
const POINTS: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LipschitzCheck {
    pub holds: bool,
    pub violations: usize,
    /// Largest sampled `|g(s₁) − g(s₂)| / |s₁ − s₂|`.
    pub max_slope: f64,
    pub worst_pair: (f64, f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HypothesisReport {
    pub amplitude: f64,
    pub c: f64,
    pub beta: f64,
    pub lipschitz: LipschitzCheck,
    /// `g(s) ≤ Ls` on the sample.
    pub g_below_ls: bool,
    /// `f_β(s) ≤ (β − inf f')s` on the sample.
    pub f_beta_below_linear: bool,
    pub gamma_k: f64,
    /// Minimizer of `χ_L(·, c)` on `(0, γ_K(c))` and its value.
    pub chi_l_argmin: f64,
    pub chi_l_min: f64,
    pub chi_l_condition: bool,
    /// `χ(0) = (f'(0) − g'(0))/β`.
    pub chi_at_zero: f64,
    pub chi_at_zero_negative: bool,
}

impl HypothesisReport {
    pub fn all_hold(&self) -> bool {
        self.lipschitz.holds
            && self.g_below_ls
            && self.f_beta_below_linear
            && self.chi_l_condition
            && self.chi_at_zero_negative
    }
}

fn lipschitz_check(model: &WaveModel, m: f64, rng: &mut ChaCha8Rng) -> LipschitzCheck {
    let l = model.lipschitz;
    let mut out = LipschitzCheck {
        holds: true,
        violations: 0,
        max_slope: 0.0,
        worst_pair: (0.0, 0.0),
    };
    for _ in 0..PAIRS {
        let (a, b): (f64, f64) = (rng.gen_range(0.0..=m), rng.gen_range(0.0..=m));
        if a == b {
            continue;
        }
        let slope = (model.g.eval(a) - model.g.eval(b)).abs() / (a - b).abs();
        if slope > l * (1.0 + 1e-12) {
            out.violations += 1;
            out.holds = false;
        }
        if slope > out.max_slope {
            out.max_slope = slope;
            out.worst_pair = (a, b);
        }
    }
    out
}

/// Golden-section minimum of `χ_L(·, c)` on `(0, upper)`.
fn chi_l_minimum(model: &WaveModel, c: f64, upper: f64) -> (f64, f64) {
    let (p, q) = (model.lipschitz, model.inf_f_prime());
    let chi = |z: f64| {
        let mo = model.kernel.moment_unchecked(z, c);
        if mo.is_finite() {
            z * z - c * z - q + p * mo
        } else {
            f64::INFINITY
        }
    };
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let (mut a, mut b) = (0.0, upper);
    for _ in 0..200 {
        let x1 = b - r * (b - a);
        let x2 = a + r * (b - a);
        if chi(x1) < chi(x2) {
            b = x2;
        } else {
            a = x1;
        }
        if b - a < 1e-13 * upper.max(1.0) {
            break;
        }
    }
    let z = 0.5 * (a + b);
    (z, chi(z))
}

pub fn verify_hypotheses(model: &WaveModel, m: f64, c: f64, seed: u64) -> Result<HypothesisReport, SolveError> {
    let choice = select_beta(&model.f, m)?;
    let beta = enforce_abscissa_margin(choice.beta, c, model.kernel.abscissa(c));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let lipschitz = lipschitz_check(model, m, &mut rng);
    let l = model.lipschitz;
    let slope_f = beta - model.inf_f_prime();
    let mut g_below_ls = true;
    let mut f_beta_below_linear = true;
    for i in 0..=POINTS {
        let s = m * i as f64 / POINTS as f64;
        let tol = 1e-12 * (1.0 + s);
        g_below_ls &= model.g.eval(s) <= l * s + tol;
        f_beta_below_linear &= beta * s - model.f.eval(s) <= slope_f * s + tol;
    }
    let gk = gamma_k(c, beta, &model.kernel);
    let (chi_l_argmin, chi_l_min) = chi_l_minimum(model, c, gk);
    let chi_at_zero = (model.f0() - model.g0()) / beta;
    Ok(HypothesisReport {
        amplitude: m,
        c,
        beta,
        lipschitz,
        g_below_ls,
        f_beta_below_linear,
        gamma_k: gk,
        chi_l_argmin,
        chi_l_min,
        chi_l_condition: chi_l_min <= 0.0,
        chi_at_zero,
        chi_at_zero_negative: chi_at_zero < 0.0,
    })
}
