//! Fixed-point iteration `φ ← k₁ * (k₂ * g(φ) + f_β(φ))` with translation
//! re-anchoring.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::beta::{enforce_abscissa_margin, select_beta};
use super::decay::decay_rate;
use super::green::{build_k1, ExpStepper};
use super::profile::{sup_of, Anchor, Grid, LeftTail, Profile};
use super::projected::{build_k2, ProjectedKernel};
use super::SolveError;
use crate::charspec::{find_positive_roots, CharParams, RootPair};
use crate::model::WaveModel;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverConfig {
    pub tol: f64,
    pub max_iter: usize,
    /// Anchor level as a fraction of `sup φ`.
    pub theta: f64,
    /// Largest per-sweep translation still accepted as converged.
    pub drift_tol: f64,
    pub collapse_level: f64,
    /// Half-width `T` of the window; defaulted from the roots when absent.
    pub t_max: Option<f64>,
    pub h: Option<f64>,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            tol: 1e-8,
            max_iter: 5000,
            theta: 0.5,
            drift_tol: 1e-6,
            collapse_level: 1e-6,
            t_max: None,
            h: None,
        }
    }
}

/// Sweeps allowed with a converged shape but a persistent translation.
const DRIFT_PATIENCE: usize = 100;

impl SolverConfig {
    /// `T = max(60, 20/λ₁)`, `h = min(0.05, 1/(20λ₂))` unless set.
    pub fn grid(&self, roots: Option<&RootPair>) -> Grid {
        let t_max = self.t_max.unwrap_or_else(|| match roots {
            Some(r) => (20.0 / r.lambda1).max(60.0),
            None => 60.0,
        });
        let h = self.h.unwrap_or_else(|| match roots {
            Some(r) => (1.0 / (20.0 * r.lambda2.unwrap_or(r.lambda1))).min(0.05),
            None => 0.05,
        });
        Grid::symmetric(t_max, h)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InitPreset {
    /// `κ` on the right joined to 0 by a linear ramp of width 10.
    StepRamp,
    /// `0.8κ (1 + tanh(t/2))/2`.
    TanhRamp,
    /// Step ramp scaled to the given height.
    Small {
        amplitude: f64,
    },
    Constant,
    Zero,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Init {
    Preset { preset: InitPreset, seed: Option<u64> },
    Profile(Profile),
}

impl From<InitPreset> for Init {
    fn from(preset: InitPreset) -> Self {
        Init::Preset { preset, seed: None }
    }
}

/// Samples a preset. A seed randomizes the ramp width in `[5, 15]` and its
/// position in `[−5, 5]`, keeping the profile monotone.
pub fn initial_profile(preset: InitPreset, grid: Grid, c: f64, kappa: f64, seed: Option<u64>) -> Profile {
    let (width, offset) = match seed {
        Some(s) => {
            let mut rng = ChaCha8Rng::seed_from_u64(s);
            (rng.gen_range(5.0..15.0), rng.gen_range(-5.0..5.0))
        }
        None => (10.0, 0.0),
    };
    let ramp = |t: f64| ((t - offset + width) / width).clamp(0.0, 1.0);
    let values = grid
        .points()
        .into_iter()
        .map(|t| match preset {
            InitPreset::StepRamp => kappa * ramp(t),
            InitPreset::TanhRamp => 0.8 * kappa * 0.5 * (1.0 + ((t - offset) / (0.2 * width)).tanh()),
            InitPreset::Small { amplitude } => amplitude * ramp(t),
            InitPreset::Constant => kappa,
            InitPreset::Zero => 0.0,
        })
        .collect();
    Profile::new(grid, values, c)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum NotConvergedReason {
    MaxIterations {
        last_change: f64,
    },
    /// The shape settled but each sweep still translates it by `shift`.
    Drifting {
        shift: f64,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub enum SolveOutcome {
    Converged(Profile),
    Collapsed {
        iterations: usize,
        sup: f64,
    },
    NotConverged {
        profile: Profile,
        reason: NotConvergedReason,
    },
}

/// One sweep of the reformulated equation on a fixed grid.
#[derive(Debug, Clone)]
pub struct IterationMap<'a> {
    model: &'a WaveModel,
    c: f64,
    grid: Grid,
    k2: ProjectedKernel,
    roots: Option<RootPair>,
    beta: f64,
    stepper: ExpStepper,
    tail_rate: Option<f64>,
}

impl<'a> IterationMap<'a> {
    pub fn new(model: &'a WaveModel, c: f64, grid: Grid, beta: f64) -> Result<Self, SolveError> {
        let k2 = build_k2(&model.kernel, c, grid.h)?;
        let roots = find_positive_roots(&CharParams::chi0(model), c)?;
        let stepper = build_k1(c, beta).green().stepper(grid.h);
        let mut map = IterationMap {
            model,
            c,
            grid,
            k2,
            roots,
            beta,
            stepper,
            tail_rate: None,
        };
        map.tail_rate = map.discrete_tail_rate();
        Ok(map)
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn roots(&self) -> Option<RootPair> {
        self.roots
    }

    pub fn k2(&self) -> &ProjectedKernel {
        &self.k2
    }

    pub fn set_beta(&mut self, beta: f64) {
        self.beta = beta;
        self.stepper = build_k1(self.c, beta).green().stepper(self.grid.h);
        self.tail_rate = self.discrete_tail_rate();
    }

    /// Left continuation used for iterates: the exponential that the
    /// discretized linearization at 0 maps to itself, or 0 when the
    /// characteristic function has no positive root.
    pub fn left_tail(&self) -> LeftTail {
        match self.tail_rate {
            Some(rate) => LeftTail::Exponential { rate },
            None => LeftTail::Zero,
        }
    }

    /// `F_h(λ) = (g'(0)K̂_h(λ) + β − f'(0)) k̂₁,h(λ) − 1`.
    fn discrete_gain(&self, lambda: f64) -> f64 {
        let m = self.model;
        (m.g0() * self.k2.discrete_transform(lambda) + self.beta - m.f0()) * self.stepper.discrete_transform(lambda)
            - 1.0
    }

    fn discrete_tail_rate(&self) -> Option<f64> {
        let r = self.roots?;
        let upper = 0.5 * (r.lambda1 + r.lambda2.unwrap_or(r.lambda1));
        if r.multiplicity_two || self.discrete_gain(upper) >= 0.0 {
            return Some(r.lambda1);
        }
        let (mut lo, mut hi) = (0.0, upper);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if self.discrete_gain(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo < 1e-15 {
                break;
            }
        }
        Some(0.5 * (lo + hi))
    }

    /// `k₁ * (k₂ * g(φ) + βφ − f(φ))` on the grid, with `φ` continued by its
    /// own boundary rules.
    pub fn apply(&self, phi: &Profile) -> Vec<f64> {
        let (pl, pr) = self.k2.pads();
        let n = phi.values.len();
        let g = &self.model.g;
        let f = &self.model.f;
        let gy: Vec<f64> = phi.extended(pl, pr).into_iter().map(|v| g.eval(v)).collect();
        let conv = self.k2.convolve_extended(&gy, pl, n);
        let big_g: Vec<f64> = conv
            .iter()
            .zip(&phi.values)
            .map(|(k, &v)| k + self.beta * v - f.eval(v))
            .collect();
        let vr = phi.right_value;
        let right = g.eval(vr) + self.beta * vr - f.eval(vr);
        self.stepper.convolve(&big_g, phi.left, right)
    }
}

fn beta_for(model: &WaveModel, c: f64, m: f64) -> Result<f64, SolveError> {
    let choice = select_beta(&model.f, m)?;
    Ok(enforce_abscissa_margin(choice.beta, c, model.kernel.abscissa(c)))
}

pub fn fixed_point_solve(
    model: &WaveModel,
    c: f64,
    init: Init,
    cfg: &SolverConfig,
) -> Result<SolveOutcome, SolveError> {
    if !(c.is_finite() && cfg.tol > 0.0 && cfg.theta > 0.0 && cfg.theta < 1.0) {
        return Err(SolveError::InvalidInput(format!(
            "need finite c, tol > 0 and 0 < theta < 1 (c = {c}, tol = {}, theta = {})",
            cfg.tol, cfg.theta
        )));
    }
    let roots = find_positive_roots(&CharParams::chi0(model), c)?;
    let kappa = model.equilibrium(1e3).unwrap_or(1.0);
    let mut phi = match init {
        Init::Preset { preset, seed } => initial_profile(preset, cfg.grid(roots.as_ref()), c, kappa, seed),
        Init::Profile(p) => p,
    };
    let grid = phi.grid;
    if let Some(r) = roots {
        if 1.0 / r.lambda1 < 4.0 * grid.h {
            return Err(SolveError::GridTooCoarse {
                scale: 1.0 / r.lambda1,
                h: grid.h,
            });
        }
    }
    if phi.values.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
        return Err(SolveError::InvalidInput(
            "initial profile must be finite and nonnegative".into(),
        ));
    }
    phi.refresh_sup();
    if phi.sup < cfg.collapse_level {
        return Ok(SolveOutcome::Collapsed {
            iterations: 0,
            sup: phi.sup,
        });
    }
    let mut bound = 1.5 * phi.sup;
    let mut map = IterationMap::new(model, c, grid, beta_for(model, c, bound)?)?;
    phi.left = map.left_tail();

    let mut drifting = 0;
    let mut last_change = f64::INFINITY;
    let mut last_shift = 0.0;
    for it in 1..=cfg.max_iter {
        let values = map.apply(&phi);
        let sup = sup_of(&values);
        if !sup.is_finite() {
            return Err(SolveError::InvalidInput(format!(
                "iterate became non-finite at sweep {it}"
            )));
        }
        if sup < cfg.collapse_level {
            return Ok(SolveOutcome::Collapsed { iterations: it, sup });
        }
        let mut next = Profile::new(grid, values, c).with_left(map.left_tail());
        let level = cfg.theta * sup;
        let shift = next.first_crossing(level).unwrap_or(0.0);
        next = next.shifted(shift);
        next.anchor = Some(Anchor {
            theta: cfg.theta,
            level,
            shift,
        });
        last_change = next
            .values
            .iter()
            .zip(&phi.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        last_shift = shift;
        phi = next;
        phi.iterations = Some(it);
        phi.beta = Some(map.beta());

        if last_change < cfg.tol {
            if shift.abs() < cfg.drift_tol {
                return finish(phi, roots).map(SolveOutcome::Converged);
            }
            drifting += 1;
            if drifting >= DRIFT_PATIENCE {
                return Ok(SolveOutcome::NotConverged {
                    profile: phi,
                    reason: NotConvergedReason::Drifting { shift },
                });
            }
        } else {
            drifting = 0;
        }
        if sup > bound {
            bound = 1.5 * sup;
            let beta = beta_for(model, c, bound)?;
            if beta != map.beta() {
                map.set_beta(beta);
                phi.left = map.left_tail();
            }
        }
    }
    let reason = if last_change < cfg.tol {
        NotConvergedReason::Drifting { shift: last_shift }
    } else {
        NotConvergedReason::MaxIterations { last_change }
    };
    Ok(SolveOutcome::NotConverged { profile: phi, reason })
}

fn finish(mut phi: Profile, roots: Option<RootPair>) -> Result<Profile, SolveError> {
    let left = phi.values[0];
    if left > 1e-4 * phi.sup {
        return Err(SolveError::WindowTooSmall { left, sup: phi.sup });
    }
    if let Ok(mut fit) = decay_rate(&phi) {
        fit.multiplicity_warning = roots.is_some_and(|r| r.multiplicity_two);
        phi.decay_fit = Some(fit);
    }
    Ok(phi)
}
