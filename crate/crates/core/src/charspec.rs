//! Characteristic function `R(z, c) = z² − cz − q + p·M(z, c)`, its positive
//! roots, minimal speeds and per-speed verdicts.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::fmt;
use thiserror::Error;

use crate::kernels::{laplace_moment, laplace_moment_quadrature, KernelError, SpatioTemporalKernel, BOUNDARY_BAND};
use crate::model::WaveModel;
use crate::quadrature::QuadOptions;

/// `|R(z_min)|` at or below this declares a double root.
pub const ROOT_VALUE_TOL: f64 = 1e-10;
/// Bisection width in `z`.
pub const ROOT_Z_TOL: f64 = 1e-12;
/// Bisection width in `c`.
pub const SPEED_TOL: f64 = 1e-9;
/// Bracket search gives up beyond this speed.
pub const SPEED_LIMIT: f64 = 1e6;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CharError {
    #[error("minimizer reaches the abscissa {abscissa} at c = {c}; boundary limit {limit:?} is inconclusive")]
    AbscissaBoundary {
        c: f64,
        abscissa: f64,
        limit: Option<BoundaryLimit>,
    },
    #[error("no sign change of the root predicate for |c| <= {limit}")]
    BracketFailure { limit: f64 },
    #[error("|beta + c z - z^2| = {value} is too close to zero")]
    DenominatorNearZero { value: f64 },
    #[error("invalid characteristic parameters: {0}")]
    InvalidParams(String),
    #[error(transparent)]
    Kernel(#[from] KernelError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CharParams {
    pub p: f64,
    pub q: f64,
    pub kernel: SpatioTemporalKernel,
}

impl CharParams {
    pub fn new(p: f64, q: f64, kernel: SpatioTemporalKernel) -> Result<Self, CharError> {
        if !(p.is_finite() && q.is_finite() && q >= 0.0 && p > q) {
            return Err(CharError::InvalidParams(format!(
                "need p > q >= 0, got p = {p}, q = {q}"
            )));
        }
        kernel.validate()?;
        Ok(CharParams { p, q, kernel })
    }

    /// `χ₀`: `p = g'(0)`, `q = f'(0)`.
    pub fn chi0(model: &WaveModel) -> Self {
        CharParams {
            p: model.g0(),
            q: model.f0(),
            kernel: model.kernel.clone(),
        }
    }

    /// `χ_L`: `p = L`, `q = inf f'`.
    pub fn chi_l(model: &WaveModel) -> Self {
        CharParams {
            p: model.lipschitz,
            q: model.inf_f_prime(),
            kernel: model.kernel.clone(),
        }
    }

    fn value(&self, z: f64, c: f64) -> f64 {
        let m = self.kernel.moment_unchecked(z, c);
        if m.is_finite() {
            z * z - c * z - self.q + self.p * m
        } else {
            f64::INFINITY
        }
    }

    fn slope(&self, z: f64, c: f64) -> f64 {
        let d = self.kernel.moment_dz(z, c);
        if d.is_finite() && z < self.kernel.abscissa(c) {
            2.0 * z - c + self.p * d
        } else {
            f64::INFINITY
        }
    }

    /// Positive root of `z² − cz − q`.
    pub fn mu_q(&self, c: f64) -> f64 {
        0.5 * (c + (c * c + 4.0 * self.q).sqrt())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RootPair {
    pub lambda1: f64,
    pub lambda2: Option<f64>,
    pub mu_q: f64,
    pub multiplicity_two: bool,
}

/// One-sided limit of `R` at a finite abscissa, with an error estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundaryLimit {
    #[serde(with = "crate::extended")]
    pub value: f64,
    pub error: f64,
    pub abscissa: f64,
}

impl BoundaryLimit {
    /// Sign is resolved outside the error band.
    pub fn is_nonzero(&self) -> bool {
        self.value.is_infinite() || self.value.abs() > self.error + ROOT_VALUE_TOL
    }
}

pub fn eval_r(params: &CharParams, z: f64, c: f64) -> Result<f64, CharError> {
    let m = laplace_moment(&params.kernel, z, c)?;
    Ok(if m.is_finite() {
        z * z - c * z - params.q + params.p * m
    } else {
        f64::INFINITY
    })
}

/// Richardson extrapolation of `R(γ# − δ, c)` as `δ → 0`, or `None` when
/// `γ#(c) = ∞`. Blow-up is detected from the ratio of successive
/// differences and reported as an infinite value.
pub fn boundary_limit(params: &CharParams, c: f64) -> Option<BoundaryLimit> {
    let gamma = params.kernel.abscissa(c);
    if !gamma.is_finite() {
        return None;
    }
    let delta = 1e-3 * gamma;
    let vals: Vec<f64> = (0..4)
        .map(|k| params.value(gamma - delta * 0.5f64.powi(k), c))
        .collect();
    if vals.iter().any(|v| !v.is_finite()) {
        return Some(BoundaryLimit {
            value: f64::INFINITY,
            error: 0.0,
            abscissa: gamma,
        });
    }
    let d: Vec<f64> = vals.windows(2).map(|w| w[1] - w[0]).collect();
    let same_sign = d.iter().all(|x| *x > 0.0) || d.iter().all(|x| *x < 0.0);
    if same_sign && d[1].abs() >= 0.9 * d[0].abs() && d[2].abs() >= 0.9 * d[1].abs() {
        return Some(BoundaryLimit {
            value: d[2].signum() * f64::INFINITY,
            error: 0.0,
            abscissa: gamma,
        });
    }
    let mut table = vals;
    let mut prev_best = table[table.len() - 1];
    let mut factor = 2.0;
    while table.len() > 1 {
        prev_best = table[table.len() - 1];
        table = table
            .windows(2)
            .map(|w| (factor * w[1] - w[0]) / (factor - 1.0))
            .collect();
        factor *= 2.0;
    }
    Some(BoundaryLimit {
        value: table[0],
        error: (table[0] - prev_best).abs(),
        abscissa: gamma,
    })
}

fn bisect<F: Fn(f64) -> bool>(mut lo: f64, mut hi: f64, tol: f64, upper_side: F) -> (f64, f64) {
    for _ in 0..300 {
        if hi - lo <= tol * hi.abs().max(1.0) {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if upper_side(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    (lo, hi)
}

/// Interior minimizer of `R(·, c)` on `(0, min(γ#, μ_q))` and the minimum.
/// The flag is set when the minimizer runs into a finite abscissa.
pub fn minimum(params: &CharParams, c: f64) -> (f64, f64, bool) {
    let gamma = params.kernel.abscissa(c);
    let mu_q = params.mu_q(c);
    let upper = gamma.min(mu_q);
    if !(upper > 0.0) {
        return (0.0, params.p - params.q, false);
    }
    if params.slope(0.0, c) >= 0.0 {
        return (0.0, params.p - params.q, false);
    }
    let (lo, hi) = bisect(0.0, upper, 1e-15, |z| params.slope(z, c) >= 0.0);
    let z = 0.5 * (lo + hi);
    let collided = gamma <= mu_q && gamma - z <= BOUNDARY_BAND * gamma.max(1.0) * 10.0;
    (z, params.value(z, c), collided)
}

/// Positive roots of `R(·, c)`; `Ok(None)` when there are none.
pub fn find_positive_roots(params: &CharParams, c: f64) -> Result<Option<RootPair>, CharError> {
    let gamma = params.kernel.abscissa(c);
    let mu_q = params.mu_q(c);
    let (z_min, r_min, collided) = minimum(params, c);
    if z_min <= 0.0 {
        return Ok(None);
    }
    if collided {
        let limit = boundary_limit(params, c);
        let lim = limit.expect("collision implies a finite abscissa");
        if !lim.is_nonzero() {
            return Err(CharError::AbscissaBoundary {
                c,
                abscissa: gamma,
                limit,
            });
        }
        if lim.value > 0.0 {
            return Ok(None);
        }
        let (lo, hi) = bisect(0.0, z_min, ROOT_Z_TOL, |z| params.value(z, c) <= 0.0);
        return Ok(Some(RootPair {
            lambda1: 0.5 * (lo + hi),
            lambda2: None,
            mu_q,
            multiplicity_two: false,
        }));
    }
    if r_min > ROOT_VALUE_TOL {
        return Ok(None);
    }
    if r_min.abs() <= ROOT_VALUE_TOL {
        return Ok(Some(RootPair {
            lambda1: z_min,
            lambda2: Some(z_min),
            mu_q,
            multiplicity_two: true,
        }));
    }
    let (lo, hi) = bisect(0.0, z_min, ROOT_Z_TOL, |z| params.value(z, c) <= 0.0);
    let lambda1 = 0.5 * (lo + hi);
    let upper = gamma.min(mu_q);
    let right_positive = if upper == gamma && gamma.is_finite() {
        boundary_limit(params, c).is_none_or(|l| l.value > 0.0)
    } else {
        true
    };
    let lambda2 = if right_positive {
        let (lo, hi) = bisect(z_min, upper, ROOT_Z_TOL, |z| params.value(z, c) > 0.0);
        Some(0.5 * (lo + hi))
    } else {
        None
    };
    Ok(Some(RootPair {
        lambda1,
        lambda2,
        mu_q,
        multiplicity_two: false,
    }))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MinimalSpeed {
    pub c_sharp: f64,
    pub roots: RootPair,
    /// Set when the minimizer sits on the abscissa at `c#`.
    pub boundary_collision: bool,
}

/// `c# = inf{c : R(·, c) has a positive root}` by bracketing and bisection.
pub fn minimal_speed(params: &CharParams) -> Result<MinimalSpeed, CharError> {
    let has = |c: f64| -> Result<bool, CharError> { Ok(find_positive_roots(params, c)?.is_some()) };
    let (mut lo, mut hi);
    if has(0.0)? {
        hi = 0.0;
        let mut step = 1.0;
        loop {
            if step > SPEED_LIMIT {
                return Err(CharError::BracketFailure { limit: SPEED_LIMIT });
            }
            if !has(-step)? {
                lo = -step;
                break;
            }
            hi = -step;
            step *= 2.0;
        }
    } else {
        lo = 0.0;
        let mut step = 1.0;
        loop {
            if step > SPEED_LIMIT {
                return Err(CharError::BracketFailure { limit: SPEED_LIMIT });
            }
            if has(step)? {
                hi = step;
                break;
            }
            lo = step;
            step *= 2.0;
        }
    }
    while hi - lo > 0.1 * SPEED_TOL * hi.abs().max(1.0) {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if has(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let (z_min, _, collided) = minimum(params, hi);
    let roots = if collided {
        find_positive_roots(params, hi)?.expect("roots exist at the upper bracket")
    } else {
        RootPair {
            lambda1: z_min,
            lambda2: Some(z_min),
            mu_q: params.mu_q(hi),
            multiplicity_two: true,
        }
    };
    Ok(MinimalSpeed {
        c_sharp: 0.5 * (lo + hi),
        roots,
        boundary_collision: collided,
    })
}

/// `−g'(0)·∫∫Kw / (1 + g'(0)·∫∫Ks)`.
pub fn speed_lower_bound(g_prime0: f64, kernel: &SpatioTemporalKernel) -> f64 {
    let m = kernel.first_moments();
    // `+ 0.0` turns a negative zero into zero
    -g_prime0 * m.mean_space / (1.0 + g_prime0 * m.mean_time) + 0.0
}

/// `μ(c) = (c + √(c² + 4β))/2`.
pub fn mu_of(c: f64, beta: f64) -> f64 {
    0.5 * (c + (c * c + 4.0 * beta).sqrt())
}

/// `γ_K(c) = min{μ(c), γ#(c)}`.
pub fn gamma_k(c: f64, beta: f64, kernel: &SpatioTemporalKernel) -> f64 {
    mu_of(c, beta).min(kernel.abscissa(c))
}

fn k1_transform_split(c: f64, beta: f64, z: f64) -> f64 {
    let sigma = (c * c + 4.0 * beta).sqrt();
    let nu = 0.5 * (c - sigma);
    let mu = 0.5 * (c + sigma);
    1.0 / (sigma * (z - nu)) + 1.0 / (sigma * (mu - z))
}

/// `χ(z)` from the two-atom decomposition: the `k₁` transform is taken
/// piecewise over its two exponential branches and the `k₂` transform by
/// quadrature over the kernel densities.
pub fn chi_decomposed(model: &WaveModel, beta: f64, c: f64, z: f64) -> Result<f64, CharError> {
    let opts = QuadOptions {
        abs_tol: 1e-16,
        rel_tol: 1e-13,
        ..QuadOptions::default()
    };
    let k2 = laplace_moment_quadrature(&model.kernel, z, c, &opts)?;
    let k1 = k1_transform_split(c, beta, z);
    Ok(1.0 - model.g0() * k1 * k2 - (beta - model.f0()) * k1)
}

/// `|χ_decomposed(z) − (−χ₀(z, c)/(β + cz − z²))|`.
pub fn char_identity_residual(model: &WaveModel, beta: f64, c: f64, z: f64) -> Result<f64, CharError> {
    let denom = beta + c * z - z * z;
    if denom.abs() < 1e-12 {
        return Err(CharError::DenominatorNearZero { value: denom.abs() });
    }
    let direct = -eval_r(&CharParams::chi0(model), z, c)? / denom;
    Ok((chi_decomposed(model, beta, c, z)? - direct).abs())
}

/// Roots of `χ(z) = 1 − k̂₁(z)(g'(0)M(z, c) + β − f'(0))` in
/// `(0, γ_K(c))`, located by a scan and bisection on `χ` itself.
pub fn chi_roots(model: &WaveModel, beta: f64, c: f64) -> Vec<f64> {
    let upper = gamma_k(c, beta, &model.kernel);
    let chi = |z: f64| {
        let m = model.kernel.moment_unchecked(z, c);
        1.0 - k1_transform_split(c, beta, z) * (model.g0() * m + beta - model.f0())
    };
    let n = 4000;
    let top = if upper.is_finite() { upper } else { 1e3 };
    let mut roots = Vec::new();
    let mut prev_z = 0.0;
    let mut prev = chi(0.0);
    for i in 1..n {
        let z = top * i as f64 / n as f64;
        let v = chi(z);
        if !v.is_finite() {
            break;
        }
        if (prev < 0.0) != (v < 0.0) {
            let neg_left = prev < 0.0;
            let (lo, hi) = bisect(prev_z, z, 1e-15, |x| (chi(x) < 0.0) != neg_left);
            roots.push(0.5 * (lo + hi));
        }
        prev_z = z;
        prev = v;
    }
    roots
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    NonExistent,
    UniqueIfExists,
    Indeterminate,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter) -> fmt::Result {
        let s = match self {
            Verdict::NonExistent => "NonExistent",
            Verdict::UniqueIfExists => "UniqueIfExists",
            Verdict::Indeterminate => "Indeterminate",
        };
        f.write_str(s)
    }
}

/// Cached `c*`, `c⋆` and the boundary flag of a model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpeedClassifier {
    pub c_star: f64,
    pub c_starstar: f64,
    pub boundary_flag: Option<BoundaryLimit>,
}

impl SpeedClassifier {
    pub fn new(model: &WaveModel) -> Result<Self, CharError> {
        let c_star = minimal_speed(&CharParams::chi0(model))?.c_sharp;
        let chi_l = CharParams::chi_l(model);
        let c_starstar = minimal_speed(&chi_l)?.c_sharp;
        Ok(SpeedClassifier {
            c_star,
            c_starstar,
            boundary_flag: boundary_limit(&chi_l, c_starstar),
        })
    }

    fn boundary_clear(&self) -> bool {
        self.boundary_flag.is_none_or(|b| b.is_nonzero())
    }

    pub fn classify(&self, c: f64) -> Verdict {
        if c < self.c_star {
            return Verdict::NonExistent;
        }
        let at_critical = (c - self.c_starstar).abs() <= SPEED_TOL * self.c_starstar.abs().max(1.0);
        if at_critical {
            if self.boundary_clear() {
                Verdict::UniqueIfExists
            } else {
                Verdict::Indeterminate
            }
        } else if c > self.c_starstar {
            Verdict::UniqueIfExists
        } else {
            Verdict::Indeterminate
        }
    }
}

pub fn classify_speed(model: &WaveModel, c: f64) -> Result<Verdict, CharError> {
    Ok(SpeedClassifier::new(model)?.classify(c))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpeedRow {
    pub c: f64,
    #[serde(with = "crate::extended")]
    pub gamma_sharp: f64,
    #[serde(rename = "gamma_K", with = "crate::extended")]
    pub gamma_k: f64,
    pub roots: Option<RootPair>,
    pub roots_l: Option<RootPair>,
    pub verdict: Verdict,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CharReport {
    pub c_star: f64,
    pub c_starstar: f64,
    pub lower_bound: f64,
    pub beta: f64,
    pub boundary_flag: Option<BoundaryLimit>,
    pub rows: Vec<SpeedRow>,
}

/// Per-speed characteristic data for a speed grid (rows run in parallel).
pub fn build_report(model: &WaveModel, beta: f64, speeds: &[f64]) -> Result<CharReport, CharError> {
    let classifier = SpeedClassifier::new(model)?;
    let chi0 = CharParams::chi0(model);
    let chi_l = CharParams::chi_l(model);
    let rows = speeds
        .par_iter()
        .map(|&c| {
            let mut notes = Vec::new();
            let mut roots_of = |p: &CharParams, name: &str| match find_positive_roots(p, c) {
                Ok(r) => r,
                Err(e) => {
                    notes.push(format!("{name}: {e}"));
                    None
                }
            };
            let roots = roots_of(&chi0, "chi0");
            let roots_l = roots_of(&chi_l, "chiL");
            SpeedRow {
                c,
                gamma_sharp: model.kernel.abscissa(c),
                gamma_k: gamma_k(c, beta, &model.kernel),
                roots,
                roots_l,
                verdict: classifier.classify(c),
                note: if notes.is_empty() { None } else { Some(notes.join("; ")) },
            }
        })
        .collect();
    Ok(CharReport {
        c_star: classifier.c_star,
        c_starstar: classifier.c_starstar,
        lower_bound: speed_lower_bound(model.g0(), &model.kernel),
        beta,
        boundary_flag: classifier.boundary_flag,
        rows,
    })
}

impl CharReport {
    /// CSV table with one row per speed; infinities are written as `inf`,
    /// missing roots as empty cells.
    pub fn to_csv(&self) -> Result<String, csv::Error> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record([
            "c",
            "gamma_sharp",
            "gamma_K",
            "lambda1",
            "lambda2",
            "lambda1_L",
            "lambda2_L",
            "verdict",
        ])?;
        let opt = |v: Option<f64>| v.map(crate::extended::format).unwrap_or_default();
        for r in &self.rows {
            w.write_record([
                crate::extended::format(r.c),
                crate::extended::format(r.gamma_sharp),
                crate::extended::format(r.gamma_k),
                opt(r.roots.map(|p| p.lambda1)),
                opt(r.roots.and_then(|p| p.lambda2)),
                opt(r.roots_l.map(|p| p.lambda1)),
                opt(r.roots_l.and_then(|p| p.lambda2)),
                r.verdict.to_string(),
            ])?;
        }
        let bytes = w.into_inner().map_err(|e| e.into_error())?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }
}
