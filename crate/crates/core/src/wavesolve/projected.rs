//! The projected kernel `k₂(r) = ∫₀^∞ K(s, r − cs) ds`, i.e. the law of
//! `R = cS + W`, discretized as hat-function weights
//! `w_j = ∫ k₂(r) Λ(r/h − j) dr`.
//!
//! With these weights `Σ_j w_j y_{i−j}` is the exact convolution of `k₂`
//! with the piecewise-linear interpolant of `y`. They are obtained as second
//! differences of the stop-loss transform `Ψ(x) = E[(R − x)₊]`, which has a
//! closed form for every spatial family.

use crate::kernels::{KernelError, Side, SpatialKernel, SpatioTemporalKernel, TemporalKernel, SUPPORT_EPS};
use std::cell::RefCell;

use crate::quadrature::{integrate_with_breaks, QuadError, QuadOptions};

#[derive(Debug, Clone, PartialEq)]
pub struct ProjectedKernel {
    pub h: f64,
    /// Index `j` of `weights[0]`.
    pub first: isize,
    pub weights: Vec<f64>,
}

fn normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x / std::f64::consts::SQRT_2)
}

/// `E[(W − x)₊]` for the spatial law `W`.
pub fn stop_loss_spatial(s: &SpatialKernel, x: f64) -> f64 {
    match *s {
        SpatialKernel::Gaussian { variance, mean } => {
            let sd = variance.sqrt();
            let d = (mean - x) / sd;
            let pdf = (-0.5 * d * d).exp() / (2.0 * std::f64::consts::PI).sqrt();
            ((mean - x) * normal_cdf(d) + sd * pdf).max(0.0)
        }
        SpatialKernel::PointMass { a } => (a - x).max(0.0),
        SpatialKernel::OneSidedExponential { rate, side } => match side {
            Side::Positive => {
                if x < 0.0 {
                    1.0 / rate - x
                } else {
                    (-rate * x).exp() / rate
                }
            }
            Side::Negative => {
                if x >= 0.0 {
                    0.0
                } else {
                    let y = -x;
                    y + (-rate * y).exp_m1() / rate
                }
            }
        },
        SpatialKernel::TwoSidedExponential { rate } => {
            let pos = SpatialKernel::OneSidedExponential {
                rate,
                side: Side::Positive,
            };
            let neg = SpatialKernel::OneSidedExponential {
                rate,
                side: Side::Negative,
            };
            0.5 * (stop_loss_spatial(&pos, x) + stop_loss_spatial(&neg, x))
        }
    }
}

fn atom(r: f64, h: f64) -> ProjectedKernel {
    let u = r / h;
    let j = u.floor();
    let frac = u - j;
    ProjectedKernel {
        h,
        first: j as isize,
        weights: vec![1.0 - frac, frac],
    }
}

fn from_stop_loss<F: Fn(f64) -> f64>(psi: F, lo: f64, hi: f64, h: f64) -> ProjectedKernel {
    let j_lo = (lo / h).floor() as isize - 1;
    let j_hi = (hi / h).ceil() as isize + 1;
    let vals: Vec<f64> = (j_lo - 1..=j_hi + 1).map(|j| psi(j as f64 * h)).collect();
    let weights = vals.windows(3).map(|w| (w[0] - 2.0 * w[1] + w[2]) / h).collect();
    ProjectedKernel {
        h,
        first: j_lo,
        weights,
    }
}

/// `E[(W − x)₊] − (E[W] − x)₊`, i.e. the call transform below the mean
/// and the put transform above it. Free of the cancellation that the plain
/// stop-loss suffers far left of the support.
pub fn centered_stop_loss(s: &SpatialKernel, x: f64) -> f64 {
    match *s {
        SpatialKernel::Gaussian { variance, mean } => {
            let mirrored = SpatialKernel::Gaussian { variance, mean: -mean };
            if x >= mean {
                stop_loss_spatial(s, x)
            } else {
                stop_loss_spatial(&mirrored, -x)
            }
        }
        SpatialKernel::PointMass { .. } => 0.0,
        SpatialKernel::OneSidedExponential { rate, side } => {
            let flipped = match side {
                Side::Positive => Side::Negative,
                Side::Negative => Side::Positive,
            };
            let mirrored = SpatialKernel::OneSidedExponential { rate, side: flipped };
            if x >= s.mean() {
                stop_loss_spatial(s, x)
            } else {
                stop_loss_spatial(&mirrored, -x)
            }
        }
        SpatialKernel::TwoSidedExponential { rate } => {
            let pos = SpatialKernel::OneSidedExponential {
                rate,
                side: Side::Positive,
            };
            let neg = SpatialKernel::OneSidedExponential {
                rate,
                side: Side::Negative,
            };
            0.5 * (centered_stop_loss(&pos, x) + centered_stop_loss(&neg, x))
                + 0.5 * ((1.0 / rate - x).max(0.0) + (-1.0 / rate - x).max(0.0))
                - (-x).max(0.0)
        }
    }
}

fn spatial_part(spatial: &SpatialKernel, shift: f64, h: f64) -> ProjectedKernel {
    if let Some(a) = spatial.atom() {
        return atom(shift + a, h);
    }
    if let SpatialKernel::TwoSidedExponential { rate } = *spatial {
        let mut k = spatial_part(
            &SpatialKernel::OneSidedExponential {
                rate,
                side: Side::Positive,
            },
            shift,
            h,
        );
        for w in k.weights.iter_mut() {
            *w *= 0.5;
        }
        let neg = spatial_part(
            &SpatialKernel::OneSidedExponential {
                rate,
                side: Side::Negative,
            },
            shift,
            h,
        );
        k.scaled_add(&neg, 0.5);
        return k;
    }
    let (lo, hi) = spatial.support(SUPPORT_EPS);
    let mean = spatial.mean() + shift;
    let mut k = from_stop_loss(|x| centered_stop_loss(spatial, x - shift), lo + shift, hi + shift, h);
    // second differences of (mean − x)₊ are the hat weights of an atom at the mean
    let a = atom(mean, h);
    k.scaled_add(&a, 1.0);
    k
}

fn product_part(
    temporal: &TemporalKernel,
    spatial: &SpatialKernel,
    c: f64,
    h: f64,
) -> Result<ProjectedKernel, KernelError> {
    if let Some(s) = temporal.atom() {
        return Ok(spatial_part(spatial, c * s, h));
    }
    if c == 0.0 {
        return Ok(spatial_part(spatial, 0.0, h));
    }
    let (s_lo, s_hi) = temporal.support(SUPPORT_EPS);
    let (w_lo, w_hi) = spatial.support(SUPPORT_EPS);
    let (lo, hi) = if c > 0.0 {
        (w_lo + c * s_lo, w_hi + c * s_hi)
    } else {
        (w_lo + c * s_hi, w_hi + c * s_lo)
    };
    let opts = QuadOptions {
        abs_tol: 1e-16,
        rel_tol: 1e-13,
        ..QuadOptions::default()
    };
    let kinks = spatial.breakpoints();
    let failure = RefCell::new(None);
    let psi = |x: f64| -> f64 {
        let mut pts = vec![s_lo];
        pts.extend(kinks.iter().map(|k| (x - k) / c));
        pts.push(s_hi);
        match integrate_with_breaks(
            |s| temporal.density(s) * stop_loss_spatial(spatial, x - c * s),
            &pts,
            &opts,
        ) {
            Ok(e) => e.value,
            Err(QuadError::IntervalLimit { value, .. }) => value,
            Err(e) => {
                failure.borrow_mut().get_or_insert(e);
                0.0
            }
        }
    };
    let k = from_stop_loss(psi, lo, hi, h);
    match failure.into_inner() {
        Some(e) => Err(e.into()),
        None => Ok(k),
    }
}

impl ProjectedKernel {
    fn scaled_add(&mut self, other: &ProjectedKernel, weight: f64) {
        if self.weights.is_empty() {
            self.first = other.first;
        }
        let lo = self.first.min(other.first);
        let hi = (self.first + self.weights.len() as isize).max(other.first + other.weights.len() as isize);
        let mut merged = vec![0.0; (hi - lo) as usize];
        for (k, w) in self.weights.iter().enumerate() {
            merged[(self.first - lo) as usize + k] += w;
        }
        for (k, w) in other.weights.iter().enumerate() {
            merged[(other.first - lo) as usize + k] += weight * w;
        }
        self.first = lo;
        self.weights = merged;
    }

    pub fn last(&self) -> isize {
        self.first + self.weights.len() as isize - 1
    }

    pub fn mass(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// `Σ_j w_j · jh`, the discrete mean of `R`.
    pub fn mean(&self) -> f64 {
        self.weights
            .iter()
            .enumerate()
            .map(|(k, w)| w * (self.first + k as isize) as f64 * self.h)
            .sum()
    }

    /// `Σ_j w_j e^{−λ j h}`.
    pub fn discrete_transform(&self, lambda: f64) -> f64 {
        self.weights
            .iter()
            .enumerate()
            .map(|(k, w)| w * (-lambda * (self.first + k as isize) as f64 * self.h).exp())
            .sum()
    }

    /// Padding needed on each side of a window for [`convolve_extended`](Self::convolve_extended).
    pub fn pads(&self) -> (usize, usize) {
        (self.last().max(0) as usize, (-self.first).max(0) as usize)
    }

    /// `out_i = Σ_j w_j y_{i−j}` for `i = 0 … n − 1`, where `y` holds the
    /// values at indices `−pad_left … n − 1 + pad_right` with padding at
    /// least [`pads`](Self::pads).
    pub fn convolve_extended(&self, y: &[f64], pad_left: usize, n: usize) -> Vec<f64> {
        let (need_l, need_r) = self.pads();
        assert!(
            pad_left >= need_l && y.len() >= pad_left + n + need_r,
            "insufficient padding"
        );
        (0..n)
            .map(|i| {
                let base = (pad_left + i) as isize - self.first;
                self.weights
                    .iter()
                    .enumerate()
                    .map(|(k, w)| w * y[(base - k as isize) as usize])
                    .sum()
            })
            .collect()
    }
}

/// Hat weights of `k₂` for speed `c` on a grid of step `h`.
pub fn build_k2(kernel: &SpatioTemporalKernel, c: f64, h: f64) -> Result<ProjectedKernel, KernelError> {
    match kernel {
        SpatioTemporalKernel::PointMass { h: s, a } => Ok(atom(c * s + a, h)),
        SpatioTemporalKernel::SeparableDeltaTime { h: s, spatial } => Ok(spatial_part(spatial, c * s, h)),
        SpatioTemporalKernel::SeparableProduct { temporal, spatial } => product_part(temporal, spatial, c, h),
        SpatioTemporalKernel::Mixture { components } => {
            let mut acc = ProjectedKernel {
                h,
                first: 0,
                weights: Vec::new(),
            };
            for comp in components.iter().filter(|c| c.weight > 0.0) {
                acc.scaled_add(&build_k2(&comp.kernel, c, h)?, comp.weight);
            }
            Ok(acc)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gauss() -> SpatialKernel {
        SpatialKernel::Gaussian {
            variance: 1.0,
            mean: 0.0,
        }
    }

    #[test]
    fn point_mass_projects_to_an_atom() {
        let k = build_k2(&SpatioTemporalKernel::point_mass(1.0, 0.0), 2.0, 0.05).unwrap();
        assert_eq!(k.first, 40);
        assert!((k.weights[0] - 1.0).abs() < 1e-12);
        assert!((k.mean() - 2.0).abs() < 1e-12);
        let k = build_k2(&SpatioTemporalKernel::point_mass(0.0, 0.0), 2.0, 0.05).unwrap();
        assert_eq!((k.first, k.weights.clone()), (0, vec![1.0, 0.0]));
    }

    #[test]
    fn delta_time_is_a_shifted_spatial_law() {
        let h = 0.05;
        let k = build_k2(&SpatioTemporalKernel::delta_time(1.0, gauss()), 1.5, h).unwrap();
        assert!((k.mass() - 1.0).abs() < 1e-12);
        assert!((k.mean() - 1.5).abs() < 1e-10);
        // hat weights of a smooth density are h·k₂(jh) up to O(h²)
        let j = (1.5 / h).round() as isize;
        let w = k.weights[(j - k.first) as usize];
        let dens = 1.0 / (2.0 * std::f64::consts::PI).sqrt();
        assert!((w / h - dens).abs() < 1e-3);
        assert!(k.weights.iter().all(|w| *w > -1e-15));
    }

    #[test]
    fn stop_loss_matches_quadrature() {
        use crate::quadrature::integrate_real_line;
        let opts = QuadOptions::default();
        let laws = [
            gauss(),
            SpatialKernel::TwoSidedExponential { rate: 1.7 },
            SpatialKernel::OneSidedExponential {
                rate: 0.8,
                side: Side::Negative,
            },
            SpatialKernel::OneSidedExponential {
                rate: 2.2,
                side: Side::Positive,
            },
        ];
        for law in &laws {
            for &x in &[-2.0, -0.3, 0.0, 0.6, 3.0] {
                let q = integrate_real_line(|w| law.density(w) * (w - x).max(0.0), x, &law.breakpoints(), 1.0, &opts)
                    .unwrap()
                    .value;
                assert!((q - stop_loss_spatial(law, x)).abs() < 1e-9, "{law:?} {x}");
            }
        }
    }

    #[test]
    fn product_family_has_unit_mass_and_right_mean() {
        let k = SpatioTemporalKernel::product(
            TemporalKernel::Exponential { rate: 2.0, delay: 0.5 },
            SpatialKernel::TwoSidedExponential { rate: 3.0 },
        );
        for &c in &[1.3, -0.7] {
            let p = build_k2(&k, c, 0.05).unwrap();
            assert!((p.mass() - 1.0).abs() < 1e-10, "{}", p.mass());
            assert!((p.mean() - c * 1.0).abs() < 1e-8, "{}", p.mean());
            let lam = 0.4;
            let exact = k.moment_unchecked(lam, c);
            assert!((p.discrete_transform(lam) - exact).abs() < 1e-3 * exact);
        }
    }

    #[test]
    fn convolution_of_linear_data_is_exact() {
        let k = build_k2(&SpatioTemporalKernel::delta_time(0.5, gauss()), 2.0, 0.1).unwrap();
        let (pl, pr) = k.pads();
        let n = 20;
        let y: Vec<f64> = (-(pl as isize)..(n + pr) as isize)
            .map(|i| 3.0 + 0.25 * i as f64 * 0.1)
            .collect();
        let out = k.convolve_extended(&y, pl, n);
        for (i, v) in out.iter().enumerate() {
            let t = i as f64 * 0.1;
            assert!((v - (3.0 + 0.25 * (t - 1.0))).abs() < 1e-10);
        }
    }
}
