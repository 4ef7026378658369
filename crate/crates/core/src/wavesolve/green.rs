//! Two-sided exponential Green kernels and their exact convolution with
//! piecewise-linear data on a uniform grid.

use serde::{Deserialize, Serialize};

use super::profile::LeftTail;

/// `k₁(s) = σ⁻¹ e^{νs}` for `s ≥ 0`, `σ⁻¹ e^{μs}` for `s < 0`, where
/// `ν < 0 < μ` solve `z² − cz − β = 0` and `σ = √(c² + 4β)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct K1Kernel {
    pub c: f64,
    pub beta: f64,
    pub nu: f64,
    pub mu: f64,
    pub sigma: f64,
}

pub fn build_k1(c: f64, beta: f64) -> K1Kernel {
    let sigma = (c * c + 4.0 * beta).sqrt();
    K1Kernel {
        c,
        beta,
        nu: 0.5 * (c - sigma),
        mu: 0.5 * (c + sigma),
        sigma,
    }
}

impl K1Kernel {
    pub fn eval(&self, s: f64) -> f64 {
        self.green().eval(s)
    }

    /// Bilateral transform `∫ k₁(s) e^{-zs} ds = 1/(β + cz − z²)` on `(ν, μ)`.
    pub fn transform(&self, z: f64) -> f64 {
        if z > self.nu && z < self.mu {
            1.0 / (self.beta + self.c * z - z * z)
        } else {
            f64::INFINITY
        }
    }

    pub fn integral(&self) -> f64 {
        1.0 / self.beta
    }

    pub fn green(&self) -> ExpGreen {
        ExpGreen {
            prefactor: 1.0 / self.sigma,
            nu: self.nu,
            mu: self.mu,
        }
    }
}

/// `A·e^{νs}` for `s ≥ 0` and `A·e^{μs}` for `s < 0`, with `ν < 0 < μ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExpGreen {
    pub prefactor: f64,
    pub nu: f64,
    pub mu: f64,
}

impl ExpGreen {
    /// Green function of `Dψ'' − cψ' − γψ = −H`.
    pub fn for_operator(c: f64, diffusivity: f64, decay: f64) -> Self {
        let disc = (c * c + 4.0 * diffusivity * decay).sqrt();
        ExpGreen {
            prefactor: 1.0 / disc,
            nu: (c - disc) / (2.0 * diffusivity),
            mu: (c + disc) / (2.0 * diffusivity),
        }
    }

    pub fn eval(&self, s: f64) -> f64 {
        if s >= 0.0 {
            self.prefactor * (self.nu * s).exp()
        } else {
            self.prefactor * (self.mu * s).exp()
        }
    }

    pub fn integral(&self) -> f64 {
        self.prefactor * (1.0 / self.mu - 1.0 / self.nu)
    }

    pub fn stepper(&self, h: f64) -> ExpStepper {
        let a = self.nu * h;
        let b = -self.mu * h;
        ExpStepper {
            green: *self,
            h,
            decay_left: a.exp(),
            decay_right: b.exp(),
            wl0: h * e1(a),
            wl1: h * (e0(a) - e1(a)),
            wr0: h * (e0(b) - e1(b)),
            wr1: h * e1(b),
        }
    }
}

const SERIES_CUTOFF: f64 = 0.5;

/// `(e^a − 1)/a = Σ aᵏ/(k + 1)!`.
fn e0(a: f64) -> f64 {
    if a.abs() < SERIES_CUTOFF {
        let (mut term, mut sum) = (1.0, 0.0);
        for k in 0..20 {
            sum += term / (k + 1) as f64;
            term *= a / (k + 1) as f64;
        }
        sum
    } else {
        a.exp_m1() / a
    }
}

/// `∫₀¹ u e^{au} du = (e^a(a − 1) + 1)/a² = Σ aᵏ/(k!(k + 2))`.
fn e1(a: f64) -> f64 {
    if a.abs() < SERIES_CUTOFF {
        let (mut term, mut sum) = (1.0, 0.0);
        for k in 0..20 {
            sum += term / (k + 2) as f64;
            term *= a / (k + 1) as f64;
        }
        sum
    } else {
        (a.exp() * (a - 1.0) + 1.0) / (a * a)
    }
}

/// Precomputed weights for convolving an [`ExpGreen`] with the piecewise
/// linear interpolant of grid data, via one forward and one backward scan.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpStepper {
    pub green: ExpGreen,
    pub h: f64,
    decay_left: f64,
    decay_right: f64,
    wl0: f64,
    wl1: f64,
    wr0: f64,
    wr1: f64,
}

impl ExpStepper {
    /// Left-branch mass attributed to the point `t₀` for data extended to the
    /// left by `left`.
    fn left_seed(&self, g0: f64, left: LeftTail) -> f64 {
        match left {
            LeftTail::Zero => self.wl1 * g0,
            LeftTail::Flat => self.tail_sum(g0, 0.0),
            LeftTail::Exponential { rate } => self.tail_sum(g0, rate),
        }
    }

    fn tail_sum(&self, g0: f64, rate: f64) -> f64 {
        let ratio = ((self.green.nu - rate) * self.h).exp();
        g0 * (self.wl1 + self.wl0 * (-rate * self.h).exp()) / (1.0 - ratio)
    }

    /// `∫ k(t_i − x) G(x) dx` for the piecewise-linear `G` through `g`,
    /// extended by `left` below the grid and by the constant `right_value`
    /// above it.
    pub fn convolve(&self, g: &[f64], left: LeftTail, right_value: f64) -> Vec<f64> {
        let n = g.len();
        let mut out = vec![0.0; n];
        if n == 0 {
            return out;
        }
        let mut acc = self.left_seed(g[0], left);
        out[0] = acc;
        for i in 1..n {
            acc = self.decay_left * acc + self.wl0 * g[i - 1] + self.wl1 * g[i];
            out[i] = acc;
        }
        let mu = self.green.mu;
        let mut acc = self.wr0 * g[n - 1] + self.wr1 * right_value + right_value * self.decay_right / mu;
        out[n - 1] += acc;
        for i in (0..n - 1).rev() {
            acc = self.decay_right * acc + self.wr0 * g[i] + self.wr1 * g[i + 1];
            out[i] += acc;
        }
        let a = self.green.prefactor;
        out.iter_mut().for_each(|v| *v *= a);
        out
    }

    /// Response of [`convolve`](Self::convolve) to grid data `e^{λ t_i}`,
    /// divided by `e^{λ t_i}`; finite for `ν < λ < μ`.
    pub fn discrete_transform(&self, lambda: f64) -> f64 {
        let h = self.h;
        let left = (self.wl1 + self.wl0 * (-lambda * h).exp()) / (1.0 - ((self.green.nu - lambda) * h).exp());
        let right = (self.wr0 + self.wr1 * (lambda * h).exp()) / (1.0 - ((lambda - self.green.mu) * h).exp());
        self.green.prefactor * (left + right)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::{integrate_real_line, QuadOptions};

    #[test]
    fn k1_examples() {
        let k = build_k1(0.0, 4.0);
        assert_eq!((k.nu, k.mu, k.sigma), (-2.0, 2.0, 4.0));
        let k = build_k1(3.0, 4.0);
        assert_eq!((k.nu, k.mu, k.sigma), (-1.0, 4.0, 5.0));
        assert!((k.nu * k.mu + k.beta).abs() < 1e-15);
    }

    #[test]
    fn k1_mass_and_transform_by_quadrature() {
        let opts = QuadOptions::default();
        for &(c, beta) in &[(0.0, 4.0), (3.0, 4.0), (-1.5, 0.7), (2.0, 6.0)] {
            let k = build_k1(c, beta);
            let m = integrate_real_line(|s| k.eval(s), 0.0, &[], 1.0, &opts).unwrap();
            assert!((m.value - 1.0 / beta).abs() < 1e-10);
            let z = 0.3 * k.mu;
            let t = integrate_real_line(|s| k.eval(s) * (-z * s).exp(), 0.0, &[], 1.0, &opts).unwrap();
            assert!((t.value - k.transform(z)).abs() < 1e-9 * t.value);
        }
    }

    #[test]
    fn weights_series_are_continuous() {
        for &a in &[SERIES_CUTOFF, -SERIES_CUTOFF] {
            let below = a * (1.0 - 1e-14);
            let above = a * (1.0 + 1e-14);
            assert!((e1(below) - e1(above)).abs() < 1e-14);
            assert!((e0(below) - e0(above)).abs() < 1e-14);
        }
    }

    #[test]
    fn constants_are_reproduced_exactly() {
        let k = build_k1(1.3, 2.5);
        let st = k.green().stepper(0.05);
        let g = vec![2.5 * 0.8; 400];
        let out = st.convolve(&g, LeftTail::Flat, 2.5 * 0.8);
        for v in out {
            assert!((v - 0.8).abs() < 1e-13, "{v}");
        }
    }

    #[test]
    fn exponential_tail_is_an_eigenfunction() {
        let k = build_k1(2.0, 3.0);
        let h = 0.05;
        let st = k.green().stepper(h);
        let lam = 0.4;
        // the right extension is flat, so only the left part is compared
        let n = 800;
        let g: Vec<f64> = (0..n).map(|i| (lam * i as f64 * h).exp()).collect();
        let out = st.convolve(&g, LeftTail::Exponential { rate: lam }, g[n - 1]);
        let kh = st.discrete_transform(lam);
        assert!((kh - k.transform(lam)).abs() < 1e-3 * kh);
        for i in 0..n / 4 {
            assert!((out[i] / g[i] - kh).abs() < 1e-10 * kh, "{i}");
        }
    }

    #[test]
    fn piecewise_linear_data_is_integrated_exactly() {
        let k = build_k1(0.7, 1.9);
        let h = 0.1;
        let st = k.green().stepper(h);
        let n = 60;
        let t0 = -3.0;
        let g: Vec<f64> = (0..n)
            .map(|i| {
                let t = t0 + i as f64 * h;
                (t.sin() + 1.5).max(0.0)
            })
            .collect();
        let out = st.convolve(&g, LeftTail::Zero, g[n - 1]);
        let interp = |x: f64| -> f64 {
            if x <= t0 - h {
                return 0.0;
            }
            if x < t0 {
                return g[0] * (x - (t0 - h)) / h;
            }
            let u = (x - t0) / h;
            let i = u.floor() as usize;
            if i + 1 >= n {
                return g[n - 1];
            }
            let f = u - i as f64;
            g[i] * (1.0 - f) + g[i + 1] * f
        };
        let opts = QuadOptions {
            rel_tol: 1e-12,
            ..QuadOptions::default()
        };
        let mut breaks: Vec<f64> = (0..=n).map(|i| t0 - h + i as f64 * h).collect();
        for &i in &[0usize, 17, 59] {
            let ti = t0 + i as f64 * h;
            breaks.push(ti);
            let exact = integrate_real_line(|x| k.eval(ti - x) * interp(x), ti, &breaks, 1.0, &opts)
                .unwrap()
                .value;
            assert!((out[i] - exact).abs() < 1e-10, "{i}: {} vs {exact}", out[i]);
        }
    }
}
