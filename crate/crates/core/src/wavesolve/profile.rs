//! Discretized wave profiles on uniform grids.

use serde::{Deserialize, Serialize};

/// Uniform abscissae `t₀ + i·h`, `i = 0 … n − 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub t0: f64,
    pub h: f64,
    pub n: usize,
}

impl Grid {
    /// Grid on `[−T, T]` with step `h` (rounded so that `T` is a node).
    pub fn symmetric(t_max: f64, h: f64) -> Self {
        let half = (t_max / h).round() as usize;
        Grid {
            t0: -(half as f64) * h,
            h,
            n: 2 * half + 1,
        }
    }

    pub fn t(&self, i: usize) -> f64 {
        self.t0 + i as f64 * self.h
    }

    /// Abscissa of a possibly out-of-range index.
    pub fn t_signed(&self, i: isize) -> f64 {
        self.t0 + i as f64 * self.h
    }

    pub fn t_end(&self) -> f64 {
        self.t(self.n - 1)
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.t(i)).collect()
    }
}

/// How a profile continues below its first grid point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LeftTail {
    Zero,
    Flat,
    Exponential { rate: f64 },
}

/// Translation gauge: the profile was shifted so that its first crossing of
/// `theta · sup` sits at `t = 0`; `shift` is the last shift applied.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Anchor {
    pub theta: f64,
    pub level: f64,
    pub shift: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    pub rate: f64,
    pub r2: f64,
    pub points: usize,
    /// Set when the expected rate is a double root, where tails carry a
    /// polynomial prefactor and a pure exponential fit is biased.
    #[serde(default)]
    pub multiplicity_warning: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Profile {
    pub grid: Grid,
    pub values: Vec<f64>,
    pub c: f64,
    pub anchor: Option<Anchor>,
    pub sup: f64,
    pub decay_fit: Option<DecayFit>,
    pub left: LeftTail,
    /// Constant continuation above the last grid point.
    pub right_value: f64,
    pub beta: Option<f64>,
    pub iterations: Option<usize>,
}

pub(crate) fn sup_of(values: &[f64]) -> f64 {
    values.iter().copied().fold(0.0, f64::max)
}

impl Profile {
    pub fn new(grid: Grid, values: Vec<f64>, c: f64) -> Self {
        assert_eq!(grid.n, values.len(), "grid and values differ in length");
        let sup = sup_of(&values);
        let right_value = values.last().copied().unwrap_or(0.0);
        Profile {
            grid,
            values,
            c,
            anchor: None,
            sup,
            decay_fit: None,
            left: LeftTail::Zero,
            right_value,
            beta: None,
            iterations: None,
        }
    }

    pub fn with_left(mut self, left: LeftTail) -> Self {
        self.left = left;
        self
    }

    /// Value at grid index `i`, which may lie outside the window.
    pub fn at_index(&self, i: isize) -> f64 {
        let n = self.values.len() as isize;
        if i >= n {
            return self.right_value;
        }
        if i >= 0 {
            return self.values[i as usize];
        }
        let v0 = self.values[0];
        match self.left {
            LeftTail::Zero => 0.0,
            LeftTail::Flat => v0,
            LeftTail::Exponential { rate } => v0 * (rate * i as f64 * self.grid.h).exp(),
        }
    }

    /// Linear interpolation, continued by the boundary extensions.
    pub fn value_at(&self, t: f64) -> f64 {
        let mut u = (t - self.grid.t0) / self.grid.h;
        if (u - u.round()).abs() < 1e-9 {
            u = u.round();
        }
        let i = u.floor();
        let frac = u - i;
        let i = i as isize;
        let a = self.at_index(i);
        if frac == 0.0 {
            return a;
        }
        let b = self.at_index(i + 1);
        a + (b - a) * frac
    }

    /// Values at indices `−pad_left … n − 1 + pad_right`.
    pub fn extended(&self, pad_left: usize, pad_right: usize) -> Vec<f64> {
        let n = self.values.len() as isize;
        (-(pad_left as isize)..n + pad_right as isize)
            .map(|i| self.at_index(i))
            .collect()
    }

    pub fn refresh_sup(&mut self) {
        self.sup = sup_of(&self.values);
    }

    /// First `t` with `φ(t) = level`, scanning from the left.
    pub fn first_crossing(&self, level: f64) -> Option<f64> {
        let v = &self.values;
        if v.first().is_none_or(|x| *x >= level) {
            return v.first().map(|_| self.grid.t0);
        }
        (1..v.len()).find(|&i| v[i] >= level).map(|i| {
            let (a, b) = (v[i - 1], v[i]);
            self.grid.t(i - 1) + self.grid.h * (level - a) / (b - a)
        })
    }

    /// The same function sampled at `t_i + shift`.
    pub fn shifted(&self, shift: f64) -> Profile {
        let values: Vec<f64> = (0..self.grid.n)
            .map(|i| self.value_at(self.grid.t(i) + shift))
            .collect();
        let mut p = self.clone();
        p.values = values;
        p.refresh_sup();
        p
    }
}
