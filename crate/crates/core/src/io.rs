//! Profile files: a `t,phi` CSV and a JSON sidecar with the solve metadata.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::wavesolve::{Anchor, DecayFit, Grid, LeftTail, Profile};

#[derive(Debug, Error)]
pub enum IoError {
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("{0}")]
    Format(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileMeta {
    pub c: f64,
    pub beta: Option<f64>,
    pub anchor: Option<Anchor>,
    pub sup: f64,
    pub decay_fit: Option<DecayFit>,
    pub iterations: Option<usize>,
    pub residual: Option<f64>,
    #[serde(default)]
    pub lambda1: Option<f64>,
    #[serde(default)]
    pub verdict: Option<String>,
    #[serde(default)]
    pub experimental: bool,
    pub h: f64,
    pub left: LeftTail,
    pub right_value: f64,
}

impl ProfileMeta {
    pub fn of(p: &Profile) -> Self {
        ProfileMeta {
            c: p.c,
            beta: p.beta,
            anchor: p.anchor,
            sup: p.sup,
            decay_fit: p.decay_fit,
            iterations: p.iterations,
            residual: None,
            lambda1: None,
            verdict: None,
            experimental: false,
            h: p.grid.h,
            left: p.left,
            right_value: p.right_value,
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct Row {
    t: f64,
    phi: f64,
}

pub fn write_profile_csv(p: &Profile) -> Result<String, IoError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for (i, v) in p.values.iter().enumerate() {
        w.serialize(Row {
            t: p.grid.t(i),
            phi: *v,
        })?;
    }
    let bytes = w.into_inner().map_err(|e| IoError::Format(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| IoError::Format(e.to_string()))
}

/// Columns `t` and `phi`, both finite.
pub fn parse_profile_csv(text: &str) -> Result<(Vec<f64>, Vec<f64>), IoError> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let headers = r.headers()?.clone();
    if headers.len() != 2 || &headers[0] != "t" || &headers[1] != "phi" {
        return Err(IoError::Format(format!(
            "expected header t,phi, got {:?}",
            headers.iter().collect::<Vec<_>>()
        )));
    }
    let (mut t, mut phi) = (Vec::new(), Vec::new());
    for row in r.deserialize() {
        let row: Row = row?;
        if !(row.t.is_finite() && row.phi.is_finite()) {
            return Err(IoError::Format(format!("non-finite entry at t = {}", row.t)));
        }
        t.push(row.t);
        phi.push(row.phi);
    }
    Ok((t, phi))
}

pub fn write_profile_meta(meta: &ProfileMeta) -> Result<String, IoError> {
    Ok(serde_json::to_string_pretty(meta)?)
}

pub fn parse_profile_meta(text: &str) -> Result<ProfileMeta, IoError> {
    let meta: ProfileMeta = serde_json::from_str(text)?;
    if !(meta.h.is_finite() && meta.h > 0.0) {
        return Err(IoError::Format(format!("grid step h = {} must be positive", meta.h)));
    }
    Ok(meta)
}

/// Rebuilds a profile, checking that the abscissae are uniform with step `h`.
pub fn profile_from_parts(t: &[f64], phi: &[f64], meta: &ProfileMeta) -> Result<Profile, IoError> {
    if t.len() < 2 || t.len() != phi.len() {
        return Err(IoError::Format("profile needs at least two rows".into()));
    }
    let h = meta.h;
    for (i, ti) in t.iter().enumerate() {
        let expect = t[0] + i as f64 * h;
        if (ti - expect).abs() > 1e-9 * (1.0 + expect.abs()) {
            return Err(IoError::Format(format!(
                "row {i}: t = {ti} is off the grid (expected {expect})"
            )));
        }
    }
    let grid = Grid {
        t0: t[0],
        h,
        n: t.len(),
    };
    let mut p = Profile::new(grid, phi.to_vec(), meta.c).with_left(meta.left);
    p.right_value = meta.right_value;
    p.anchor = meta.anchor;
    p.decay_fit = meta.decay_fit;
    p.beta = meta.beta;
    p.iterations = meta.iterations;
    Ok(p)
}
