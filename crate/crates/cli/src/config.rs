//! Run configuration: one JSON document with a model and command parameters.

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use wavefront_core::kernels::{SpatialKernel, SpatioTemporalKernel};
use wavefront_core::systems::{EpidemicModel, ExposureLaw, PopulationModel};
use wavefront_core::wavesolve::{InitPreset, SolverConfig};
use wavefront_core::{Nonlinearity, ReactionTerm, WaveModel};

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum ModelSpec {
    Scalar {
        f: ReactionTerm,
        g: Nonlinearity,
        lipschitz: f64,
        kernel: SpatioTemporalKernel,
    },
    Epidemic {
        f: ReactionTerm,
        g: Nonlinearity,
        lipschitz: f64,
        /// Spatial dispersal kernel.
        kernel: SpatialKernel,
        alpha: f64,
        latency: ExposureLaw,
    },
    Population {
        f: ReactionTerm,
        g: Nonlinearity,
        lipschitz: f64,
        kernel: SpatioTemporalKernel,
        diffusivity: f64,
        decay: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CommandSpec {
    /// Speed grid for `speeds`; defaulted around `c*` and `c⋆` when absent.
    pub speeds: Option<Vec<f64>>,
    /// Speed for `solve` and `verify`.
    pub c: Option<f64>,
    pub solver: SolverConfig,
    pub init: Option<InitPreset>,
    /// Speeds for `sweep`, and the non-existence sweep of `verify`.
    pub sweep: Option<Vec<f64>>,
    /// Amplitude bound `M` for `β` and the hypothesis checks.
    pub amplitude: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub model: ModelSpec,
    #[serde(default)]
    pub command: CommandSpec,
    #[serde(default)]
    pub seed: u64,
}

/// Parses a config, naming the JSON path of the first offending field.
pub fn parse_config(text: &str) -> Result<RunConfig, CliError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let cfg: RunConfig = serde_path_to_error::deserialize(de).map_err(|e| {
        let located = serde_json::from_str::<Value>(text)
            .ok()
            .and_then(|v| locate_model_error(&v));
        match located {
            Some((path, msg)) if e.path().to_string() == "model" => CliError::Config(format!("at `{path}`: {msg}")),
            _ => CliError::Config(format!("at `{}`: {}", e.path(), e.inner())),
        }
    })?;
    cfg.validate()?;
    Ok(cfg)
}

fn member_error<T: DeserializeOwned>(model: &Value, name: &str) -> Option<(String, String)> {
    let v = model.get(name)?;
    T::deserialize(v)
        .err()
        .map(|e| (format!("model.{name}"), e.to_string()))
}

/// Path tracking stops at the internally tagged model, so its members are
/// re-checked one at a time to name the offending field.
fn locate_model_error(root: &Value) -> Option<(String, String)> {
    let m = root.get("model")?;
    let epidemic = m.get("type").and_then(Value::as_str) == Some("epidemic");
    member_error::<ReactionTerm>(m, "f")
        .or_else(|| member_error::<Nonlinearity>(m, "g"))
        .or_else(|| {
            if epidemic {
                member_error::<SpatialKernel>(m, "kernel").or_else(|| member_error::<ExposureLaw>(m, "latency"))
            } else {
                member_error::<SpatioTemporalKernel>(m, "kernel")
            }
        })
}

fn check_grid(name: &str, grid: &[f64]) -> Result<(), CliError> {
    if grid.iter().any(|c| !c.is_finite()) {
        return Err(CliError::Config(format!("at `command.{name}`: speeds must be finite")));
    }
    if grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(CliError::Config(format!(
            "at `command.{name}`: speeds must be strictly increasing"
        )));
    }
    Ok(())
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), CliError> {
        if let Some(s) = &self.command.speeds {
            check_grid("speeds", s)?;
        }
        if let Some(s) = &self.command.sweep {
            check_grid("sweep", s)?;
        }
        if let Some(c) = self.command.c {
            if !c.is_finite() {
                return Err(CliError::Config("at `command.c`: speed must be finite".into()));
            }
        }
        if let Some(m) = self.command.amplitude {
            if !(m.is_finite() && m > 0.0) {
                return Err(CliError::Config("at `command.amplitude`: must be positive".into()));
            }
        }
        match &self.model {
            ModelSpec::Scalar { f, g, kernel, .. } => {
                let at = |e: String| CliError::Config(format!("at `model`: {e}"));
                g.validate().map_err(at)?;
                f.validate().map_err(at)?;
                kernel.validate().map_err(|e| at(e.to_string()))
            }
            _ => self.scalar_model().map(|_| ()),
        }
    }

    /// A scalar model built without the monostability and Lipschitz checks,
    /// for reporting on hypotheses a config violates.
    pub fn unchecked_scalar_model(&self) -> Option<WaveModel> {
        match &self.model {
            ModelSpec::Scalar {
                f,
                g,
                lipschitz,
                kernel,
            } => Some(WaveModel {
                f: f.clone(),
                g: g.clone(),
                lipschitz: *lipschitz,
                kernel: kernel.clone(),
            }),
            _ => None,
        }
    }

    /// The scalar wave equation behind the model.
    pub fn scalar_model(&self) -> Result<WaveModel, CliError> {
        let model = match &self.model {
            ModelSpec::Scalar {
                f,
                g,
                lipschitz,
                kernel,
            } => WaveModel::new(f.clone(), g.clone(), *lipschitz, kernel.clone())
                .map_err(|e| CliError::Config(format!("at `model`: {e}")))?,
            ModelSpec::Epidemic { .. } => self.epidemic().and_then(|m| {
                m.effective_model()
                    .map_err(|e| CliError::Config(format!("at `model`: {e}")))
            })?,
            ModelSpec::Population { .. } => self
                .population()
                .and_then(|m| m.wave_model().map_err(|e| CliError::Config(format!("at `model`: {e}"))))?,
        };
        Ok(model)
    }

    pub fn epidemic(&self) -> Result<EpidemicModel, CliError> {
        match &self.model {
            ModelSpec::Epidemic {
                f,
                g,
                lipschitz,
                kernel,
                alpha,
                latency,
            } => Ok(EpidemicModel {
                alpha: *alpha,
                latency: latency.clone(),
                spatial: *kernel,
                f: f.clone(),
                g: g.clone(),
                lipschitz: *lipschitz,
            }),
            _ => Err(CliError::Config("model is not epidemic".into())),
        }
    }

    pub fn population(&self) -> Result<PopulationModel, CliError> {
        match &self.model {
            ModelSpec::Population {
                f,
                g,
                lipschitz,
                kernel,
                diffusivity,
                decay,
            } => Ok(PopulationModel {
                diffusivity: *diffusivity,
                decay: *decay,
                kernel: kernel.clone(),
                f: f.clone(),
                g: g.clone(),
                lipschitz: *lipschitz,
            }),
            _ => Err(CliError::Config("model is not a population model".into())),
        }
    }

    pub fn to_canonical_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }
}
