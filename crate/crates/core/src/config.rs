//! CLI-facing configuration: a flat, schema-validated JSON mirror of the
//! model, grid, data and solver parameters. Unknown keys are rejected and
//! every run echoes its resolved configuration for reproducibility.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::models::{AbcdParams, Dim, ModelKind, ModelSpec};
use crate::ratelab::GridSpec;
use crate::solver::{DataParams, SolverConfig};

/// Flat key-value record of a model: `(kind, dim, eps, mu, a, b, c, d, h0)`.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    pub kind: ModelKind,
    pub dim: Dim,
    pub eps: f64,
    pub mu: f64,
    #[serde(default)]
    pub a: f64,
    #[serde(default)]
    pub b: f64,
    #[serde(default)]
    pub c: f64,
    #[serde(default = "default_d")]
    pub d: f64,
    #[serde(default = "default_h0")]
    pub h0: f64,
}

fn default_d() -> f64 {
    1.0 / 3.0
}

fn default_h0() -> f64 {
    0.5
}

impl ModelConfig {
    pub fn to_spec(&self) -> Result<ModelSpec> {
        let abcd = match self.kind {
            ModelKind::Abcd => AbcdParams::new(self.a, self.b, self.c, self.d)?,
            _ => AbcdParams::classical(),
        };
        ModelSpec::new(self.kind, self.dim, self.eps, self.mu, abcd, self.h0)
    }

    pub fn from_spec(spec: &ModelSpec) -> Self {
        ModelConfig {
            kind: spec.kind,
            dim: spec.dim,
            eps: spec.eps,
            mu: spec.mu,
            a: spec.abcd.a,
            b: spec.abcd.b,
            c: spec.abcd.c,
            d: spec.abcd.d,
            h0: spec.h0,
        }
    }
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub t_end: f64,
}

/// Top-level configuration of `rigidlid simulate`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateConfig {
    pub model: ModelConfig,
    pub grid: GridSpec,
    #[serde(default)]
    pub data: DataParams,
    #[serde(default)]
    pub solver: SolverConfig,
    pub run: RunConfig,
}

impl SimulateConfig {
    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_str_anchored(&text, &path.display().to_string())
    }

    /// Parse with serde_json's line/column diagnostics surfaced.
    pub fn from_str_anchored(text: &str, origin: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(format!("{origin}: {e}")))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes") + "\n"
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const GOOD: &str = r#"{
        "model": { "kind": "classical", "dim": "1", "eps": 0.1, "mu": 1.0 },
        "grid": { "modes": 64, "length": 100.0 },
        "run": { "t_end": 0.5 }
    }"#;

    #[test]
    fn minimal_config_parses_with_defaults() {
        let cfg = SimulateConfig::from_str_anchored(GOOD, "test").unwrap();
        assert_eq!(cfg.solver.snapshot_count, 33);
        assert_eq!(cfg.data.width, 2.0);
        let spec = cfg.model.to_spec().unwrap();
        assert_eq!(spec.abcd, AbcdParams::classical());
    }

    #[test]
    fn unknown_keys_rejected_with_location() {
        let bad = GOOD.replace("\"t_end\": 0.5", "\"t_end\": 0.5, \"bogus\": 1");
        let err = SimulateConfig::from_str_anchored(&bad, "cfg.json").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("bogus"), "{msg}");
        assert!(msg.contains("line"), "{msg}");
    }

    #[test]
    fn config_round_trips_through_echo() {
        let cfg = SimulateConfig::from_str_anchored(GOOD, "test").unwrap();
        let echoed = cfg.to_json();
        let back = SimulateConfig::from_str_anchored(&echoed, "echo").unwrap();
        assert_eq!(back.model.eps, cfg.model.eps);
        assert_eq!(back.grid.modes, cfg.grid.modes);
    }
}
