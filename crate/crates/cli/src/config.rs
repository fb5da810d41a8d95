//! Versioned JSON run configurations.
//!
//! Every file carries `"schema_version": 1` at the top level. Interferometer
//! settings use the field names of [`InterferometerConfig`]; the seed is given as
//! `"drive": {"n_s": 15}` or `"drive": {"alpha": 2.5}` and the second gain may be
//! the string `"infinite"`.

use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use su11::interferometer::SecondSqueeze;
use su11::optimize::PhaseSearch;
use su11::sensitivity::DetectionStrategy;
use su11::{InterferometerConfig, SpaConfig};

pub const SCHEMA_VERSION: u32 = 1;

/// Reads a JSON file, checks `schema_version`, then decodes it.
pub fn load_config<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_config(&text).with_context(|| format!("in {}", path.display()))
}

pub fn parse_config<T: DeserializeOwned>(text: &str) -> Result<T> {
    let value: serde_json::Value = serde_json::from_str(text)?;
    match value.get("schema_version").and_then(|v| v.as_u64()) {
        Some(v) if v == SCHEMA_VERSION as u64 => {}
        Some(v) => bail!("schema_version {v} is not supported (expected {SCHEMA_VERSION})"),
        None => bail!("missing integer field schema_version"),
    }
    Ok(serde_json::from_value(value)?)
}

/// Input of `su11 evaluate`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvaluateConfig {
    pub schema_version: u32,
    pub interferometer: InterferometerConfig,
    /// Linear absorption inside the sample. Replaces `eta_in` when present.
    #[serde(default)]
    pub spa: Option<SpaConfig>,
    /// Absorbance used for the signal-to-noise ratio in the output.
    #[serde(default)]
    pub eps_m: Option<f64>,
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "target", rename_all = "snake_case")]
pub enum OptimizeTarget {
    /// Both phases at fixed squeezing.
    Phases {
        interferometer: InterferometerConfig,
        #[serde(default)]
        search: Option<PhaseSearch>,
    },
    /// First squeezing at fixed photon number, phases at `(pi/2, pi)`.
    R1 {
        m: u32,
        n_s: f64,
        r2: SecondSqueeze,
        #[serde(default = "one")]
        eta_in: f64,
        #[serde(default = "one")]
        eta_ex: f64,
    },
    /// Exponent of the optimised sensitivity over a photon-number grid.
    Scaling {
        m: u32,
        strategy: DetectionStrategy,
        #[serde(default = "one")]
        eta_in: f64,
        /// Defaults to nine log-spaced points from 100 to 10^4.
        #[serde(default)]
        ns_grid: Option<Vec<f64>>,
    },
}

/// Input of `su11 optimize`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizeConfig {
    pub schema_version: u32,
    #[serde(flatten)]
    pub target: OptimizeTarget,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn evaluate_config_parses() {
        let text = r#"{
            "schema_version": 1,
            "interferometer": {
                "m": 2, "r1": 0.939, "r2": 1.447, "phi_las": 1.5707963267948966,
                "phi_int": 3.141592653589793, "eta_in": 1.0, "eta_ex": 1.0,
                "drive": {"n_s": 15.0}
            }
        }"#;
        let c: EvaluateConfig = parse_config(text).unwrap();
        assert_eq!(c.interferometer, InterferometerConfig::new(2, 15.0, 0.939, 1.447));
    }

    #[test]
    fn version_is_checked() {
        assert!(parse_config::<EvaluateConfig>(r#"{"schema_version": 2}"#).is_err());
        assert!(parse_config::<EvaluateConfig>(r#"{"interferometer": {}}"#).is_err());
    }

    #[test]
    fn optimize_targets() {
        let c: OptimizeConfig =
            parse_config(r#"{"schema_version": 1, "target": "r1", "m": 2, "n_s": 100, "r2": "infinite"}"#).unwrap();
        assert!(matches!(
            c.target,
            OptimizeTarget::R1 {
                r2: SecondSqueeze::Infinite,
                ..
            }
        ));
        let c: OptimizeConfig =
            parse_config(r#"{"schema_version": 1, "target": "scaling", "m": 3, "strategy": "su11-optimal"}"#).unwrap();
        assert!(matches!(c.target, OptimizeTarget::Scaling { m: 3, .. }));
    }
}
