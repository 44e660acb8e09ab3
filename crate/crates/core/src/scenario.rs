//! Scenario documents: a flat key-value file (TOML, or JSON with the same keys)
//! describing one LoS Monte Carlo run.
//!
//! ```toml
//! hs_m = 0.12
//! tp_s = 2
//! ha_m = 0
//! htwr_m = 30
//! d_m = 1000
//! ```
//!
//! Everything else has a default: `dx_m = 1`, `window_s = 60`, `dt_s = 0.1`,
//! `n_realizations = 1000`, `seed = 0`, `convention = "energy_conserving"`,
//! 256 spectral components from 0.01 Hz up to 1.5 Hz (or 3·f_p if higher).

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::los_engine::{LinkGeometry, MonteCarloConfig};
use crate::sea_state::{validate_sea_state, AmplitudeConvention, GridSettings, SeaStateParams, Validation};

const REQUIRED_KEYS: [&str; 5] = ["hs_m", "tp_s", "ha_m", "htwr_m", "d_m"];

/// Raw document; every key optional so missing ones can be reported together.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioDoc {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hs_m: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tp_s: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ha_m: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub htwr_m: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d_m: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dx_m: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub window_s: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dt_s: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_realizations: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub convention: Option<AmplitudeConvention>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_components: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega_min: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega_max: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub water_depth_m: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub outputs: Option<PathBuf>,
}

/// A validated LoS run description.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub sea: SeaStateParams,
    pub geom: LinkGeometry,
    pub grid: GridSettings,
    pub window_s: f64,
    pub dt_s: f64,
    pub n_realizations: usize,
    pub master_seed: u64,
    pub convention: AmplitudeConvention,
    pub outputs: Option<PathBuf>,
    pub deep_water_warning: bool,
}

impl Scenario {
    pub fn monte_carlo(&self) -> MonteCarloConfig {
        MonteCarloConfig {
            sea: self.sea,
            grid: self.grid,
            geom: self.geom,
            window_s: self.window_s,
            dt_s: self.dt_s,
            n_realizations: self.n_realizations,
            master_seed: self.master_seed,
            convention: self.convention,
        }
    }

    /// Fully populated document (defaults written out).
    pub fn to_doc(&self) -> ScenarioDoc {
        ScenarioDoc {
            hs_m: Some(self.sea.h_s),
            tp_s: Some(self.sea.t_p),
            ha_m: Some(self.geom.antenna_height_m),
            htwr_m: Some(self.geom.tower_height_m),
            d_m: Some(self.geom.distance_m),
            dx_m: Some(self.geom.search_step_m),
            window_s: Some(self.window_s),
            dt_s: Some(self.dt_s),
            n_realizations: Some(self.n_realizations),
            seed: Some(self.master_seed),
            convention: Some(self.convention),
            n_components: Some(self.grid.n_components),
            omega_min: Some(self.grid.omega_min),
            omega_max: self.grid.omega_max,
            water_depth_m: self.sea.water_depth_m,
            outputs: self.outputs.clone(),
        }
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(&self.to_doc()).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn from_doc(doc: ScenarioDoc) -> Result<Self> {
        let present = [doc.hs_m, doc.tp_s, doc.ha_m, doc.htwr_m, doc.d_m];
        let missing: Vec<&str> =
            REQUIRED_KEYS.iter().zip(present).filter_map(|(k, v)| v.is_none().then_some(*k)).collect();
        if !missing.is_empty() {
            return Err(Error::Config(format!("missing required keys: {}", missing.join(", "))));
        }
        let defaults = GridSettings::default();
        let sea = SeaStateParams { h_s: doc.hs_m.unwrap(), t_p: doc.tp_s.unwrap(), water_depth_m: doc.water_depth_m };
        let deep_water_warning = match validate_sea_state(&sea)? {
            Validation::Reject(reason) => return Err(Error::Config(reason)),
            Validation::Accept { deep_water_warning } => deep_water_warning,
        };
        let scenario = Scenario {
            sea,
            geom: LinkGeometry {
                distance_m: doc.d_m.unwrap(),
                tower_height_m: doc.htwr_m.unwrap(),
                antenna_height_m: doc.ha_m.unwrap(),
                search_step_m: doc.dx_m.unwrap_or(1.0),
            },
            grid: GridSettings {
                n_components: doc.n_components.unwrap_or(defaults.n_components),
                omega_min: doc.omega_min.unwrap_or(defaults.omega_min),
                omega_max: doc.omega_max,
            },
            window_s: doc.window_s.unwrap_or(60.0),
            dt_s: doc.dt_s.unwrap_or(0.1),
            n_realizations: doc.n_realizations.unwrap_or(1000),
            master_seed: doc.seed.unwrap_or(0),
            convention: doc.convention.unwrap_or_default(),
            outputs: doc.outputs,
            deep_water_warning,
        };
        scenario.monte_carlo().prepare()?;
        Ok(scenario)
    }
}

/// Parses a scenario from TOML, or from JSON when the text starts with `{`.
///
/// A `los` run's manifest.json is accepted too; its `config` object is used.
pub fn parse_scenario(text: &str) -> Result<Scenario> {
    let doc: ScenarioDoc = if text.trim_start().starts_with('{') {
        let mut value: serde_json::Value = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        if value.get("command").and_then(|c| c.as_str()) == Some("los") {
            value = value["config"].take();
        }
        serde_json::from_value(value).map_err(|e| Error::Parse(e.to_string()))?
    } else {
        toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))?
    };
    Scenario::from_doc(doc)
}

pub fn parse_scenario_file(path: &Path) -> Result<Scenario> {
    let text = std::fs::read_to_string(path)?;
    parse_scenario(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = "hs_m = 0.12\ntp_s = 2\nha_m = 0\nhtwr_m = 30\nd_m = 1000\n";

    #[test]
    fn minimal_config_gets_defaults() {
        let s = parse_scenario(MINIMAL).unwrap();
        assert_eq!(s.window_s, 60.0);
        assert_eq!(s.dt_s, 0.1);
        assert_eq!(s.n_realizations, 1000);
        assert_eq!(s.geom.search_step_m, 1.0);
        assert_eq!(s.convention, AmplitudeConvention::EnergyConserving);
        assert_eq!(s.grid.n_components, 256);
    }

    #[test]
    fn json_is_equivalent() {
        let json = r#"{"hs_m":0.12,"tp_s":2,"ha_m":0,"htwr_m":30,"d_m":1000}"#;
        assert_eq!(parse_scenario(json).unwrap(), parse_scenario(MINIMAL).unwrap());
    }

    #[test]
    fn missing_keys_listed_together() {
        let err = parse_scenario("hs_m = 1\ntp_s = 4\n").unwrap_err().to_string();
        assert!(err.contains("ha_m") && err.contains("htwr_m") && err.contains("d_m"), "{err}");
    }

    #[test]
    fn rejections_name_the_rule() {
        let err = parse_scenario("hs_m = 4\ntp_s = 2\nha_m = 0\nhtwr_m = 30\nd_m = 1000\n").unwrap_err();
        assert!(err.to_string().contains("breaking"), "{err}");
        let err = parse_scenario(&format!("{MINIMAL}dt_s = 1.0\n")).unwrap_err();
        assert!(err.to_string().contains("1/f_N"), "{err}");
        let err = parse_scenario(&format!("{MINIMAL}colour = 3\n")).unwrap_err();
        assert!(err.to_string().contains("colour"), "{err}");
        assert!(parse_scenario(&format!("{MINIMAL}dt_s = 0.07\n")).is_err());
    }

    #[test]
    fn manifest_config_is_a_scenario() {
        let s = parse_scenario(MINIMAL).unwrap();
        let manifest = serde_json::json!({ "command": "los", "seed": 0, "config": s.to_doc() }).to_string();
        assert_eq!(parse_scenario(&manifest).unwrap(), s);
    }

    #[test]
    fn toml_round_trip() {
        let s = parse_scenario(&format!("{MINIMAL}seed = 17\nconvention = \"paper_literal\"\nn_realizations = 5\n"))
            .unwrap();
        let back = parse_scenario(&s.to_toml().unwrap()).unwrap();
        assert_eq!(back, s);
    }
}
