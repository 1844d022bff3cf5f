//! TOML config files. Keys mirror the field names of the core config types;
//! omitted engine keys take their defaults.

use std::path::Path;

use carpe_core::{EngineConfig, ScenarioConfig};
use serde::de::DeserializeOwned;

use crate::error::{HarnessError, Result};

fn load<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
    toml::from_str(&text).map_err(|e| HarnessError::Config { path: path.into(), message: e.to_string() })
}

pub fn load_engine_config(path: &Path) -> Result<EngineConfig> {
    let c: EngineConfig = load(path)?;
    c.validate()?;
    Ok(c)
}

pub fn load_scenario_config(path: &Path) -> Result<ScenarioConfig> {
    let c: ScenarioConfig = load(path)?;
    c.validate()?;
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn engine_defaults_fill_gaps() {
        let c: EngineConfig = toml::from_str("feature_dim = 8\nblacklist_enabled = false\n").unwrap();
        assert_eq!(c, EngineConfig { feature_dim: 8, blacklist_enabled: false, ..EngineConfig::default() });
        assert!(toml::from_str::<EngineConfig>("no_such_key = 1").is_err());
        let d: EngineConfig = toml::from_str("damping = \"undamped\"").unwrap();
        assert_eq!(d.damping, carpe_core::DampingMode::Undamped);
    }

    #[test]
    fn scenario_round_trips_through_toml() {
        let c = ScenarioConfig::lab_default(3);
        let text = toml::to_string(&c).unwrap();
        assert_eq!(toml::from_str::<ScenarioConfig>(&text).unwrap(), c);
    }

    #[test]
    fn missing_file_is_io() {
        let e = load_engine_config(Path::new("/nonexistent/engine.toml")).unwrap_err();
        assert_eq!(e.exit_code(), 2);
    }
}
