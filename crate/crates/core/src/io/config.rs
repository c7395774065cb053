use std::path::Path;

use serde_json::Value;

use crate::error::{Error, Result};
use crate::experiments::ExperimentConfig;

/// Parses a flat JSON experiment config. Unknown keys are rejected; missing
/// keys take their defaults, so `{}` is the reference setup.
pub fn parse_experiment_config(text: &str) -> Result<ExperimentConfig> {
    let value: Value = serde_json::from_str(text)?;
    let Value::Object(map) = &value else {
        return Err(Error::InvalidConfig("config must be a JSON object".into()));
    };
    if let Some(key) = map.keys().find(|k| !ExperimentConfig::FIELDS.contains(&k.as_str())) {
        return Err(Error::InvalidConfig(format!("unknown config field `{key}`")));
    }
    let config: ExperimentConfig = serde_json::from_value(value)?;
    config.validate()?;
    Ok(config)
}

pub fn load_experiment_config(path: impl AsRef<Path>) -> Result<ExperimentConfig> {
    parse_experiment_config(&std::fs::read_to_string(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_object_is_default() {
        assert_eq!(parse_experiment_config("{}").unwrap(), ExperimentConfig::default());
    }

    #[test]
    fn rejects_unknown_and_invalid() {
        assert!(matches!(parse_experiment_config(r#"{"m": 3}"#), Err(Error::InvalidConfig(_))));
        assert!(parse_experiment_config("[]").is_err());
        assert!(parse_experiment_config(r#"{"M": 0}"#).is_err());
        assert!(parse_experiment_config(r#"{"M": -2}"#).is_err());
        assert!(parse_experiment_config("{").is_err());
    }

    #[test]
    fn echo_round_trips() {
        let cfg = parse_experiment_config(r#"{"K": 0, "seed": 17, "grid_step": 2.5, "schemes": ["mrt", "boosted"]}"#)
            .unwrap();
        let echoed = serde_json::to_string(&cfg).unwrap();
        assert_eq!(parse_experiment_config(&echoed).unwrap(), cfg);
    }
}
