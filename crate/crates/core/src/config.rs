//! Whole-pipeline configuration and its fingerprint.

use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::dataset::{read_json, SplitOptions};
use crate::encoders::EncoderConfig;
use crate::error::{Error, Result};
use crate::preprocess::PreprocessConfig;
use crate::segmentation::HeelStrikeParams;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub preprocess: PreprocessConfig,
    pub heel_strike: HeelStrikeParams,
    pub encoders: EncoderConfig,
    pub split: SplitOptions,
}

/// `config.json` written next to every artifact.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigRecord {
    pub fingerprint: String,
    pub signal_fingerprint: String,
    pub config: PipelineConfig,
}

impl PipelineConfig {
    /// Reads a JSON config; missing sections take their defaults.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let cfg: PipelineConfig = read_json(path.as_ref()).map_err(|e| match e {
            Error::Json(e) => Error::InvalidConfig(format!("{}: {e}", path.as_ref().display())),
            other => other,
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        self.preprocess.validate()?;
        self.heel_strike.validate()?;
        self.encoders.validate(self.preprocess.target_rate_hz)?;
        self.split.validate()
    }

    /// SHA-256 of the canonical JSON of the whole config.
    pub fn fingerprint(&self) -> String {
        fingerprint_of(&serde_json::to_value(self).expect("config serializes"))
    }

    /// Fingerprint of the settings that determine tensor contents
    /// (everything except the split).
    pub fn signal_fingerprint(&self) -> String {
        let mut v = serde_json::to_value(self).expect("config serializes");
        if let Value::Object(m) = &mut v {
            m.remove("split");
        }
        fingerprint_of(&v)
    }

    pub fn record(&self) -> ConfigRecord {
        ConfigRecord {
            fingerprint: self.fingerprint(),
            signal_fingerprint: self.signal_fingerprint(),
            config: self.clone(),
        }
    }
}

/// Compact JSON with object keys sorted at every level.
pub fn canonical_json(v: &Value) -> String {
    fn sorted(v: &Value) -> Value {
        match v {
            Value::Object(m) => {
                let mut keys: Vec<&String> = m.keys().collect();
                keys.sort();
                Value::Object(keys.into_iter().map(|k| (k.clone(), sorted(&m[k]))).collect())
            }
            Value::Array(a) => Value::Array(a.iter().map(sorted).collect()),
            other => other.clone(),
        }
    }
    sorted(v).to_string()
}

pub fn fingerprint_of(v: &Value) -> String {
    hex::encode(Sha256::digest(canonical_json(v).as_bytes()))
}
