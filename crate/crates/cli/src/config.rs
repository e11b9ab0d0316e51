use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

pub const CONFIG_VERSION: u32 = 1;
pub const SCHEMA_VERSION: u32 = 1;

/// Argument or configuration error; reported with exit code 2.
#[derive(Debug)]
pub struct Validation(pub String);

impl std::fmt::Display for Validation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Validation {}

pub fn bad(msg: impl Into<String>) -> anyhow::Error {
    Validation(msg.into()).into()
}

/// Parameters of one run. Every field is optional in a config file; flags
/// given on the command line take precedence.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub version: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mu: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub energy: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eps: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub h: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub res: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta_res: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub full_domain: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub collar: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub resolution: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub neck_res: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub angles: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rtol: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub atol: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c0: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub b: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r_init: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub orbit: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub path_file: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub covers: Option<usize>,
}

impl RunConfig {
    pub fn empty() -> Self {
        Self {
            version: CONFIG_VERSION,
            ..Self::default()
        }
    }

    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| bad(format!("cannot read {}: {e}", path.display())))?;
        let cfg: RunConfig = serde_json::from_str(&text)
            .map_err(|e| bad(format!("invalid config {}: {e}", path.display())))?;
        if cfg.version != CONFIG_VERSION {
            return Err(bad(format!(
                "unsupported config version {} (expected {CONFIG_VERSION})",
                cfg.version
            )));
        }
        Ok(cfg)
    }

    pub fn resolution_of(
        &self,
        name: &str,
        value: Option<usize>,
        default: usize,
    ) -> anyhow::Result<usize> {
        let v = value.unwrap_or(default);
        if v < 16 {
            return Err(bad(format!(
                "{name} = {v}: resolutions must be at least 16"
            )));
        }
        Ok(v)
    }

    pub fn tolerance_of(
        &self,
        name: &str,
        value: Option<f64>,
        default: f64,
    ) -> anyhow::Result<f64> {
        let v = value.unwrap_or(default);
        if !(v > 0.0 && v <= 1e-2) {
            return Err(bad(format!(
                "{name} = {v}: tolerances must lie in (0, 1e-2]"
            )));
        }
        Ok(v)
    }

    pub fn require(&self, name: &str, value: Option<f64>) -> anyhow::Result<f64> {
        value.ok_or_else(|| bad(format!("missing parameter {name}")))
    }
}

/// Copies every `Some` field of the command-line arguments into the config.
#[macro_export]
macro_rules! overlay {
    ($cfg:expr, $args:expr, $($field:ident),* $(,)?) => {
        $(
            if let Some(v) = $args.$field.clone() {
                $cfg.$field = Some(v);
            }
        )*
    };
}
