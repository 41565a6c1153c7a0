//! Run, sweep, and evaluation specifications: UTF-8 JSON documents whose
//! keys mirror the spec structs. Scalar fields can be overridden from the
//! command line with repeated `--set key=value` flags using dotted paths,
//! e.g. `--set sim.theta=0.05` or `--set run.n_seeds=4`.

use std::path::{Path, PathBuf};

use serde::Deserialize;
use serde_json::Value;

use oddm_core::baseline::BaselineConfig;
use oddm_core::{ModelKind, SimConfig};

use crate::HarnessError;

fn default_n_seeds() -> u32 {
    12
}

fn default_grid_w() -> u32 {
    64
}

fn default_grid_h() -> u32 {
    48
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSpec {
    /// Scene manifest paths, one per video.
    pub manifests: Vec<PathBuf>,
    pub model: ModelKind,
    #[serde(default)]
    pub sim: SimConfig,
    #[serde(default)]
    pub baseline: BaselineConfig,
    #[serde(default = "default_n_seeds")]
    pub n_seeds: u32,
    #[serde(default)]
    pub out_dir: Option<PathBuf>,
}

impl RunSpec {
    pub fn validate(&self) -> Result<(), HarnessError> {
        if self.manifests.is_empty() {
            return Err(HarnessError::Config(
                "run spec lists no scene manifests".to_string(),
            ));
        }
        for path in &self.manifests {
            if !path.exists() {
                return Err(HarnessError::Config(format!(
                    "manifest path {} does not exist",
                    path.display()
                )));
            }
        }
        if self.n_seeds < 1 {
            return Err(HarnessError::Config("n_seeds must be >= 1".to_string()));
        }
        if self.out_dir.is_none() {
            return Err(HarnessError::Config(
                "no output directory (set out_dir or pass --out)".to_string(),
            ));
        }
        self.sim
            .validate()
            .map_err(|e| HarnessError::Config(e.to_string()))?;
        self.baseline
            .validate()
            .map_err(|e| HarnessError::Config(e.to_string()))?;
        Ok(())
    }

    pub fn out_dir(&self) -> &Path {
        self.out_dir.as_deref().expect("validated")
    }
}

/// Parameters a sweep may vary, with exactly one swept at a time.
pub const SWEEPABLE: &[&str] = &[
    "theta",
    "s",
    "sigma_dva",
    "omega",
    "epsilon",
    "center_bias.enabled",
];

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub run: RunSpec,
    pub parameter: String,
    pub values: Vec<Value>,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<(), HarnessError> {
        if !SWEEPABLE.contains(&self.parameter.as_str()) {
            return Err(HarnessError::Config(format!(
                "unknown sweep parameter {:?}; expected one of {:?}",
                self.parameter, SWEEPABLE
            )));
        }
        if self.values.len() < 2 {
            return Err(HarnessError::Config(
                "a sweep needs at least 2 values".to_string(),
            ));
        }
        if self.run.model != ModelKind::ObjectDdm {
            return Err(HarnessError::Config(
                "sweeps vary simulator parameters; model must be objectddm".to_string(),
            ));
        }
        for value in &self.values {
            self.apply_to(&SimConfig::default(), value)?;
        }
        self.run.validate()
    }

    /// A copy of `config` with the swept parameter set to `value`.
    pub fn apply_to(&self, config: &SimConfig, value: &Value) -> Result<SimConfig, HarnessError> {
        let mut config = config.clone();
        let bad = |value: &Value| {
            HarnessError::Config(format!(
                "value {value} is not valid for parameter {}",
                self.parameter
            ))
        };
        let as_f64 = |value: &Value| value.as_f64().ok_or_else(|| bad(value));
        match self.parameter.as_str() {
            "theta" => config.theta = as_f64(value)?,
            "s" => config.s = as_f64(value)?,
            "sigma_dva" => config.sigma_dva = as_f64(value)?,
            "omega" => config.omega = as_f64(value)?,
            "epsilon" => config.epsilon = as_f64(value)?,
            "center_bias.enabled" => {
                config.center_bias.enabled = value.as_bool().ok_or_else(|| bad(value))?
            }
            other => {
                return Err(HarnessError::Config(format!(
                    "unknown sweep parameter {other:?}"
                )))
            }
        }
        config
            .validate()
            .map_err(|e| HarnessError::Config(e.to_string()))?;
        Ok(config)
    }

    /// Path-safe directory label for one swept value.
    pub fn value_label(&self, value: &Value) -> String {
        let rendered = value.to_string().replace(['"', '/'], "");
        format!("{}={rendered}", self.parameter.replace('.', "_"))
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VideoSpec {
    pub manifest: PathBuf,
    /// Event CSVs for this video: ground-truth recordings or simulator
    /// scanpaths.
    pub events: Vec<PathBuf>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorpusSpec {
    pub name: String,
    pub videos: Vec<VideoSpec>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvalSpec {
    pub corpora: Vec<CorpusSpec>,
    #[serde(default)]
    pub out_dir: Option<PathBuf>,
    #[serde(default = "default_grid_w")]
    pub grid_w: u32,
    #[serde(default = "default_grid_h")]
    pub grid_h: u32,
}

impl EvalSpec {
    pub fn validate(&self) -> Result<(), HarnessError> {
        if self.corpora.is_empty() {
            return Err(HarnessError::Config("no corpora to evaluate".to_string()));
        }
        if self.grid_w == 0 || self.grid_h == 0 {
            return Err(HarnessError::Config(
                "density grid dimensions must be positive".to_string(),
            ));
        }
        for corpus in &self.corpora {
            if corpus.videos.is_empty() {
                return Err(HarnessError::Config(format!(
                    "corpus {:?} lists no videos",
                    corpus.name
                )));
            }
            for video in &corpus.videos {
                if !video.manifest.exists() {
                    return Err(HarnessError::Config(format!(
                        "manifest path {} does not exist",
                        video.manifest.display()
                    )));
                }
                if video.events.is_empty() {
                    return Err(HarnessError::Config(format!(
                        "video {} has no event files",
                        video.manifest.display()
                    )));
                }
                for events in &video.events {
                    if !events.exists() {
                        return Err(HarnessError::Config(format!(
                            "events path {} does not exist",
                            events.display()
                        )));
                    }
                }
            }
        }
        if self.out_dir.is_none() {
            return Err(HarnessError::Config(
                "no output directory (set out_dir or pass --out)".to_string(),
            ));
        }
        Ok(())
    }

    pub fn out_dir(&self) -> &Path {
        self.out_dir.as_deref().expect("validated")
    }
}

/// Load a JSON spec file, apply dotted-path `--set` overrides, then
/// deserialize.
pub fn load_spec<T: serde::de::DeserializeOwned>(
    path: &Path,
    sets: &[String],
) -> Result<T, HarnessError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| HarnessError::Config(format!("cannot read {}: {e}", path.display())))?;
    let mut doc: Value = serde_json::from_str(&text)
        .map_err(|e| HarnessError::Config(format!("invalid JSON in {}: {e}", path.display())))?;
    for set in sets {
        apply_set(&mut doc, set)?;
    }
    serde_json::from_value(doc)
        .map_err(|e| HarnessError::Config(format!("invalid spec {}: {e}", path.display())))
}

/// Set `key=value` on a JSON document. The key is a dotted path; the value
/// is parsed as JSON when possible and treated as a string otherwise.
pub fn apply_set(doc: &mut Value, set: &str) -> Result<(), HarnessError> {
    let (key, raw) = set
        .split_once('=')
        .ok_or_else(|| HarnessError::Config(format!("--set expects key=value, got {set:?}")))?;
    let value: Value = serde_json::from_str(raw).unwrap_or(Value::String(raw.to_string()));
    let mut node = doc;
    let segments: Vec<&str> = key.split('.').collect();
    for (i, segment) in segments.iter().enumerate() {
        let map = node.as_object_mut().ok_or_else(|| {
            HarnessError::Config(format!("--set path {key:?} does not address an object"))
        })?;
        if i + 1 == segments.len() {
            map.insert(segment.to_string(), value);
            return Ok(());
        }
        node = map
            .entry(segment.to_string())
            .or_insert_with(|| Value::Object(Default::default()));
    }
    unreachable!("split never yields an empty iterator")
}
