//! `key=value` run configuration.
//!
//! ```text
//! # comments start with '#'
//! preset = bn
//! context_window = 1
//! l2_sigma = 3
//! gazetteer.person = names/person_bn.txt
//! ```
//!
//! A `preset` is applied before every other key regardless of where it appears.
//! Relative gazetteer paths resolve against the config file's directory. Unknown keys
//! are rejected.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crfner::{FeatureConfig, TrainParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    En,
    Bn,
    Hi,
    Ta,
    Te,
}

impl FromStr for Preset {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, ConfigError> {
        match s {
            "en" => Ok(Preset::En),
            "bn" => Ok(Preset::Bn),
            "hi" => Ok(Preset::Hi),
            "ta" => Ok(Preset::Ta),
            "te" => Ok(Preset::Te),
            other => Err(ConfigError::new(format!(
                "unknown preset {other:?} (expected en, bn, hi, ta or te)"
            ))),
        }
    }
}

impl Preset {
    /// Capitalization only for English; person-name lists for en/bn/hi, location lists
    /// for en/bn.
    fn apply(self, cfg: &mut RunConfig) {
        let slots: &[&str] = match self {
            Preset::En | Preset::Bn => &["person", "location"],
            Preset::Hi => &["person"],
            Preset::Ta | Preset::Te => &[],
        };
        cfg.features.gazetteers = slots.iter().map(|s| s.to_string()).collect();
        cfg.features.use_capital = self == Preset::En;
        cfg.fold_case = self == Preset::En;
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigError(pub String);

impl ConfigError {
    fn new(msg: impl Into<String>) -> Self {
        ConfigError(msg.into())
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct RunConfig {
    pub preset: Option<Preset>,
    pub features: FeatureConfig,
    pub params: TrainParams,
    /// Lowercase gazetteer entries and tokens before matching.
    pub fold_case: bool,
    pub gazetteer_files: BTreeMap<String, PathBuf>,
}

fn number<T: FromStr>(key: &str, value: &str) -> Result<T, ConfigError> {
    value
        .parse()
        .map_err(|_| ConfigError::new(format!("{key}: invalid number {value:?}")))
}

impl RunConfig {
    pub fn parse(text: &str, base_dir: &Path) -> Result<Self, ConfigError> {
        let mut pairs = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                ConfigError::new(format!("line {}: expected key=value, got {line:?}", i + 1))
            })?;
            pairs.push((key.trim().to_string(), value.trim().to_string()));
        }

        let mut cfg = RunConfig::default();
        if let Some((_, v)) = pairs.iter().rev().find(|(k, _)| k == "preset") {
            let preset: Preset = v.parse()?;
            preset.apply(&mut cfg);
            cfg.preset = Some(preset);
        }

        for (key, value) in &pairs {
            let (key, value) = (key.as_str(), value.as_str());
            match key {
                "preset" => {}
                "l2_sigma" => cfg.params.l2_sigma = number(key, value)?,
                "max_iter" => cfg.params.max_iter = number(key, value)?,
                "tol" => cfg.params.tol = number(key, value)?,
                "history" => cfg.params.history = number(key, value)?,
                "feature_cutoff" => cfg.params.feature_cutoff = number(key, value)?,
                "threads" => cfg.params.threads = number(key, value)?,
                "fold_case" => {
                    cfg.fold_case = match value {
                        "true" | "1" | "yes" | "on" => true,
                        "false" | "0" | "no" | "off" => false,
                        _ => return Err(ConfigError::new(format!("fold_case: invalid boolean {value:?}"))),
                    }
                }
                _ => {
                    if let Some(name) = key.strip_prefix("gazetteer.") {
                        cfg.add_gazetteer(name, base_dir.join(value))?;
                        continue;
                    }
                    let known = cfg
                        .features
                        .set(key, value)
                        .map_err(|e| ConfigError::new(e.to_string()))?;
                    if !known {
                        return Err(ConfigError::new(format!("unknown config key {key:?}")));
                    }
                }
            }
        }
        cfg.features
            .validate()
            .and_then(|_| cfg.params.validate())
            .map_err(|e| ConfigError::new(e.to_string()))?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError::new(format!("{}: {e}", path.display())))?;
        let base = path.parent().unwrap_or_else(|| Path::new("."));
        RunConfig::parse(&text, base)
    }

    /// Registers a gazetteer file and makes sure its slot is active.
    pub fn add_gazetteer(&mut self, name: &str, path: PathBuf) -> Result<(), ConfigError> {
        if name.is_empty() || name.contains(|c: char| c.is_whitespace() || c == ':') {
            return Err(ConfigError::new(format!("invalid gazetteer name {name:?}")));
        }
        if !self.features.gazetteers.iter().any(|g| g == name) {
            self.features.gazetteers.push(name.to_string());
        }
        self.gazetteer_files.insert(name.to_string(), path);
        Ok(())
    }

    /// Active slots with no file behind them.
    pub fn unfilled_slots(&self) -> Vec<String> {
        self.features
            .gazetteers
            .iter()
            .filter(|g| !self.gazetteer_files.contains_key(*g))
            .cloned()
            .collect()
    }
}
