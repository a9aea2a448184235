//! Episode configuration and its validation.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::attributes::Task;
use crate::instructor::{CorrectionMode, ScenarioKind, Timing};
use crate::world::{Backend, WorldConfig};

/// A configuration problem, located by its key path (`env.num_objects`).
#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("config error at `{key}`: {message}")]
pub struct ConfigError {
    pub key: String,
    pub message: String,
}

impl ConfigError {
    pub fn new(key: impl Into<String>, message: impl Into<String>) -> Self {
        ConfigError {
            key: key.into(),
            message: message.into(),
        }
    }

    /// Prefixes the key path with an enclosing table name.
    pub fn nested(self, parent: &str) -> Self {
        ConfigError {
            key: format!("{parent}.{}", self.key),
            message: self.message,
        }
    }
}

/// Maps a TOML deserialization error to a key-located [`ConfigError`].
pub(crate) fn toml_error(e: toml::de::Error, text: &str) -> ConfigError {
    let key = e
        .span()
        .map(|span| {
            let line_start = text[..span.start].rfind('\n').map_or(0, |i| i + 1);
            let line = &text[line_start..];
            let key = line.split(['=', '\n']).next().unwrap_or("").trim();
            let table = text[..line_start]
                .lines()
                .rev()
                .map(str::trim)
                .find(|l| l.starts_with('['))
                .map(|l| l.trim_matches(['[', ']']).trim());
            match table {
                Some(t) if !key.starts_with('[') => format!("{t}.{key}"),
                _ => key.to_string(),
            }
        })
        .filter(|k| !k.is_empty())
        .unwrap_or_else(|| "<root>".into());
    ConfigError::new(key, e.message().to_string())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EpisodeConfig {
    pub task: Task,
    pub num_objects: usize,
    pub backend: Backend,
    /// Probability that an episode carries a correction scenario.
    pub correction_probability: f64,
    pub max_steps: u32,
    pub mode: CorrectionMode,
    /// Scenario kinds drawn in correction episodes.
    pub kinds: Vec<ScenarioKind>,
    /// Relative weights for `kinds`; uniform when absent.
    pub kind_weights: Option<Vec<f64>>,
    pub timing: Timing,
    pub delay_steps: u32,
    pub seed: u64,
    /// Optional lexicon file replacing the built-in vocabulary.
    pub lexicon: Option<PathBuf>,
    pub world: WorldConfig,
}

impl Default for EpisodeConfig {
    fn default() -> Self {
        EpisodeConfig {
            task: Task::Reach,
            num_objects: 3,
            backend: Backend::Continuous,
            correction_probability: 0.5,
            max_steps: 100,
            mode: CorrectionMode::Ac,
            kinds: ScenarioKind::CORRECTION_KINDS.to_vec(),
            kind_weights: None,
            timing: Timing::OnInteraction,
            delay_steps: 0,
            seed: 0,
            lexicon: None,
            world: WorldConfig::default(),
        }
    }
}

impl EpisodeConfig {
    pub fn from_toml_str(text: &str) -> Result<Self, ConfigError> {
        let cfg: EpisodeConfig = toml::from_str(text).map_err(|e| toml_error(e, text))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError::new("<file>", format!("{}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if !(2..=3).contains(&self.num_objects) {
            return Err(ConfigError::new("num_objects", "must be 2 or 3"));
        }
        if !(0.0..=1.0).contains(&self.correction_probability) {
            return Err(ConfigError::new("correction_probability", "must lie in [0, 1]"));
        }
        if self.max_steps == 0 {
            return Err(ConfigError::new("max_steps", "must be positive"));
        }
        if self.delay_steps > 10 {
            return Err(ConfigError::new("delay_steps", "must lie in 0..=10"));
        }
        if self.kinds.is_empty() {
            return Err(ConfigError::new("kinds", "at least one scenario kind is required"));
        }
        if self.kinds.contains(&ScenarioKind::None) {
            return Err(ConfigError::new("kinds", "`none` is implied by correction_probability"));
        }
        if let Some(w) = &self.kind_weights {
            if w.len() != self.kinds.len() {
                return Err(ConfigError::new("kind_weights", "needs one weight per entry of `kinds`"));
            }
            if w.iter().any(|x| !x.is_finite() || *x < 0.0) || w.iter().sum::<f64>() <= 0.0 {
                return Err(ConfigError::new("kind_weights", "weights must be non-negative with a positive sum"));
            }
        }
        let wc = &self.world;
        if self.backend == crate::world::Backend::Grid && wc.grid_size < 4 {
            return Err(ConfigError::new("world.grid_size", "must be at least 4"));
        }
        if wc.grid_start.iter().any(|&c| c >= wc.grid_size) {
            return Err(ConfigError::new("world.grid_start", "must lie inside the grid"));
        }
        if wc.substeps == 0 {
            return Err(ConfigError::new("world.substeps", "must be positive"));
        }
        Ok(())
    }
}
