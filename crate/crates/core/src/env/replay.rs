//! JSON-lines replay logs. The first line is a header with the config and
//! seed; each further line records one step. Floats are written in
//! shortest round-trip form, so replaying the actions reproduces the log
//! byte for byte.

use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::config::EpisodeConfig;
use crate::world::{Action, SceneState};

use super::{EnvError, Environment, Episode, StepResult};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ReplayRecord {
    Header {
        seed: u64,
        config: EpisodeConfig,
        goal_text: String,
        scene: SceneState,
    },
    Step {
        step: u32,
        action: Action,
        reward: i32,
        done: bool,
        goal_text: String,
        events: Vec<String>,
    },
}

#[derive(Debug, Error)]
pub enum ReplayError {
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("line {line}: {source}")]
    Json { line: usize, source: serde_json::Error },
    #[error("replay log has no header")]
    MissingHeader,
    #[error(transparent)]
    Env(#[from] EnvError),
    #[error("replay diverges at step {step}")]
    Diverged { step: u32 },
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ReplayLog {
    pub records: Vec<ReplayRecord>,
}

impl ReplayLog {
    /// A log holding the header of a freshly reset episode.
    pub fn start(episode: &Episode) -> Self {
        ReplayLog {
            records: vec![ReplayRecord::Header {
                seed: episode.seed(),
                config: episode.config().clone(),
                goal_text: episode.goal().text(),
                scene: episode.scene().clone(),
            }],
        }
    }

    /// Appends the record of a step. `action` should be the one passed to
    /// [`Episode::step`].
    pub fn record(&mut self, action: Action, result: &StepResult, step: u32) {
        self.records.push(ReplayRecord::Step {
            step,
            action,
            reward: result.reward,
            done: result.done,
            goal_text: result.info.goal_text.clone(),
            events: result.info.events(result.done),
        });
    }

    pub fn actions(&self) -> impl Iterator<Item = Action> + '_ {
        self.records.iter().filter_map(|r| match r {
            ReplayRecord::Step { action, .. } => Some(*action),
            _ => None,
        })
    }

    pub fn write_jsonl<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        for r in &self.records {
            serde_json::to_writer(&mut out, r)?;
            out.write_all(b"\n")?;
        }
        Ok(())
    }

    pub fn to_jsonl(&self) -> String {
        let mut buf = Vec::new();
        self.write_jsonl(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("json is utf-8")
    }

    pub fn read_jsonl<R: BufRead>(input: R) -> Result<Self, ReplayError> {
        let mut records = Vec::new();
        for (i, line) in input.lines().enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let rec = serde_json::from_str(&line).map_err(|source| ReplayError::Json { line: i + 1, source })?;
            records.push(rec);
        }
        Ok(ReplayLog { records })
    }

    /// Re-runs the logged actions from the header's config and seed and
    /// checks that every record is reproduced.
    pub fn verify(&self) -> Result<(), ReplayError> {
        let Some(ReplayRecord::Header { seed, config, .. }) = self.records.first() else {
            return Err(ReplayError::MissingHeader);
        };
        let env = Environment::new(config.clone()).map_err(EnvError::from)?;
        let replayed = run_actions(&env, *seed, self.actions())?;
        for (step, (a, b)) in self.records.iter().zip(&replayed.records).enumerate() {
            if a != b {
                return Err(ReplayError::Diverged { step: step as u32 });
            }
        }
        if self.records.len() != replayed.records.len() {
            return Err(ReplayError::Diverged {
                step: self.records.len().min(replayed.records.len()) as u32,
            });
        }
        Ok(())
    }
}

/// Runs an action sequence from a fresh reset, stopping when the episode
/// ends.
pub fn run_actions(
    env: &std::sync::Arc<Environment>,
    seed: u64,
    actions: impl IntoIterator<Item = Action>,
) -> Result<ReplayLog, EnvError> {
    let mut ep = env.reset(seed)?;
    let mut log = ReplayLog::start(&ep);
    for a in actions {
        if ep.is_done() {
            break;
        }
        let r = ep.step(a)?;
        log.record(a, &r, ep.step_count());
    }
    Ok(log)
}
