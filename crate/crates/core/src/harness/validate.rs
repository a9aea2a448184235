//! Scripted-agent checks behind `repairbench validate`.

use crate::attributes::Task;
use crate::config::EpisodeConfig;
use crate::env::{EnvError, Environment};
use crate::instructor::{CorrectionMode, ScenarioKind, Timing};

use super::experiment::{derive_seed, evaluate, par_map, summarize, AgentKind};

#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl std::fmt::Display for Check {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let tag = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "[{tag}] {}: {}", self.name, self.detail)
    }
}

#[derive(Clone, Debug)]
pub struct ValidationOptions {
    /// Oracle episodes per task × objects × mode × timing combination.
    pub oracle_episodes: u32,
    /// Episodes per blind-oracle ceiling.
    pub blind_episodes: u32,
    pub mix_resets: u32,
    pub workers: usize,
    pub seed: u64,
}

impl Default for ValidationOptions {
    fn default() -> Self {
        ValidationOptions {
            oracle_episodes: 1000,
            blind_episodes: 10_000,
            mix_resets: 10_000,
            workers: 4,
            seed: 0,
        }
    }
}

/// Blind-oracle ceiling with `p` the correction probability and `s` the
/// blind success rate inside correction episodes.
pub fn blind_ceiling(p: f64, s: f64) -> f64 {
    (1.0 - p) + p * s
}

pub fn oracle_completeness(opts: &ValidationOptions) -> Result<Vec<Check>, EnvError> {
    let mut checks = Vec::new();
    for task in Task::ALL {
        for num_objects in [2, 3] {
            for mode in [CorrectionMode::Ac, CorrectionMode::Acn] {
                for timing in [Timing::Immediate, Timing::OnInteraction] {
                    let cfg = EpisodeConfig { task, num_objects, mode, timing, ..Default::default() };
                    let env = Environment::new(cfg)?;
                    let out = evaluate(&env, AgentKind::Oracle, None, opts.seed, 0, opts.oracle_episodes, opts.workers)?;
                    let ok = out.iter().filter(|o| o.success).count();
                    let one_ext = out
                        .iter()
                        .filter(|o| o.kind != ScenarioKind::None)
                        .all(|o| o.goal_extensions == u32::from(timing == Timing::OnInteraction && o.correction_issued));
                    checks.push(Check {
                        name: format!("oracle {task} n={num_objects} {mode:?} {timing:?}"),
                        passed: ok == out.len() && one_ext,
                        detail: format!("{ok}/{} successes", out.len()),
                    });
                }
            }
        }
    }
    Ok(checks)
}

pub fn blind_ceilings(opts: &ValidationOptions) -> Result<Vec<Check>, EnvError> {
    let mut checks = Vec::new();
    for (kind, inner) in [(ScenarioKind::Ambiguity, 0.5), (ScenarioKind::InstructionCorrection, 0.0)] {
        let cfg = EpisodeConfig { kinds: vec![kind], ..Default::default() };
        let expected = blind_ceiling(cfg.correction_probability, inner);
        let env = Environment::new(cfg)?;
        let out = evaluate(&env, AgentKind::BlindOracle, None, opts.seed, 0, opts.blind_episodes, opts.workers)?;
        let (overall, correction, _) = summarize(&out);
        checks.push(Check {
            name: format!("blind ceiling {kind:?}"),
            passed: (overall - expected).abs() <= 0.02 && correction.is_none_or(|c| c == 0.0),
            detail: format!(
                "overall {overall:.4} (expected {expected} ± 0.02), correction-only {}",
                correction.map_or("n/a".to_string(), |c| format!("{c:.4}"))
            ),
        });
    }
    Ok(checks)
}

pub fn episode_mix(opts: &ValidationOptions) -> Result<Check, EnvError> {
    let env = Environment::new(EpisodeConfig::default())?;
    let kinds: Vec<Result<ScenarioKind, EnvError>> = par_map(opts.mix_resets as usize, opts.workers, |i| {
        env.reset(derive_seed(opts.seed, 7, i as u64)).map(|e| e.kind())
    });
    let mut designated = 0usize;
    for k in kinds {
        designated += usize::from(k? != ScenarioKind::None);
    }
    let frac = designated as f64 / f64::from(opts.mix_resets);
    Ok(Check {
        name: "episode mix".into(),
        passed: (frac - 0.5).abs() <= 0.02,
        detail: format!("{frac:.4} correction-designated (expected 0.5 ± 0.02)"),
    })
}

pub fn run_validation(opts: &ValidationOptions) -> Result<Vec<Check>, EnvError> {
    let mut checks = oracle_completeness(opts)?;
    checks.extend(blind_ceilings(opts)?);
    checks.push(episode_mix(opts)?);
    Ok(checks)
}
