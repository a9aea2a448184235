use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::agents::{rollout, BlindOracle, Decision, EpisodeOutcome, LearnerAgent, LinearGroundingParams, Oracle, Policy, RandomAgent};
use crate::config::{toml_error, ConfigError, EpisodeConfig};
use crate::env::{EnvError, Environment};

use super::metrics::{MetricsRow, MetricsTable};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum AgentKind {
    #[default]
    Oracle,
    BlindOracle,
    Random,
    Learner,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LearnerConfig {
    pub alpha: f64,
    pub tau: f64,
    pub baseline_rate: f64,
}

impl Default for LearnerConfig {
    fn default() -> Self {
        let p = LinearGroundingParams::new(0);
        LearnerConfig {
            alpha: p.alpha,
            tau: p.tau,
            baseline_rate: p.baseline_rate,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub agent: AgentKind,
    pub seeds: u32,
    pub workers: usize,
    /// Training episodes per seed. Scripted agents run them without
    /// updating anything.
    pub train_episodes: u64,
    pub eval_every: u64,
    pub eval_episodes: u32,
    /// Episodes collected with frozen parameters between updates.
    pub batch_size: usize,
    pub learner: LearnerConfig,
    pub env: EpisodeConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            agent: AgentKind::Oracle,
            seeds: 3,
            workers: 4,
            train_episodes: 2000,
            eval_every: 1000,
            eval_episodes: 200,
            batch_size: 32,
            learner: LearnerConfig::default(),
            env: EpisodeConfig::default(),
        }
    }
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<Self, ConfigError> {
        let cfg: ExperimentConfig = toml::from_str(text).map_err(|e| toml_error(e, text))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError::new("<file>", format!("{}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.seeds == 0 {
            return Err(ConfigError::new("seeds", "must be positive"));
        }
        if self.workers == 0 {
            return Err(ConfigError::new("workers", "must be positive"));
        }
        if self.eval_every == 0 {
            return Err(ConfigError::new("eval_every", "must be positive"));
        }
        if self.eval_episodes == 0 {
            return Err(ConfigError::new("eval_episodes", "must be positive"));
        }
        if self.batch_size == 0 {
            return Err(ConfigError::new("batch_size", "must be positive"));
        }
        let l = &self.learner;
        if !(l.alpha.is_finite() && l.alpha > 0.0) {
            return Err(ConfigError::new("learner.alpha", "must be positive"));
        }
        if !(l.tau.is_finite() && l.tau > 0.0) {
            return Err(ConfigError::new("learner.tau", "must be positive"));
        }
        if !(0.0..=1.0).contains(&l.baseline_rate) {
            return Err(ConfigError::new("learner.baseline_rate", "must lie in [0, 1]"));
        }
        self.env.validate().map_err(|e| e.nested("env"))
    }
}

/// Independent seed for `(base, stream, index)` (SplitMix64 finalizer).
pub fn derive_seed(base: u64, stream: u64, index: u64) -> u64 {
    let mut z = base
        .wrapping_mul(0x9E37_79B9_7F4A_7C15)
        .wrapping_add(stream.wrapping_mul(0xD1B5_4A32_D192_ED03))
        .wrapping_add(index.wrapping_mul(0xBF58_476D_1CE4_E5B9));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

const TRAIN_STREAM: u64 = 1;
const TRAIN_ACT_STREAM: u64 = 2;
/// Evaluation point k uses streams `EVAL_STREAM + 2k` and `+ 2k + 1`.
const EVAL_STREAM: u64 = 1 << 32;

/// Maps `f` over `0..n` on `workers` threads; results come back in index
/// order regardless of scheduling.
pub fn par_map<T, F>(n: usize, workers: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync,
{
    let workers = workers.clamp(1, n.max(1));
    if workers == 1 {
        return (0..n).map(f).collect();
    }
    let mut tagged: Vec<(usize, T)> = std::thread::scope(|scope| {
        let handles: Vec<_> = (0..workers)
            .map(|w| {
                let f = &f;
                scope.spawn(move || (w..n).step_by(workers).map(|i| (i, f(i))).collect::<Vec<_>>())
            })
            .collect();
        handles.into_iter().flat_map(|h| h.join().expect("worker panicked")).collect()
    });
    tagged.sort_by_key(|(i, _)| *i);
    tagged.into_iter().map(|(_, t)| t).collect()
}

fn make_policy(kind: AgentKind, params: Option<&LinearGroundingParams>, act_seed: u64) -> Box<dyn Policy> {
    match kind {
        AgentKind::Oracle => Box::new(Oracle::new()),
        AgentKind::BlindOracle => Box::new(BlindOracle::new()),
        AgentKind::Random => Box::new(RandomAgent::new(act_seed)),
        AgentKind::Learner => Box::new(LearnerAgent::new(params.expect("learner params").clone(), act_seed)),
    }
}

/// Runs one episode; learners also return their decisions.
fn run_one(
    env: &Arc<Environment>,
    kind: AgentKind,
    params: Option<&LinearGroundingParams>,
    episode_seed: u64,
    act_seed: u64,
) -> Result<(EpisodeOutcome, Vec<Decision>), EnvError> {
    let mut ep = env.reset(episode_seed)?;
    if kind == AgentKind::Learner {
        let mut agent = LearnerAgent::new(params.expect("learner params").clone(), act_seed);
        let out = rollout(&mut ep, &mut agent, None)?;
        return Ok((out, agent.decisions));
    }
    let mut policy = make_policy(kind, params, act_seed);
    Ok((rollout(&mut ep, policy.as_mut(), None)?, Vec::new()))
}

/// Success statistics over a set of finished episodes.
pub fn summarize(outcomes: &[EpisodeOutcome]) -> (f64, Option<f64>, f64) {
    let n = outcomes.len().max(1) as f64;
    let overall = outcomes.iter().filter(|o| o.success).count() as f64 / n;
    let corrected: Vec<&EpisodeOutcome> = outcomes.iter().filter(|o| o.correction_issued).collect();
    let correction = (!corrected.is_empty())
        .then(|| corrected.iter().filter(|o| o.success).count() as f64 / corrected.len() as f64);
    let len = outcomes.iter().map(|o| f64::from(o.steps)).sum::<f64>() / n;
    (overall, correction, len)
}

/// Evaluates frozen parameters (or a scripted agent) on fresh episodes.
pub fn evaluate(
    env: &Arc<Environment>,
    kind: AgentKind,
    params: Option<&LinearGroundingParams>,
    base_seed: u64,
    point: u64,
    episodes: u32,
    workers: usize,
) -> Result<Vec<EpisodeOutcome>, EnvError> {
    let stream = EVAL_STREAM + 2 * point;
    par_map(episodes as usize, workers, |j| {
        let j = j as u64;
        run_one(env, kind, params, derive_seed(base_seed, stream, j), derive_seed(base_seed, stream + 1, j))
            .map(|(o, _)| o)
    })
    .into_iter()
    .collect()
}

/// Outcome of one seed's run.
#[derive(Clone, Debug)]
pub struct SeedRun {
    pub seed: u64,
    pub rows: Vec<MetricsRow>,
    pub params: Option<LinearGroundingParams>,
}

/// Trains (for learners) and evaluates one seed. Episodes in a batch run
/// in parallel against frozen parameters; updates are applied afterwards
/// in episode-index order, so results do not depend on `workers`.
pub fn run_seed(cfg: &ExperimentConfig, env: &Arc<Environment>, seed: u64) -> Result<SeedRun, EnvError> {
    let kind = cfg.agent;
    let mut params = (kind == AgentKind::Learner).then(|| {
        let mut p = LinearGroundingParams::new(env.vocab().len());
        p.alpha = cfg.learner.alpha;
        p.tau = cfg.learner.tau;
        p.baseline_rate = cfg.learner.baseline_rate;
        p
    });
    let max_steps = f64::from(cfg.env.max_steps);
    let mut rows = Vec::new();
    let mut steps: u64 = 0;
    let mut done: u64 = 0;
    let mut point: u64 = 0;

    let mut eval_point = |steps: u64, point: u64, params: Option<&LinearGroundingParams>| -> Result<(), EnvError> {
        let outcomes = evaluate(env, kind, params, seed, point, cfg.eval_episodes, cfg.workers)?;
        let (overall, correction, len) = summarize(&outcomes);
        rows.push(MetricsRow {
            steps,
            seed,
            overall_success: overall,
            correction_success: correction,
            mean_ep_len: len,
        });
        Ok(())
    };
    eval_point(0, point, params.as_ref())?;

    while done < cfg.train_episodes {
        let next_eval = ((done / cfg.eval_every) + 1) * cfg.eval_every;
        let batch = (cfg.batch_size as u64).min(next_eval - done).min(cfg.train_episodes - done);
        let frozen = params.clone();
        let results: Vec<_> = par_map(batch as usize, cfg.workers, |k| {
            let i = done + k as u64;
            run_one(
                env,
                kind,
                frozen.as_ref(),
                derive_seed(seed, TRAIN_STREAM, i),
                derive_seed(seed, TRAIN_ACT_STREAM, i),
            )
        });
        for r in results {
            let (outcome, decisions) = r?;
            steps += u64::from(outcome.steps);
            if let Some(p) = params.as_mut() {
                p.update(&decisions, outcome.total_reward as f64 / max_steps);
            }
        }
        done += batch;
        if done.is_multiple_of(cfg.eval_every) || done == cfg.train_episodes {
            point += 1;
            eval_point(steps, point, params.as_ref())?;
        }
    }
    Ok(SeedRun { seed, rows, params })
}

#[derive(Clone, Debug)]
pub struct ExperimentResult {
    pub table: MetricsTable,
    pub runs: Vec<SeedRun>,
}

/// Runs every seed (`env.seed`, `env.seed + 1`, ...) and collects a
/// sorted metrics table.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentResult, EnvError> {
    cfg.validate()?;
    let env = Environment::new(cfg.env.clone())?;
    let mut runs = Vec::new();
    for s in 0..u64::from(cfg.seeds) {
        runs.push(run_seed(cfg, &env, cfg.env.seed + s)?);
    }
    let mut table = MetricsTable {
        rows: runs.iter().flat_map(|r| r.rows.clone()).collect(),
    };
    table.sort();
    Ok(ExperimentResult { table, runs })
}
