//! Reference policies: the oracle, the correction-blind oracle, a random
//! agent and the linear grounding learner.

mod controller;
mod learner;

pub use controller::{plan_push, Controller};
pub use learner::{Decision, LearnerAgent, LinearGroundingParams, SnapshotError, ATTRIBUTE_FEATURES};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::env::replay::ReplayLog;
use crate::env::{EnvError, Episode};
use crate::grammar::{parse_utterance, Lexicon, ObjectDescription, Utterance};
use crate::instructor::{matching_objects, ScenarioKind};
use crate::world::{Action, Backend, GridMove, SceneState};

pub trait Policy {
    /// Called once per episode, before the first action.
    fn begin(&mut self, _episode: &Episode) {}
    fn act(&mut self, episode: &Episode) -> Action;
}

/// Lowest-id object matching a goal text, parsed with the lexicon.
/// Unparseable goals and empty matches resolve to `None`.
pub fn resolve_goal(goal: &Utterance, lexicon: &Lexicon, scene: &SceneState, use_correction: bool) -> Option<usize> {
    let parsed = parse_utterance(goal, lexicon).ok()?;
    let desc: &ObjectDescription = if use_correction { &parsed.combined.object } else { &parsed.instruction.object };
    matching_objects(desc, scene).first().copied()
}

/// Ground-truth policy: parses the current goal, guesses the lowest-id
/// match, and re-resolves whenever the goal text changes.
#[derive(Clone, Debug, Default)]
pub struct Oracle {
    controller: Controller,
    goal: Option<Utterance>,
    target: Option<usize>,
}

impl Oracle {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn target(&self) -> Option<usize> {
        self.target
    }
}

impl Policy for Oracle {
    fn begin(&mut self, _episode: &Episode) {
        *self = Oracle::default();
    }

    fn act(&mut self, ep: &Episode) -> Action {
        if self.goal.as_ref() != Some(ep.goal()) {
            self.goal = Some(ep.goal().clone());
            self.target = resolve_goal(ep.goal(), ep.environment().lexicon(), ep.scene(), true);
        }
        let cfg = ep.config();
        self.controller.act(ep.scene(), cfg.task, &cfg.world, self.target)
    }
}

/// The oracle without correction handling: resolves the instruction once
/// and ignores any goal extension.
#[derive(Clone, Debug, Default)]
pub struct BlindOracle {
    controller: Controller,
    target: Option<Option<usize>>,
}

impl BlindOracle {
    pub fn new() -> Self {
        Self::default()
    }
}

impl Policy for BlindOracle {
    fn begin(&mut self, _episode: &Episode) {
        *self = BlindOracle::default();
    }

    fn act(&mut self, ep: &Episode) -> Action {
        let target = *self
            .target
            .get_or_insert_with(|| resolve_goal(ep.goal(), ep.environment().lexicon(), ep.scene(), false));
        let cfg = ep.config();
        self.controller.act(ep.scene(), cfg.task, &cfg.world, target)
    }
}

/// Uniformly random actions.
#[derive(Clone, Debug)]
pub struct RandomAgent {
    rng: ChaCha8Rng,
}

impl RandomAgent {
    pub fn new(seed: u64) -> Self {
        RandomAgent {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }
}

impl Policy for RandomAgent {
    fn act(&mut self, ep: &Episode) -> Action {
        match ep.config().backend {
            Backend::Grid => Action::Grid(*GridMove::ALL.choose(&mut self.rng).unwrap()),
            Backend::Continuous => {
                let m = ep.config().world.max_displacement;
                let r = &mut self.rng;
                Action::Continuous([
                    r.gen_range(-m..=m),
                    r.gen_range(-m..=m),
                    r.gen_range(-m..=m),
                    r.gen_range(-1.0..=1.0),
                ])
            }
        }
    }
}

/// Summary of one finished episode.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpisodeOutcome {
    pub seed: u64,
    pub kind: ScenarioKind,
    pub success: bool,
    pub steps: u32,
    pub correction_issued: bool,
    pub goal_extensions: u32,
    pub total_reward: i64,
}

impl EpisodeOutcome {
    pub fn of(ep: &Episode) -> Self {
        EpisodeOutcome {
            seed: ep.seed(),
            kind: ep.kind(),
            success: ep.success(),
            steps: ep.step_count(),
            correction_issued: ep.correction_issued(),
            goal_extensions: ep.goal_extensions(),
            total_reward: ep.total_reward(),
        }
    }
}

/// Runs a policy until the episode ends, optionally logging every step.
pub fn rollout<P: Policy + ?Sized>(
    ep: &mut Episode,
    policy: &mut P,
    mut log: Option<&mut ReplayLog>,
) -> Result<EpisodeOutcome, EnvError> {
    policy.begin(ep);
    while !ep.is_done() {
        let action = policy.act(ep);
        let result = ep.step(action)?;
        if let Some(log) = log.as_deref_mut() {
            log.record(action, &result, ep.step_count());
        }
    }
    Ok(EpisodeOutcome::of(ep))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::EpisodeConfig;
    use crate::env::Environment;
    use crate::attributes::Task;

    #[test]
    fn oracle_solves_each_task() {
        for task in Task::ALL {
            for backend in [Backend::Continuous, Backend::Grid] {
                let env = Environment::new(EpisodeConfig { task, backend, ..Default::default() }).unwrap();
                for seed in 0..40 {
                    let mut ep = env.reset(seed).unwrap();
                    let out = rollout(&mut ep, &mut Oracle::new(), None).unwrap();
                    assert!(out.success, "{task:?} {backend:?} seed {seed}: {out:?}");
                }
            }
        }
    }

    #[test]
    fn random_agent_is_seeded() {
        let env = Environment::new(EpisodeConfig::default()).unwrap();
        let run = || {
            let mut ep = env.reset(5).unwrap();
            let mut log = ReplayLog::start(&ep);
            rollout(&mut ep, &mut RandomAgent::new(9), Some(&mut log)).unwrap();
            log.to_jsonl()
        };
        assert_eq!(run(), run());
    }
}
