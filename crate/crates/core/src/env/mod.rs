//! Episode protocol: scene sampling, reset/step, observations and the
//! replay log.

mod observation;
pub mod replay;
mod sampler;

pub use observation::{Observation, GRIPPER_FEATURES, OBJECT_SLOTS, OBS_DIM, SLOT_FEATURES, STATE_DIM};
pub use sampler::{positions_valid, sample_scene, shared_properties, SampledScene, MAX_SAMPLING_ATTEMPTS};

use std::sync::Arc;

use rand::distributions::{Distribution, WeightedIndex};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::config::{ConfigError, EpisodeConfig};
use crate::grammar::{GrammarError, Lexicon, Utterance, Vocabulary};
use crate::instructor::{
    build_scenario, CorrectionEvent, InstructorError, ScenarioKind, ScenarioRequest, ScenarioSpec,
};
use crate::world::{apply_action, evaluate_condition, Action, SceneState};

#[derive(Debug, Error)]
pub enum EnvError {
    #[error("could not sample a {kind:?} scene in {attempts} attempts")]
    Sampling { kind: ScenarioKind, attempts: usize },
    #[error(transparent)]
    Scenario(#[from] InstructorError),
    #[error(transparent)]
    Grammar(#[from] GrammarError),
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("episode is done")]
    EpisodeDone,
}

/// Immutable configuration shared by every episode of an environment.
#[derive(Clone, Debug)]
pub struct Environment {
    config: EpisodeConfig,
    lexicon: Lexicon,
    vocab: Vocabulary,
}

impl Environment {
    /// Validates the config and loads its lexicon file, if any.
    pub fn new(config: EpisodeConfig) -> Result<Arc<Self>, ConfigError> {
        let lexicon = match &config.lexicon {
            Some(path) => Lexicon::load(path).map_err(|e| ConfigError::new("lexicon", e.to_string()))?,
            None => Lexicon::default(),
        };
        Self::with_lexicon(config, lexicon)
    }

    pub fn with_lexicon(config: EpisodeConfig, lexicon: Lexicon) -> Result<Arc<Self>, ConfigError> {
        config.validate()?;
        lexicon.validate().map_err(|e| ConfigError::new("lexicon", e.to_string()))?;
        let vocab = Vocabulary::from_lexicon(&lexicon);
        Ok(Arc::new(Environment { config, lexicon, vocab }))
    }

    pub fn config(&self) -> &EpisodeConfig {
        &self.config
    }

    pub fn lexicon(&self) -> &Lexicon {
        &self.lexicon
    }

    pub fn vocab(&self) -> &Vocabulary {
        &self.vocab
    }

    /// Scenario kind of a fresh episode.
    fn draw_kind<R: Rng + ?Sized>(&self, rng: &mut R) -> ScenarioKind {
        let cfg = &self.config;
        if !rng.gen_bool(cfg.correction_probability) {
            return ScenarioKind::None;
        }
        let i = match &cfg.kind_weights {
            Some(w) => WeightedIndex::new(w).expect("validated weights").sample(rng),
            None => rng.gen_range(0..cfg.kinds.len()),
        };
        cfg.kinds[i]
    }

    /// Starts an episode; everything downstream is a function of `seed`.
    pub fn reset(self: &Arc<Self>, seed: u64) -> Result<Episode, EnvError> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let kind = self.draw_kind(&mut rng);
        let sampled = sample_scene(&self.config, kind, &mut rng)?;
        self.start(sampled.scene, kind, sampled.intended, seed, rng)
    }

    /// Starts an episode on a given scene, for scripted walkthroughs.
    pub fn reset_with_scene(
        self: &Arc<Self>,
        scene: SceneState,
        kind: ScenarioKind,
        intended: usize,
        seed: u64,
    ) -> Result<Episode, EnvError> {
        self.start(scene, kind, intended, seed, ChaCha8Rng::seed_from_u64(seed))
    }

    fn start(
        self: &Arc<Self>,
        scene: SceneState,
        kind: ScenarioKind,
        intended: usize,
        seed: u64,
        mut rng: ChaCha8Rng,
    ) -> Result<Episode, EnvError> {
        let cfg = &self.config;
        let request = ScenarioRequest {
            kind,
            mode: cfg.mode,
            timing: cfg.timing,
            delay_steps: cfg.delay_steps,
            task: cfg.task,
            intended_target: intended,
        };
        let (spec, goal) = build_scenario(&scene, &request, &self.lexicon, &mut rng)?;
        let observation = Observation::encode(&scene, &goal, &self.vocab)?;
        Ok(Episode {
            env: Arc::clone(self),
            seed,
            rng,
            scene,
            spec,
            observation,
            done: false,
            success: false,
            goal_extensions: 0,
            wrong_interactions: 0,
            total_reward: 0,
        })
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct StepInfo {
    pub success: bool,
    pub correction_issued_this_step: bool,
    /// Some object other than the intended one satisfies the task condition.
    pub wrong_interaction: bool,
    pub goal_text: String,
    pub correction: Option<CorrectionEvent>,
}

impl StepInfo {
    /// Event tags in a fixed order, as written to replay logs.
    pub fn events(&self, done: bool) -> Vec<String> {
        let mut out = Vec::new();
        if self.wrong_interaction {
            out.push("wrong_interaction".to_string());
        }
        if self.correction_issued_this_step {
            out.push("correction_issued".to_string());
        }
        if self.success {
            out.push("success".to_string());
        } else if done {
            out.push("timeout".to_string());
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepResult {
    pub observation: Observation,
    pub reward: i32,
    pub done: bool,
    pub info: StepInfo,
}

/// One episode. Handles own all their state, so independent episodes can
/// run on separate threads.
#[derive(Clone, Debug)]
pub struct Episode {
    env: Arc<Environment>,
    seed: u64,
    rng: ChaCha8Rng,
    scene: SceneState,
    spec: ScenarioSpec,
    observation: Observation,
    done: bool,
    success: bool,
    goal_extensions: u32,
    wrong_interactions: u32,
    total_reward: i64,
}

impl Episode {
    pub fn step(&mut self, action: Action) -> Result<StepResult, EnvError> {
        if self.done {
            return Err(EnvError::EpisodeDone);
        }
        let env = Arc::clone(&self.env);
        let cfg = &env.config;
        self.scene = apply_action(&self.scene, action, &cfg.world);
        let correction = self.spec.tick(&self.scene, &env.lexicon, &cfg.world, &mut self.rng);
        let reward = self.spec.reward(&self.scene, &cfg.world);
        let wrong_interaction = (0..self.scene.objects.len())
            .filter(|&i| i != self.spec.intended_target)
            .any(|i| evaluate_condition(&self.scene, i, cfg.task, &cfg.world).unwrap_or(false));
        if correction.is_some() {
            self.goal_extensions += 1;
        }
        self.wrong_interactions += u32::from(wrong_interaction);
        self.success = reward == 0;
        self.total_reward += i64::from(reward);
        self.done = self.success || self.scene.step_count >= cfg.max_steps;
        self.observation = Observation::encode(&self.scene, &self.spec.goal_utterance, &env.vocab)?;
        Ok(StepResult {
            observation: self.observation.clone(),
            reward,
            done: self.done,
            info: StepInfo {
                success: self.success,
                correction_issued_this_step: correction.is_some(),
                wrong_interaction,
                goal_text: self.spec.goal_utterance.text(),
                correction,
            },
        })
    }

    pub fn environment(&self) -> &Arc<Environment> {
        &self.env
    }

    pub fn config(&self) -> &EpisodeConfig {
        &self.env.config
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn scene(&self) -> &SceneState {
        &self.scene
    }

    pub fn spec(&self) -> &ScenarioSpec {
        &self.spec
    }

    pub fn kind(&self) -> ScenarioKind {
        self.spec.kind
    }

    pub fn observation(&self) -> &Observation {
        &self.observation
    }

    pub fn goal(&self) -> &Utterance {
        &self.spec.goal_utterance
    }

    pub fn step_count(&self) -> u32 {
        self.scene.step_count
    }

    pub fn is_done(&self) -> bool {
        self.done
    }

    pub fn success(&self) -> bool {
        self.success
    }

    pub fn correction_issued(&self) -> bool {
        self.spec.correction_issued
    }

    pub fn goal_extensions(&self) -> u32 {
        self.goal_extensions
    }

    pub fn total_reward(&self) -> i64 {
        self.total_reward
    }
}
