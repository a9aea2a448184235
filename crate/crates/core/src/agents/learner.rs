//! Linear grounding learner: scores each object by a bilinear form between
//! the goal's bag of words and the object's attributes, picks a target by
//! softmax, and drives to it with the scripted controller. Trained with
//! REINFORCE against a running-mean baseline.

use std::io::{BufRead, Write};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::attributes::{Color, Shape};
use crate::env::{Episode, Observation, OBJECT_SLOTS};
use crate::grammar::PAD_ID;
use crate::world::Action;

use super::{Controller, Policy};

/// Color one-hot, shape one-hot and a bias.
pub const ATTRIBUTE_FEATURES: usize = Color::ALL.len() + Shape::ALL.len() + 1;

const SNAPSHOT_MAGIC: &str = "# linear grounding weights v1";

#[derive(Clone, Debug, PartialEq)]
pub struct LinearGroundingParams {
    pub vocab_size: usize,
    /// Row-major `vocab_size × ATTRIBUTE_FEATURES`; entry `word * 13 + j`.
    pub w: Vec<f64>,
    pub alpha: f64,
    pub tau: f64,
    pub baseline: f64,
    /// Step size of the running-mean baseline.
    pub baseline_rate: f64,
}

/// One target choice: the goal words present, the attribute vectors of
/// the valid slots, and the chosen slot.
#[derive(Clone, Debug, PartialEq)]
pub struct Decision {
    pub words: Vec<u32>,
    pub candidates: Vec<[f64; ATTRIBUTE_FEATURES]>,
    pub chosen: usize,
}

#[derive(Debug, Error)]
pub enum SnapshotError {
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("line {line}: {message}")]
    Format { line: usize, message: String },
}

/// Distinct non-pad word ids, ascending.
pub fn bag_of_words(goal_ids: &[u32]) -> Vec<u32> {
    let mut words: Vec<u32> = goal_ids.iter().copied().filter(|&i| i != PAD_ID).collect();
    words.sort_unstable();
    words.dedup();
    words
}

/// Attribute vector of a valid observation slot.
pub fn slot_attributes(obs: &Observation, slot: usize) -> [f64; ATTRIBUTE_FEATURES] {
    let s = obs.slot(slot);
    let mut a = [0.0; ATTRIBUTE_FEATURES];
    a[..ATTRIBUTE_FEATURES - 1].copy_from_slice(&s[3..3 + ATTRIBUTE_FEATURES - 1]);
    a[ATTRIBUTE_FEATURES - 1] = 1.0;
    a
}

impl LinearGroundingParams {
    pub fn new(vocab_size: usize) -> Self {
        LinearGroundingParams {
            vocab_size,
            w: vec![0.0; vocab_size * ATTRIBUTE_FEATURES],
            alpha: 0.05,
            tau: 1.0,
            baseline: 0.0,
            baseline_rate: 0.02,
        }
    }

    pub fn score(&self, words: &[u32], attrs: &[f64; ATTRIBUTE_FEATURES]) -> f64 {
        words
            .iter()
            .map(|&v| {
                let row = &self.w[v as usize * ATTRIBUTE_FEATURES..][..ATTRIBUTE_FEATURES];
                row.iter().zip(attrs).map(|(w, a)| w * a).sum::<f64>()
            })
            .sum()
    }

    /// Softmax over candidate scores at temperature `tau`.
    pub fn probabilities(&self, words: &[u32], candidates: &[[f64; ATTRIBUTE_FEATURES]]) -> Vec<f64> {
        let scores: Vec<f64> = candidates.iter().map(|a| self.score(words, a) / self.tau).collect();
        let max = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let exps: Vec<f64> = scores.iter().map(|s| (s - max).exp()).collect();
        let z: f64 = exps.iter().sum();
        exps.into_iter().map(|e| e / z).collect()
    }

    /// Adds `scale · ∇ log π(chosen)` to the weights.
    fn add_log_prob_gradient(&mut self, d: &Decision, scale: f64) {
        let p = self.probabilities(&d.words, &d.candidates);
        let mut g = [0.0; ATTRIBUTE_FEATURES];
        for (k, a) in d.candidates.iter().enumerate() {
            let coeff = f64::from(u8::from(k == d.chosen)) - p[k];
            for j in 0..ATTRIBUTE_FEATURES {
                g[j] += coeff * a[j];
            }
        }
        for &v in &d.words {
            let row = &mut self.w[v as usize * ATTRIBUTE_FEATURES..][..ATTRIBUTE_FEATURES];
            for j in 0..ATTRIBUTE_FEATURES {
                row[j] += scale * g[j] / self.tau;
            }
        }
    }

    /// REINFORCE step for one episode, then moves the baseline toward
    /// the return. An advantage of exactly zero leaves `w` unchanged.
    pub fn update(&mut self, decisions: &[Decision], episode_return: f64) {
        let advantage = episode_return - self.baseline;
        if advantage != 0.0 {
            let scale = self.alpha * advantage;
            for d in decisions {
                self.add_log_prob_gradient(d, scale);
            }
        }
        self.baseline += self.baseline_rate * (episode_return - self.baseline);
    }

    /// Plain-text snapshot: a header with the hyperparameters, then one
    /// `index weight` line per entry of `w`.
    pub fn save<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "{SNAPSHOT_MAGIC}")?;
        writeln!(out, "vocab_size {}", self.vocab_size)?;
        writeln!(out, "features {ATTRIBUTE_FEATURES}")?;
        writeln!(out, "alpha {}", self.alpha)?;
        writeln!(out, "tau {}", self.tau)?;
        writeln!(out, "baseline {}", self.baseline)?;
        writeln!(out, "baseline_rate {}", self.baseline_rate)?;
        for (i, w) in self.w.iter().enumerate() {
            writeln!(out, "{i} {w}")?;
        }
        Ok(())
    }

    pub fn load<R: BufRead>(input: R) -> Result<Self, SnapshotError> {
        let mut lines = input.lines().enumerate();
        let err = |line: usize, message: &str| SnapshotError::Format {
            line: line + 1,
            message: message.to_string(),
        };
        let (_, first) = lines.next().ok_or_else(|| err(0, "empty snapshot"))?;
        if first?.trim() != SNAPSHOT_MAGIC {
            return Err(err(0, "missing header"));
        }
        let mut header = |key: &str| -> Result<f64, SnapshotError> {
            let (i, line) = lines.next().ok_or_else(|| err(0, "truncated header"))?;
            let line = line?;
            let value = line
                .strip_prefix(key)
                .and_then(|v| v.trim().parse::<f64>().ok())
                .ok_or_else(|| err(i, &format!("expected `{key} <value>`")))?;
            Ok(value)
        };
        let vocab_size = header("vocab_size")? as usize;
        if header("features")? as usize != ATTRIBUTE_FEATURES {
            return Err(err(2, "feature count mismatch"));
        }
        let mut p = LinearGroundingParams::new(vocab_size);
        p.alpha = header("alpha")?;
        p.tau = header("tau")?;
        p.baseline = header("baseline")?;
        p.baseline_rate = header("baseline_rate")?;
        let mut seen = vec![false; p.w.len()];
        for (i, line) in lines {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let mut parts = line.split_whitespace();
            let idx: usize = parts
                .next()
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| err(i, "bad index"))?;
            let w: f64 = parts.next().and_then(|s| s.parse().ok()).ok_or_else(|| err(i, "bad weight"))?;
            if idx >= p.w.len() || !w.is_finite() {
                return Err(err(i, "index out of range or non-finite weight"));
            }
            p.w[idx] = w;
            seen[idx] = true;
        }
        if seen.iter().any(|s| !s) {
            return Err(err(0, "missing weights"));
        }
        Ok(p)
    }
}

/// Acting side of the learner. Holds a frozen copy of the parameters and
/// records its decisions for a later update.
#[derive(Clone, Debug)]
pub struct LearnerAgent {
    pub params: LinearGroundingParams,
    rng: ChaCha8Rng,
    controller: Controller,
    goal_ids: Vec<u32>,
    target: Option<usize>,
    pub decisions: Vec<Decision>,
}

impl LearnerAgent {
    pub fn new(params: LinearGroundingParams, seed: u64) -> Self {
        LearnerAgent {
            params,
            rng: ChaCha8Rng::seed_from_u64(seed),
            controller: Controller::new(),
            goal_ids: Vec::new(),
            target: None,
            decisions: Vec::new(),
        }
    }

    /// Samples a slot from the softmax over valid slots.
    pub fn choose(&mut self, obs: &Observation) -> Option<usize> {
        let slots: Vec<usize> = (0..OBJECT_SLOTS).filter(|&s| obs.slot_valid(s)).collect();
        if slots.is_empty() {
            return None;
        }
        let words = bag_of_words(&obs.goal_ids);
        let candidates: Vec<_> = slots.iter().map(|&s| slot_attributes(obs, s)).collect();
        let probs = self.params.probabilities(&words, &candidates);
        let u: f64 = self.rng.gen();
        let mut acc = 0.0;
        let mut chosen = probs.len() - 1;
        for (k, p) in probs.iter().enumerate() {
            acc += p;
            if u < acc {
                chosen = k;
                break;
            }
        }
        self.decisions.push(Decision { words, candidates, chosen });
        Some(slots[chosen])
    }
}

impl Policy for LearnerAgent {
    fn begin(&mut self, _episode: &Episode) {
        self.controller.reset();
        self.goal_ids.clear();
        self.target = None;
        self.decisions.clear();
    }

    fn act(&mut self, ep: &Episode) -> Action {
        let obs = ep.observation();
        if obs.goal_ids != self.goal_ids {
            self.goal_ids = obs.goal_ids.clone();
            self.target = self.choose(obs);
        }
        let cfg = ep.config();
        self.controller.act(ep.scene(), cfg.task, &cfg.world, self.target)
    }
}
