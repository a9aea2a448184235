use serde::{Deserialize, Serialize};

use crate::attributes::{Color, Shape};
use crate::grammar::{GrammarError, Utterance, Vocabulary, MAX_GOAL_TOKENS};
use crate::world::SceneState;

pub const OBJECT_SLOTS: usize = 3;
pub const GRIPPER_FEATURES: usize = 4;
/// position 3, color one-hot, shape one-hot, valid flag
pub const SLOT_FEATURES: usize = 3 + Color::ALL.len() + Shape::ALL.len() + 1;
pub const STATE_DIM: usize = GRIPPER_FEATURES + OBJECT_SLOTS * SLOT_FEATURES;
/// Length of the flat vector: state features followed by goal token ids.
pub const OBS_DIM: usize = STATE_DIM + MAX_GOAL_TOKENS;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Observation {
    /// Gripper position and finger opening, then one block per object slot.
    pub features: Vec<f64>,
    /// Current goal, right-padded with the pad id.
    pub goal_ids: Vec<u32>,
}

impl Observation {
    pub fn encode(scene: &SceneState, goal: &Utterance, vocab: &Vocabulary) -> Result<Self, GrammarError> {
        let mut features = vec![0.0; STATE_DIM];
        let g = &scene.gripper;
        features[..3].copy_from_slice(&g.position);
        features[3] = g.finger_opening;
        for (slot, o) in scene.objects.iter().take(OBJECT_SLOTS).enumerate() {
            let b = &mut features[GRIPPER_FEATURES + slot * SLOT_FEATURES..][..SLOT_FEATURES];
            b[..3].copy_from_slice(&o.position);
            b[3 + o.color.index()] = 1.0;
            b[3 + Color::ALL.len() + o.shape.index()] = 1.0;
            b[SLOT_FEATURES - 1] = 1.0;
        }
        let goal_ids = vocab.encode(goal, MAX_GOAL_TOKENS)?;
        Ok(Observation { features, goal_ids })
    }

    /// Features of one slot.
    pub fn slot(&self, slot: usize) -> &[f64] {
        &self.features[GRIPPER_FEATURES + slot * SLOT_FEATURES..][..SLOT_FEATURES]
    }

    pub fn slot_valid(&self, slot: usize) -> bool {
        self.slot(slot)[SLOT_FEATURES - 1] == 1.0
    }

    /// Flat vector of length [`OBS_DIM`], ids cast to floats.
    pub fn to_vec(&self) -> Vec<f64> {
        let mut v = self.features.clone();
        v.extend(self.goal_ids.iter().map(|&i| i as f64));
        v
    }
}
