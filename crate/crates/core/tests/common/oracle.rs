//! Reference reward: an interpreter for goal texts built on the word
//! tables above, and a brute-force task condition.

use repairbench::env::Episode;
use repairbench::instructor::{ScenarioKind, Timing};
use repairbench::world::{Backend, ObjectState, SceneState, WorldConfig};
use repairbench::{Color, Shape, Task};

use super::{BEGINNINGS, COLORS, RARE, SHAPES};

/// Slot constraints. `color: Some(None)` is a color word outside the
/// common vocabulary, which constrains nothing.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Slots {
    pub color: Option<Option<Color>>,
    pub shape: Option<Shape>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Goal {
    pub instruction: Slots,
    /// Correction slots and whether they are negated.
    pub correction: Option<(Slots, bool)>,
}

fn color_word(w: &str) -> Option<Option<Color>> {
    if let Some(i) = COLORS.iter().position(|c| *c == w) {
        return Some(Some(Color::ALL[i]));
    }
    RARE.contains(&w).then_some(None)
}

fn shape_word(w: &str) -> Option<Shape> {
    SHAPES.iter().position(|s| *s == w).map(|i| Shape::ALL[i / 3])
}

fn object(t: &[&str]) -> Option<Slots> {
    match t {
        [s] => Some(Slots { color: None, shape: Some(shape_word(s)?) }),
        [c, "object"] => Some(Slots { color: Some(color_word(c)?), shape: None }),
        [c, s] => Some(Slots { color: Some(color_word(c)?), shape: Some(shape_word(s)?) }),
        _ => None,
    }
}

pub fn interpret(t: &[&str]) -> Option<Goal> {
    for k in 3..=t.len() {
        if !super::instruction(&t[..k]) {
            continue;
        }
        let instruction = object(&t[2..k])?;
        if k == t.len() {
            return Some(Goal { instruction, correction: None });
        }
        let rest = &t[k..];
        let b = BEGINNINGS.iter().find(|b| rest.len() > b.len() && rest[..b.len()] == ***b)?;
        if rest[b.len()] != "the" {
            return None;
        }
        let slots = object(&rest[b.len() + 1..])?;
        return Some(Goal { instruction, correction: Some((slots, *b == ["not"])) });
    }
    None
}

fn admits(s: &Slots, o: &ObjectState) -> bool {
    let color_ok = match s.color {
        Some(Some(c)) => c == o.color,
        _ => true,
    };
    color_ok && s.shape.is_none_or(|sh| sh == o.shape)
}

impl Goal {
    pub fn admits(&self, o: &ObjectState, with_correction: bool) -> bool {
        let base = self.instruction;
        match self.correction.filter(|_| with_correction) {
            None => admits(&base, o),
            Some((c, false)) => {
                let merged = Slots {
                    color: c.color.or(base.color),
                    shape: c.shape.or(base.shape),
                };
                admits(&merged, o)
            }
            Some((c, true)) => {
                let banned_color = c.color.flatten();
                let banned_shape = c.shape;
                let kept = Slots {
                    color: base.color.filter(|k| k.is_none() || *k != banned_color),
                    shape: base.shape.filter(|k| Some(*k) != banned_shape),
                };
                admits(&kept, o) && Some(o.color) != banned_color && Some(o.shape) != banned_shape
            }
        }
    }
}

fn dist(a: &[f64; 3], b: &[f64; 3], dims: usize) -> f64 {
    (0..dims).map(|k| (a[k] - b[k]).powi(2)).sum::<f64>().sqrt()
}

/// Task condition straight from its definition.
pub fn condition(s: &SceneState, id: usize, task: Task, cfg: &WorldConfig) -> bool {
    let o = &s.objects[id];
    if s.backend == Backend::Grid {
        return s.touched == Some(id);
    }
    match task {
        Task::Reach => dist(&s.gripper.position, &o.position, 3) < cfg.reach_threshold,
        Task::Push => {
            !o.attached
                && (o.position[2] - o.half_extent).abs() < 1e-6
                && dist(&o.position, &o.start_position, 2) >= cfg.push_threshold
        }
        Task::Grasp => o.attached && s.gripper.finger_opening < cfg.closed_finger_threshold,
        Task::Lift => o.attached && o.position[2] >= cfg.lift_height,
    }
}

pub struct Expected {
    pub reward: i32,
    /// Reward under the unique-object reading alone, ignoring pending
    /// corrections.
    pub literal: i32,
}

/// Reward an episode should have paid on the step that produced its
/// current state.
pub fn expected_reward(ep: &Episode) -> Expected {
    let scene = ep.scene();
    let cfg = ep.config();
    let words: Vec<&str> = ep.goal().tokens().iter().map(String::as_str).collect();
    let goal = interpret(&words).expect("goal text is in the grammar");
    let holds = |id: usize| condition(scene, id, cfg.task, &cfg.world);
    let spec = ep.spec();
    let pending = spec.kind != ScenarioKind::None && spec.timing == Timing::OnInteraction && !spec.correction_issued;
    let unique = {
        let m: Vec<usize> = (0..scene.objects.len()).filter(|&i| goal.admits(&scene.objects[i], true)).collect();
        m.len() == 1 && holds(m[0])
    };
    let ok = if pending {
        let t = spec.intended_target;
        holds(t) && goal.admits(&scene.objects[t], false)
    } else {
        unique
    };
    Expected {
        reward: if ok { 0 } else { -1 },
        literal: if unique { 0 } else { -1 },
    }
}
