//! Scripted motion toward a chosen object. Shared by every agent; only the
//! choice of target differs between them.

use std::f64::consts::TAU;

use crate::attributes::Task;
use crate::world::{horizontal_distance, Action, Backend, GridMove, SceneState, WorldConfig};

/// Number of candidate push directions.
const PUSH_DIRECTIONS: usize = 16;
/// Extra push distance beyond the task threshold.
const PUSH_MARGIN: f64 = 0.03;
/// Required gap between a push corridor and other objects.
const PUSH_CLEARANCE: f64 = 0.01;
/// Horizontal tolerance for "above the target".
const ALIGN_TOL: f64 = 1e-3;

#[derive(Clone, Debug, Default)]
pub struct Controller {
    push_plan: Option<(usize, [f64; 2])>,
}

fn scaled(v: [f64; 2], max: f64) -> [f64; 2] {
    let n = v[0].hypot(v[1]);
    if n > max {
        [v[0] * max / n, v[1] * max / n]
    } else {
        v
    }
}

/// Distance from point `p` to the segment `a`..`b` in the plane.
fn segment_distance(p: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    let ab = [b[0] - a[0], b[1] - a[1]];
    let len2 = ab[0] * ab[0] + ab[1] * ab[1];
    let t = if len2 > 0.0 {
        (((p[0] - a[0]) * ab[0] + (p[1] - a[1]) * ab[1]) / len2).clamp(0.0, 1.0)
    } else {
        0.0
    };
    (p[0] - a[0] - t * ab[0]).hypot(p[1] - a[1] - t * ab[1])
}

impl Controller {
    pub fn new() -> Self {
        Self::default()
    }

    /// Forgets any cached push plan.
    pub fn reset(&mut self) {
        self.push_plan = None;
    }

    /// Next action moving toward completing `task` on `target`. With no
    /// target the agent releases anything it holds and otherwise waits.
    pub fn act(&mut self, scene: &SceneState, task: Task, cfg: &WorldConfig, target: Option<usize>) -> Action {
        match scene.backend {
            Backend::Grid => grid_act(scene, target),
            Backend::Continuous => self.continuous_act(scene, task, cfg, target),
        }
    }

    fn continuous_act(&mut self, scene: &SceneState, task: Task, cfg: &WorldConfig, target: Option<usize>) -> Action {
        let g = scene.gripper.position;
        let m = cfg.max_displacement;
        let safe = 2.0 * cfg.object_top();
        let target = target.filter(|&t| t < scene.objects.len());

        if let Some(h) = &scene.hold {
            let keep = Some(h.object) == target && matches!(task, Task::Grasp | Task::Lift);
            let fingers = if keep { -1.0 } else { 1.0 };
            return Action::Continuous([0.0, 0.0, m, fingers]);
        }
        let Some(t) = target else {
            return Action::Continuous([0.0, 0.0, 0.0, 1.0]);
        };
        let o = &scene.objects[t];
        let goal = match task {
            Task::Push => {
                let dir = self.push_direction(scene, t, cfg);
                let contact = cfg.contact_distance();
                let r = [g[0] - o.position[0], g[1] - o.position[1]];
                let along = r[0] * dir[0] + r[1] * dir[1];
                let perp = (r[0] - along * dir[0]).hypot(r[1] - along * dir[1]);
                let low = g[2] < o.position[2] + o.half_extent - 1e-6;
                if low && perp < 2.0 * ALIGN_TOL && along < 0.0 && along > -(contact + 0.02) {
                    return Action::Continuous([dir[0] * m, dir[1] * m, 0.0, 1.0]);
                }
                let gap = contact + 0.005;
                ([o.position[0] - dir[0] * gap, o.position[1] - dir[1] * gap], o.position[2])
            }
            _ => ([o.position[0], o.position[1]], 0.0),
        };
        let (xy, low_z) = goal;
        let d = [xy[0] - g[0], xy[1] - g[1]];
        if d[0].hypot(d[1]) < ALIGN_TOL {
            let top = o.position[2] + o.half_extent;
            if matches!(task, Task::Grasp | Task::Lift) && g[2] <= top + 1e-6 {
                return Action::Continuous([0.0, 0.0, 0.0, -1.0]);
            }
            return Action::Continuous([d[0], d[1], (low_z - g[2]).clamp(-m, m), 1.0]);
        }
        if g[2] < safe - 1e-9 {
            return Action::Continuous([0.0, 0.0, (safe - g[2]).min(m), 1.0]);
        }
        let v = scaled(d, m);
        Action::Continuous([v[0], v[1], (safe - g[2]).clamp(-m, m), 1.0])
    }

    fn push_direction(&mut self, scene: &SceneState, t: usize, cfg: &WorldConfig) -> [f64; 2] {
        if let Some((id, dir)) = self.push_plan {
            if id == t {
                return dir;
            }
        }
        let dir = plan_push(scene, t, cfg);
        self.push_plan = Some((t, dir));
        dir
    }
}

/// Picks a push direction whose corridor stays on the table and clear of
/// other objects, preferring directions toward the table center.
pub fn plan_push(scene: &SceneState, t: usize, cfg: &WorldConfig) -> [f64; 2] {
    let o = &scene.objects[t];
    let p = [o.position[0], o.position[1]];
    let bound = cfg.object_bound() - 0.005;
    let travel = cfg.push_threshold + PUSH_MARGIN;
    let gap = cfg.contact_distance() + 0.005;
    let base = (-p[1]).atan2(-p[0]);
    let step = TAU / PUSH_DIRECTIONS as f64;

    let mut best: Option<([f64; 2], f64)> = None;
    for k in 0..PUSH_DIRECTIONS {
        let offset = if k % 2 == 0 { (k / 2) as f64 } else { -(k.div_ceil(2) as f64) };
        let ang = base + offset * step;
        let dir = [ang.cos(), ang.sin()];
        let end = [p[0] + dir[0] * travel, p[1] + dir[1] * travel];
        let start = [p[0] - dir[0] * gap, p[1] - dir[1] * gap];
        let on_table = end[0].abs() <= bound
            && end[1].abs() <= bound
            && start[0].abs() <= cfg.table_half_size
            && start[1].abs() <= cfg.table_half_size;
        let moved_enough = horizontal_distance(&[end[0], end[1], 0.0], &o.start_position)
            >= cfg.push_threshold + PUSH_CLEARANCE;
        let clearance = scene
            .objects
            .iter()
            .filter(|q| q.id != t)
            .map(|q| segment_distance([q.position[0], q.position[1]], start, end) - o.half_extent - q.half_extent)
            .fold(f64::INFINITY, f64::min);
        if on_table && moved_enough && clearance >= PUSH_CLEARANCE {
            return dir;
        }
        let score = if on_table && moved_enough { clearance } else { f64::NEG_INFINITY };
        if best.is_none_or(|(_, s)| score > s) {
            best = Some((dir, score));
        }
    }
    best.map(|(d, _)| d).unwrap_or([1.0, 0.0])
}

/// Walks onto the target's cell, then interacts.
fn grid_act(scene: &SceneState, target: Option<usize>) -> Action {
    let Some(o) = target.and_then(|t| scene.objects.get(t)) else {
        return Action::ZERO;
    };
    let g = scene.gripper.position;
    let (dx, dy) = (o.position[0] - g[0], o.position[1] - g[1]);
    let m = if dx > 0.0 {
        GridMove::Right
    } else if dx < 0.0 {
        GridMove::Left
    } else if dy > 0.0 {
        GridMove::Up
    } else if dy < 0.0 {
        GridMove::Down
    } else {
        GridMove::Interact
    };
    Action::Grid(m)
}
