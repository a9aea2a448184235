//! Kinematic tabletop world with a continuous and a grid backend, plus the
//! task condition functions used for both reward and interaction detection.

mod continuous;
mod grid;

pub use continuous::no_object_overlap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::attributes::{Color, Shape, Task};

pub type Vec3 = [f64; 3];

/// Tolerance for contact and overlap comparisons.
pub const EPS: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Backend {
    #[default]
    Continuous,
    Grid,
}

/// Geometry and task thresholds. The table is centered at the origin with
/// its surface at z = 0.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WorldConfig {
    pub table_half_size: f64,
    pub object_half_extent: f64,
    pub gripper_radius: f64,
    pub workspace_height: f64,
    pub max_displacement: f64,
    pub reach_threshold: f64,
    pub push_threshold: f64,
    pub grasp_radius: f64,
    pub grasp_height_tolerance: f64,
    pub closed_finger_threshold: f64,
    pub lift_height: f64,
    pub min_object_separation: f64,
    /// Margin between sampled object centers and the table edge.
    pub spawn_margin: f64,
    pub gripper_start: Vec3,
    pub grid_size: u32,
    pub grid_start: [u32; 2],
    /// Sub-steps per action for contact resolution.
    pub substeps: u32,
}

impl Default for WorldConfig {
    fn default() -> Self {
        WorldConfig {
            table_half_size: 0.25,
            object_half_extent: 0.025,
            gripper_radius: 0.01,
            workspace_height: 0.3,
            max_displacement: 0.05,
            reach_threshold: 0.05,
            push_threshold: 0.10,
            grasp_radius: 0.03,
            grasp_height_tolerance: 0.03,
            closed_finger_threshold: 0.2,
            lift_height: 0.10,
            min_object_separation: 0.10,
            spawn_margin: 0.05,
            gripper_start: [0.0, 0.0, 0.15],
            grid_size: 8,
            grid_start: [3, 3],
            substeps: 10,
        }
    }
}

impl WorldConfig {
    /// Height of an on-table object's top face.
    pub fn object_top(&self) -> f64 {
        2.0 * self.object_half_extent
    }

    /// Largest |x| or |y| of an on-table object center.
    pub fn object_bound(&self) -> f64 {
        self.table_half_size - self.object_half_extent
    }

    pub fn contact_distance(&self) -> f64 {
        self.gripper_radius + self.object_half_extent
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ObjectState {
    pub id: usize,
    pub color: Color,
    pub shape: Shape,
    pub position: Vec3,
    /// Position at episode start, the reference for the push condition.
    pub start_position: Vec3,
    pub half_extent: f64,
    pub attached: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GripperState {
    pub position: Vec3,
    pub finger_opening: f64,
}

/// The object currently held and its offset from the gripper.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Hold {
    pub object: usize,
    pub offset: Vec3,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SceneState {
    pub backend: Backend,
    pub gripper: GripperState,
    pub objects: Vec<ObjectState>,
    pub step_count: u32,
    pub hold: Option<Hold>,
    /// Grid backend: object touched by the last `interact`.
    pub touched: Option<usize>,
}

impl SceneState {
    /// A scene with the gripper at its start pose. Object ids must equal
    /// their index.
    pub fn new(backend: Backend, cfg: &WorldConfig, objects: Vec<ObjectState>) -> Self {
        debug_assert!(objects.iter().enumerate().all(|(i, o)| o.id == i));
        let position = match backend {
            Backend::Continuous => cfg.gripper_start,
            Backend::Grid => [cfg.grid_start[0] as f64, cfg.grid_start[1] as f64, 0.0],
        };
        SceneState {
            backend,
            gripper: GripperState {
                position,
                finger_opening: 1.0,
            },
            objects,
            step_count: 0,
            hold: None,
            touched: None,
        }
    }

    pub fn object(&self, id: usize) -> Result<&ObjectState, WorldError> {
        self.objects.get(id).ok_or(WorldError::UnknownObject(id))
    }
}

/// Grid moves; `Up` increases the row index.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GridMove {
    Up,
    Down,
    Left,
    Right,
    Interact,
}

impl GridMove {
    pub const ALL: [GridMove; 5] = [
        GridMove::Up,
        GridMove::Down,
        GridMove::Left,
        GridMove::Right,
        GridMove::Interact,
    ];
}

/// `Continuous([dx, dy, dz, finger_delta])` or a grid move.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Action {
    Continuous([f64; 4]),
    Grid(GridMove),
}

impl Action {
    pub const ZERO: Action = Action::Continuous([0.0; 4]);

    pub fn backend(&self) -> Backend {
        match self {
            Action::Continuous(_) => Backend::Continuous,
            Action::Grid(_) => Backend::Grid,
        }
    }

    /// Clamps continuous components to their bounds.
    pub fn clamped(self, cfg: &WorldConfig) -> Action {
        match self {
            Action::Continuous(a) => {
                let m = cfg.max_displacement;
                let fix = |v: f64, lim: f64| if v.is_nan() { 0.0 } else { v.clamp(-lim, lim) };
                Action::Continuous([fix(a[0], m), fix(a[1], m), fix(a[2], m), fix(a[3], 1.0)])
            }
            grid => grid,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WorldError {
    #[error("no object with id {0}")]
    UnknownObject(usize),
}

/// Advances the scene by one action. Actions for the other backend leave
/// the scene untouched apart from the step counter.
pub fn apply_action(scene: &SceneState, action: Action, cfg: &WorldConfig) -> SceneState {
    let mut next = scene.clone();
    next.step_count += 1;
    match (scene.backend, action.clamped(cfg)) {
        (Backend::Continuous, Action::Continuous(a)) => continuous::step(&mut next, a, cfg),
        (Backend::Grid, Action::Grid(m)) => grid::step(&mut next, m, cfg),
        (Backend::Grid, _) => next.touched = None,
        _ => {}
    }
    next
}

pub fn horizontal_distance(a: &Vec3, b: &Vec3) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

pub fn distance(a: &Vec3, b: &Vec3) -> f64 {
    let d = [a[0] - b[0], a[1] - b[1], a[2] - b[2]];
    (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt()
}

/// Task condition for one object in the next state.
pub fn evaluate_condition(
    scene: &SceneState,
    target: usize,
    task: Task,
    cfg: &WorldConfig,
) -> Result<bool, WorldError> {
    let obj = scene.object(target)?;
    if scene.backend == Backend::Grid {
        return Ok(scene.touched == Some(target));
    }
    let g = &scene.gripper;
    Ok(match task {
        Task::Reach => distance(&g.position, &obj.position) < cfg.reach_threshold,
        Task::Push => {
            !obj.attached
                && (obj.position[2] - obj.half_extent).abs() < 1e-6
                && horizontal_distance(&obj.position, &obj.start_position) >= cfg.push_threshold
        }
        Task::Grasp => obj.attached && g.finger_opening < cfg.closed_finger_threshold,
        Task::Lift => obj.attached && obj.position[2] >= cfg.lift_height,
    })
}

/// Lowest-id object satisfying the task condition, if any.
pub fn detect_interaction(scene: &SceneState, task: Task, cfg: &WorldConfig) -> Option<usize> {
    (0..scene.objects.len()).find(|&id| evaluate_condition(scene, id, task, cfg).unwrap_or(false))
}

/// ASCII dump of a grid scene, top row first.
pub fn render_grid(scene: &SceneState, cfg: &WorldConfig) -> String {
    grid::render(scene, cfg)
}
