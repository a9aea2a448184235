#![allow(dead_code)]

pub mod enumerate;
pub mod oracle;
pub mod walkthrough;

use repairbench::world::{Backend, ObjectState, SceneState, WorldConfig};
use repairbench::{Color, Shape};

pub const VERBS: [&str; 12] = [
    "reach", "touch", "contact", "push", "move", "shift", "grasp", "grip", "take", "lift", "raise", "hoist",
];
pub const COLORS: [&str; 9] = ["red", "green", "blue", "yellow", "purple", "orange", "pink", "cyan", "brown"];
pub const RARE: [&str; 9] = ["crimson", "emerald", "azure", "amber", "violet", "tangerine", "rose", "teal", "chestnut"];
pub const SHAPES: [&str; 9] = ["cube", "box", "block", "cuboid", "brick", "oblong", "cylinder", "barrel", "tophat"];
pub const BEGINNINGS: [&[&str]; 6] = [&["sorry"], &["excuse", "me"], &["no", "i", "meant"], &["pardon"], &["not"], &["actually"]];

fn is_color(t: &str) -> bool {
    COLORS.contains(&t) || RARE.contains(&t)
}

/// `<OBJECT> ::= <COLOR> <SHAPE> | <SHAPE> | <COLOR> object`, whole slice.
fn object(t: &[&str]) -> bool {
    match t {
        [s] => SHAPES.contains(s),
        [c, s] => is_color(c) && (SHAPES.contains(s) || *s == "object"),
        _ => false,
    }
}

/// `<INSTRUCTION> ::= <TASKVERB> the <OBJECT>`
pub fn instruction(t: &[&str]) -> bool {
    t.len() >= 3 && VERBS.contains(&t[0]) && t[1] == "the" && object(&t[2..])
}

/// `<CORRECTION> ::= <BEGINNING> the <OBJECT>`
pub fn correction(t: &[&str]) -> bool {
    BEGINNINGS.iter().any(|b| {
        t.len() > b.len() + 1 && t[..b.len()] == **b && t[b.len()] == "the" && object(&t[b.len() + 1..])
    })
}

/// An instruction optionally followed by one correction.
pub fn extended(t: &[&str]) -> bool {
    (3..=t.len()).any(|k| instruction(&t[..k]) && (k == t.len() || correction(&t[k..])))
}

pub fn object_state(id: usize, color: Color, shape: Shape, x: f64, y: f64, cfg: &WorldConfig) -> ObjectState {
    let p = [x, y, cfg.object_half_extent];
    ObjectState {
        id,
        color,
        shape,
        position: p,
        start_position: p,
        half_extent: cfg.object_half_extent,
        attached: false,
    }
}

/// Continuous scene with objects spread along a row.
pub fn row_scene(objs: &[(Color, Shape)]) -> SceneState {
    let cfg = WorldConfig::default();
    let objects = objs
        .iter()
        .enumerate()
        .map(|(i, &(c, s))| object_state(i, c, s, -0.15 + 0.15 * i as f64, 0.1, &cfg))
        .collect();
    SceneState::new(Backend::Continuous, &cfg, objects)
}

/// Grid scene with objects on the given cells.
pub fn grid_scene(objs: &[(Color, Shape, [u32; 2])]) -> SceneState {
    let cfg = WorldConfig::default();
    let objects = objs
        .iter()
        .enumerate()
        .map(|(i, &(color, shape, c))| {
            let p = [c[0] as f64, c[1] as f64, 0.0];
            ObjectState {
                id: i,
                color,
                shape,
                position: p,
                start_position: p,
                half_extent: 0.5,
                attached: false,
            }
        })
        .collect();
    SceneState::new(Backend::Grid, &cfg, objects)
}
