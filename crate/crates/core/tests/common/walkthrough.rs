//! Scripted scenes in which the oracle first picks the wrong object and
//! is set right by exactly one correction.

use std::sync::Arc;

use repairbench::agents::{Oracle, Policy};
use repairbench::config::EpisodeConfig;
use repairbench::env::{Environment, Episode};
use repairbench::grammar::{parse_utterance, Beginning, ColorTerm, ObjectDescription, Utterance};
use repairbench::instructor::{CorrectionMode, ScenarioKind, Timing};
use repairbench::world::SceneState;
use repairbench::{Color, Shape, Task};

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn env(task: Task, mode: CorrectionMode) -> Arc<Environment> {
    Environment::new(EpisodeConfig {
        task,
        mode,
        timing: Timing::OnInteraction,
        ..EpisodeConfig::default()
    })
    .unwrap()
}

/// First seed whose instruction parses to `want`.
fn episode_with(
    env: &Arc<Environment>,
    scene: &SceneState,
    kind: ScenarioKind,
    intended: usize,
    want: &ObjectDescription,
) -> Result<Episode, String> {
    (0..200)
        .map(|seed| env.reset_with_scene(scene.clone(), kind, intended, seed).unwrap())
        .find(|ep| &ep.spec().instruction_goal.object == want)
        .ok_or_else(|| format!("no seed produced the instruction {want}"))
}

pub struct Walkthrough {
    pub instruction: Utterance,
    pub goal: Utterance,
    pub fragment: ObjectDescription,
    pub beginning: Beginning,
    pub combined: ObjectDescription,
}

/// Rolls the oracle out and checks success after exactly one extension.
fn run(mut ep: Episode) -> Result<Walkthrough, String> {
    let mut oracle = Oracle::new();
    let instruction = ep.goal().clone();
    let mut first_target = None;
    oracle.begin(&ep);
    while !ep.is_done() {
        let a = oracle.act(&ep);
        first_target.get_or_insert(oracle.target());
        ep.step(a).map_err(|e| e.to_string())?;
    }
    let goal = ep.goal().clone();
    ensure(first_target.flatten() == Some(0), || "oracle did not start on object 0".into())?;
    ensure(ep.success(), || format!("no success: {}", goal.text()))?;
    ensure(ep.goal_extensions() == 1, || format!("{} extensions", ep.goal_extensions()))?;
    ensure(goal.tokens().starts_with(instruction.tokens()), || "goal does not extend the instruction".into())?;
    let words: Vec<&str> = goal.tokens().iter().map(String::as_str).collect();
    ensure(super::extended(&words), || format!("`{}` is outside the grammar", goal.text()))?;
    let parsed = parse_utterance(&goal, ep.environment().lexicon()).map_err(|e| e.to_string())?;
    let c = parsed.correction.ok_or("goal carries no correction")?;
    Ok(Walkthrough {
        instruction,
        goal,
        fragment: c.fragment,
        beginning: c.beginning,
        combined: parsed.combined.object,
    })
}

fn tail(u: &Utterance, n: usize) -> Vec<&str> {
    u.tokens()[u.len() - n..].iter().map(String::as_str).collect()
}

fn red_green_scene() -> SceneState {
    super::row_scene(&[(Color::Red, Shape::Cube), (Color::Green, Shape::Cube), (Color::Green, Shape::Cuboid)])
}

fn red_blue_scene() -> SceneState {
    super::row_scene(&[(Color::Red, Shape::Cuboid), (Color::Blue, Shape::Cuboid)])
}

/// "grasp the cube" over a red cube, a green cube and a green cuboid;
/// the grasped red cube draws "... the green cube".
pub fn grasp_cube_affirmative() -> Result<Walkthrough, String> {
    let env = env(Task::Grasp, CorrectionMode::Ac);
    let ep = episode_with(&env, &red_green_scene(), ScenarioKind::Ambiguity, 1, &ObjectDescription::shape(Shape::Cube))?;
    let w = run(ep)?;
    ensure(w.fragment == ObjectDescription::color_shape(Color::Green, Shape::Cube), || format!("fragment {}", w.fragment))?;
    ensure(w.beginning != Beginning::Negation, || "negated".into())?;
    ensure(tail(&w.goal, 2)[0] == "green", || w.goal.text())?;
    Ok(w)
}

/// The same scene in negation mode: "not the red object".
pub fn grasp_cube_negated() -> Result<Walkthrough, String> {
    let env = env(Task::Grasp, CorrectionMode::Acn);
    let ep = episode_with(&env, &red_green_scene(), ScenarioKind::Ambiguity, 1, &ObjectDescription::shape(Shape::Cube))?;
    let w = run(ep)?;
    ensure(w.fragment == ObjectDescription::not_color(Color::Red), || format!("fragment {}", w.fragment))?;
    ensure(tail(&w.goal, 4) == ["not", "the", "red", "object"], || w.goal.text())?;
    Ok(w)
}

/// "reach the cuboid" over a red and a blue cuboid.
pub fn ambiguity() -> Result<Walkthrough, String> {
    let env = env(Task::Reach, CorrectionMode::Ac);
    let ep = episode_with(&env, &red_blue_scene(), ScenarioKind::Ambiguity, 1, &ObjectDescription::shape(Shape::Cuboid))?;
    let w = run(ep)?;
    ensure(w.fragment == ObjectDescription::color(Color::Blue), || format!("fragment {}", w.fragment))?;
    ensure(tail(&w.goal, 2) == ["blue", "object"], || w.goal.text())?;
    Ok(w)
}

/// "reach the azure cuboid": the rare word is not understood.
pub fn common_ground() -> Result<Walkthrough, String> {
    let env = env(Task::Reach, CorrectionMode::Ac);
    let want = ObjectDescription {
        color: Some(ColorTerm::Unknown),
        shape: Some(Shape::Cuboid),
        ..Default::default()
    };
    let ep = episode_with(&env, &red_blue_scene(), ScenarioKind::CommonGround, 1, &want)?;
    let w = run(ep)?;
    ensure(tail(&w.instruction, 2)[0] == "azure", || w.instruction.text())?;
    ensure(w.fragment == ObjectDescription::color(Color::Blue), || format!("fragment {}", w.fragment))?;
    ensure(tail(&w.goal, 2) == ["blue", "object"], || w.goal.text())?;
    Ok(w)
}

/// "reach the red cuboid" when the blue one was meant.
pub fn instruction_correction() -> Result<Walkthrough, String> {
    let env = env(Task::Reach, CorrectionMode::Ac);
    let want = ObjectDescription::color_shape(Color::Red, Shape::Cuboid);
    let ep = episode_with(&env, &red_blue_scene(), ScenarioKind::InstructionCorrection, 1, &want)?;
    ensure(ep.spec().named_object == Some(0), || "named object is not 0".into())?;
    let w = run(ep)?;
    ensure(w.fragment == ObjectDescription::color(Color::Blue), || format!("fragment {}", w.fragment))?;
    ensure(tail(&w.goal, 2) == ["blue", "object"], || w.goal.text())?;
    ensure(w.combined == ObjectDescription::color_shape(Color::Blue, Shape::Cuboid), || format!("combined {}", w.combined))?;
    Ok(w)
}

pub const ALL: [(&str, fn() -> Result<Walkthrough, String>); 5] = [
    ("grasp the cube, affirmative", grasp_cube_affirmative),
    ("grasp the cube, negated", grasp_cube_negated),
    ("ambiguity", ambiguity),
    ("common ground", common_ground),
    ("instruction correction", instruction_correction),
];
