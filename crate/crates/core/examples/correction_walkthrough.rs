//! A red cube, a green cube and a green cuboid. The instruction "grasp the
//! cube" is ambiguous; the oracle grasps the red cube first and is set
//! right by one correction, in both correction modes.
//!
//! ```text
//! cargo run --example correction_walkthrough
//! ```

use repairbench::agents::{Oracle, Policy};
use repairbench::config::EpisodeConfig;
use repairbench::env::Environment;
use repairbench::grammar::ObjectDescription;
use repairbench::instructor::{CorrectionMode, ScenarioKind};
use repairbench::world::{Backend, ObjectState, SceneState, WorldConfig};
use repairbench::{Color, Shape, Task};

fn scene(cfg: &WorldConfig) -> SceneState {
    let objects = [(Color::Red, Shape::Cube), (Color::Green, Shape::Cube), (Color::Green, Shape::Cuboid)]
        .into_iter()
        .enumerate()
        .map(|(id, (color, shape))| {
            let p = [-0.15 + 0.15 * id as f64, 0.1, cfg.object_half_extent];
            ObjectState {
                id,
                color,
                shape,
                position: p,
                start_position: p,
                half_extent: cfg.object_half_extent,
                attached: false,
            }
        })
        .collect();
    SceneState::new(Backend::Continuous, cfg, objects)
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for mode in [CorrectionMode::Ac, CorrectionMode::Acn] {
        let cfg = EpisodeConfig { task: Task::Grasp, mode, ..EpisodeConfig::default() };
        let env = Environment::new(cfg.clone())?;
        let want = ObjectDescription::shape(Shape::Cube);
        let mut ep = (0..)
            .map(|seed| env.reset_with_scene(scene(&cfg.world), ScenarioKind::Ambiguity, 1, seed))
            .find(|ep| ep.as_ref().map_or(true, |e| e.spec().instruction_goal.object == want))
            .expect("unbounded search")?;

        println!("== {mode:?} ==");
        println!("goal: {}", ep.goal().text());
        let mut oracle = Oracle::new();
        oracle.begin(&ep);
        while !ep.is_done() {
            let r = ep.step(oracle.act(&ep))?;
            let events = r.info.events(r.done);
            if !events.is_empty() {
                println!("step {:>3}: {:<40} {}", ep.step_count(), r.info.goal_text, events.join(", "));
            }
        }
        println!(
            "success {} after {} steps, {} goal extension(s), target {:?}\n",
            ep.success(),
            ep.step_count(),
            ep.goal_extensions(),
            oracle.target()
        );
    }
    Ok(())
}
