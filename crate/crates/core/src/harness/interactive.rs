//! Terminal mode in which a human plays the instructor.

use std::io::{self, BufRead, Write};
use std::sync::Arc;

use crate::agents::Controller;
use crate::env::Environment;
use crate::grammar::{parse_utterance, ParsedGoal, Utterance};
use crate::instructor::matching_objects;
use crate::world::{apply_action, evaluate_condition, render_grid, Action, Backend, GridMove, SceneState};

#[derive(Clone, Debug, PartialEq)]
pub struct SessionSummary {
    pub success: bool,
    pub steps: u32,
    pub goal_text: Option<String>,
}

fn describe(scene: &SceneState, env: &Environment, out: &mut impl Write) -> io::Result<()> {
    if scene.backend == Backend::Grid {
        write!(out, "{}", render_grid(scene, &env.config().world))?;
    } else {
        let g = scene.gripper.position;
        writeln!(out, "gripper at ({:.3}, {:.3}, {:.3})", g[0], g[1], g[2])?;
    }
    for o in &scene.objects {
        let p = o.position;
        writeln!(out, "  {}: {} {} at ({:.3}, {:.3}, {:.3})", o.id, o.color, o.shape, p[0], p[1], p[2])?;
    }
    Ok(())
}

fn vocabulary_hint(env: &Environment, out: &mut impl Write) -> io::Result<()> {
    writeln!(out, "valid words: {}", env.vocab().words()[1..].join(" "))
}

fn keyboard_action(text: &str, backend: Backend) -> Option<Action> {
    match backend {
        Backend::Grid => {
            let m = match text {
                "up" | "w" => GridMove::Up,
                "down" | "s" => GridMove::Down,
                "left" | "a" => GridMove::Left,
                "right" | "d" => GridMove::Right,
                "interact" | "e" => GridMove::Interact,
                _ => return None,
            };
            Some(Action::Grid(m))
        }
        Backend::Continuous => {
            let v: Vec<f64> = text.split_whitespace().map(str::parse).collect::<Result<_, _>>().ok()?;
            <[f64; 4]>::try_from(v).ok().map(Action::Continuous)
        }
    }
}

/// Reads one line; `None` on end of input.
fn read_line(input: &mut impl BufRead) -> io::Result<Option<String>> {
    let mut line = String::new();
    if input.read_line(&mut line)? == 0 {
        return Ok(None);
    }
    Ok(Some(line.trim().to_string()))
}

/// Runs one session on a sampled scene. The human types an instruction,
/// then presses enter to let the oracle-controlled agent step, types a
/// correction to extend the goal, or (with `keyboard`) types a move.
pub fn interactive_session<R: BufRead, W: Write>(
    env: &Arc<Environment>,
    seed: u64,
    keyboard: bool,
    mut input: R,
    mut out: W,
) -> io::Result<SessionSummary> {
    let cfg = env.config();
    let episode = env.reset(seed).map_err(|e| io::Error::other(e.to_string()))?;
    let mut scene = episode.scene().clone();
    let lexicon = env.lexicon();
    let mut controller = Controller::new();
    let mut summary = SessionSummary {
        success: false,
        steps: 0,
        goal_text: None,
    };

    describe(&scene, env, &mut out)?;
    let (mut goal, mut parsed): (Utterance, ParsedGoal) = loop {
        write!(out, "instruction> ")?;
        out.flush()?;
        let Some(line) = read_line(&mut input)? else { return Ok(summary) };
        if line == "quit" || line == "q" {
            return Ok(summary);
        }
        let u = Utterance::from_text(&line);
        match parse_utterance(&u, lexicon) {
            Ok(p) => break (u, p),
            Err(e) => {
                writeln!(out, "could not parse: {e}")?;
                vocabulary_hint(env, &mut out)?;
            }
        }
    };
    writeln!(out, "goal: {}", goal.text())?;
    summary.goal_text = Some(goal.text());

    while scene.step_count < cfg.max_steps {
        let help = if keyboard { "enter=agent step, a move, a correction, q=quit" } else { "enter=step, a correction, q=quit" };
        write!(out, "step {} ({help})> ", scene.step_count)?;
        out.flush()?;
        let Some(line) = read_line(&mut input)? else { break };
        if line == "quit" || line == "q" {
            break;
        }
        let action = if line.is_empty() {
            let target = matching_objects(&parsed.combined.object, &scene).first().copied();
            controller.act(&scene, cfg.task, &cfg.world, target)
        } else if let Some(a) = keyboard.then(|| keyboard_action(&line, scene.backend)).flatten() {
            a
        } else {
            let extended = Utterance::from_text(&format!("{} {}", goal.text(), line));
            let alone = Utterance::from_text(&line);
            let attempt = parse_utterance(&extended, lexicon)
                .ok()
                .filter(|p| p.correction.is_some())
                .map(|p| (extended, p))
                .or_else(|| parse_utterance(&alone, lexicon).ok().map(|p| (alone, p)));
            match attempt {
                Some((u, p)) => {
                    goal = u;
                    parsed = p;
                    writeln!(out, "goal: {}", goal.text())?;
                    summary.goal_text = Some(goal.text());
                }
                None => {
                    writeln!(out, "could not parse `{line}` as a correction or instruction")?;
                    vocabulary_hint(env, &mut out)?;
                }
            }
            continue;
        };
        scene = apply_action(&scene, action, &cfg.world);
        summary.steps = scene.step_count;
        describe(&scene, env, &mut out)?;
        let matches = matching_objects(&parsed.combined.object, &scene);
        if let [only] = matches.as_slice() {
            if evaluate_condition(&scene, *only, cfg.task, &cfg.world).unwrap_or(false) {
                writeln!(out, "success after {} steps", scene.step_count)?;
                summary.success = true;
                return Ok(summary);
            }
        }
    }
    writeln!(out, "session ended without success")?;
    Ok(summary)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::EpisodeConfig;

    fn grid_env() -> Arc<Environment> {
        Environment::new(EpisodeConfig { backend: Backend::Grid, ..Default::default() }).unwrap()
    }

    #[test]
    fn gibberish_reprompts_with_vocabulary() {
        let env = grid_env();
        let mut out = Vec::new();
        let s = interactive_session(&env, 1, false, "florp the zorp\nq\n".as_bytes(), &mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        assert!(text.contains("could not parse") && text.contains("valid words:"));
        assert_eq!(s.goal_text, None);
    }

    #[test]
    fn typed_instruction_and_correction() {
        let env = grid_env();
        let ep = env.reset(2).unwrap();
        let o = &ep.scene().objects[0];
        let script = format!(
            "reach the {} {}\nactually the {} {}\n{}",
            o.color,
            o.shape,
            o.color,
            o.shape,
            "\n".repeat(40)
        );
        let mut out = Vec::new();
        let s = interactive_session(&env, 2, false, script.as_bytes(), &mut out).unwrap();
        assert!(s.success);
        assert!(s.goal_text.unwrap().contains("actually"));
    }
}
