//! Plays the instructor from the keyboard: type an instruction, press
//! enter to let the agent move, type a correction when it heads for the
//! wrong object.
//!
//! ```text
//! cargo run --example interactive_session            # scripted demo
//! cargo run --example interactive_session -- --stdin # type yourself
//! ```

use std::io;

use repairbench::config::EpisodeConfig;
use repairbench::env::Environment;
use repairbench::harness::interactive_session;
use repairbench::world::Backend;

fn main() -> io::Result<()> {
    let env = Environment::new(EpisodeConfig { backend: Backend::Grid, num_objects: 2, ..EpisodeConfig::default() })
        .map_err(io::Error::other)?;
    let seed = 3;
    let stdout = io::stdout();
    if std::env::args().any(|a| a == "--stdin") {
        let stdin = io::stdin();
        let s = interactive_session(&env, seed, true, stdin.lock(), stdout.lock())?;
        println!("\nsuccess: {}", s.success);
        return Ok(());
    }

    let ep = env.reset(seed).map_err(io::Error::other)?;
    let [a, b] = [&ep.scene().objects[0], &ep.scene().objects[1]];
    // Ask for the first object, then correct to the second.
    let script = format!(
        "fly me to the moon\nreach the {} {}\n\n\nactually the {} {}\n{}",
        a.color,
        a.shape,
        b.color,
        b.shape,
        "\n".repeat(20)
    );
    let s = interactive_session(&env, seed, false, script.as_bytes(), stdout.lock())?;
    println!("\nsuccess: {} after {} steps, goal `{}`", s.success, s.steps, s.goal_text.unwrap_or_default());
    Ok(())
}
