//! Records an oracle episode as a JSONL replay log, reads it back and
//! re-simulates it to check that every step matches.
//!
//! ```text
//! cargo run --example replay_log -- [path] [seed]
//! ```

use repairbench::agents::{rollout, Oracle};
use repairbench::config::EpisodeConfig;
use repairbench::env::replay::ReplayLog;
use repairbench::env::Environment;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let path = args.next().unwrap_or_else(|| std::env::temp_dir().join("repairbench_replay.jsonl").display().to_string());
    let seed: u64 = args.next().map(|s| s.parse()).transpose()?.unwrap_or(1);

    let env = Environment::new(EpisodeConfig { correction_probability: 1.0, ..EpisodeConfig::default() })?;
    let mut ep = env.reset(seed)?;
    let mut log = ReplayLog::start(&ep);
    let outcome = rollout(&mut ep, &mut Oracle::new(), Some(&mut log))?;
    log.write_jsonl(std::fs::File::create(&path)?)?;
    println!(
        "seed {seed}: {:?} episode, success {} in {} steps, {} records written to {path}",
        outcome.kind,
        outcome.success,
        outcome.steps,
        log.records.len()
    );

    let back = ReplayLog::read_jsonl(std::io::BufReader::new(std::fs::File::open(&path)?))?;
    back.verify()?;
    println!("re-simulated {} actions: identical", back.actions().count());
    for line in back.to_jsonl().lines().filter(|l| l.contains("correction_issued")) {
        println!("{line}");
    }
    Ok(())
}
