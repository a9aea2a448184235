//! Compares the oracle with the oracle that ignores corrections, per
//! scenario kind.
//!
//! ```text
//! cargo run --release --example blind_ceiling -- [episodes]
//! ```

use repairbench::config::EpisodeConfig;
use repairbench::env::Environment;
use repairbench::harness::validate::blind_ceiling;
use repairbench::harness::{evaluate, summarize, AgentKind};
use repairbench::instructor::ScenarioKind;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let episodes: u32 = std::env::args().nth(1).map(|s| s.parse()).transpose()?.unwrap_or(4000);
    println!("{:<24} {:>8} {:>8} {:>10} {:>10}", "kind", "oracle", "blind", "analytic", "blind corr");
    for (kind, inner) in [
        (ScenarioKind::Ambiguity, 0.5),
        (ScenarioKind::CommonGround, f64::NAN),
        (ScenarioKind::InstructionCorrection, 0.0),
    ] {
        let cfg = EpisodeConfig { kinds: vec![kind], ..EpisodeConfig::default() };
        let p = cfg.correction_probability;
        let env = Environment::new(cfg)?;
        let oracle = evaluate(&env, AgentKind::Oracle, None, 0, 0, episodes, 4)?;
        let blind = evaluate(&env, AgentKind::BlindOracle, None, 0, 0, episodes, 4)?;
        let (o, _, _) = summarize(&oracle);
        let (b, bc, _) = summarize(&blind);
        let analytic = if inner.is_nan() { "-".to_string() } else { format!("{:.3}", blind_ceiling(p, inner)) };
        println!(
            "{:<24} {o:>8.3} {b:>8.3} {analytic:>10} {:>10}",
            format!("{kind:?}"),
            bc.map_or("-".to_string(), |c| format!("{c:.3}"))
        );
    }
    Ok(())
}
