//! Trains the linear grounding learner on the grid backend and prints the
//! evaluation curve of each seed.
//!
//! ```text
//! cargo run --release --example train_learner -- [configs/learner_grid_ambiguity.toml]
//! ```

use std::path::PathBuf;

use repairbench::harness::{run_experiment, ExperimentConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = std::env::args().nth(1).map(PathBuf::from).unwrap_or_else(|| {
        PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs/learner_grid_ambiguity.toml")
    });
    let cfg = ExperimentConfig::load(&path)?;
    let start = std::time::Instant::now();
    let res = run_experiment(&cfg)?;
    for seed in res.table.seeds() {
        println!("seed {seed}");
        for row in res.table.curve(seed) {
            println!(
                "  {:>9} steps  overall {:.3}  correction {}  length {:.1}",
                row.steps,
                row.overall_success,
                row.correction_success.map_or("-".into(), |c| format!("{c:.3}")),
                row.mean_ep_len
            );
        }
    }
    let last = res.table.aggregate().pop().expect("at least one point");
    println!(
        "final: overall {:.3} ± {:.3}, correction {} ({:.1} s)",
        last.overall_mean,
        last.overall_std,
        last.correction_mean.map_or("-".into(), |c| format!("{c:.3}")),
        start.elapsed().as_secs_f64()
    );

    // Weights of the word "blue" against each attribute.
    if let Some(params) = res.runs[0].params.as_ref() {
        let env = repairbench::env::Environment::new(cfg.env.clone())?;
        if let Some(id) = env.vocab().id("blue") {
            let row = &params.w[id as usize * repairbench::agents::ATTRIBUTE_FEATURES..][..repairbench::agents::ATTRIBUTE_FEATURES];
            println!("w[blue] = {:?}", row.iter().map(|w| (w * 100.0).round() / 100.0).collect::<Vec<_>>());
        }
    }
    Ok(())
}
