//! Swaps the built-in vocabulary for a lexicon file: extra shape
//! synonyms and a different rare color word, loaded through the episode
//! config.
//!
//! ```text
//! cargo run --example custom_lexicon
//! ```

use repairbench::agents::{rollout, Oracle};
use repairbench::config::EpisodeConfig;
use repairbench::env::Environment;
use repairbench::grammar::Lexicon;
use repairbench::{Color, Shape};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut lex = Lexicon::default();
    lex.shapes.insert(Shape::Cube, vec!["cube".into(), "dice".into(), "square".into()]);
    lex.rare_color_synonyms.insert(Color::Blue, "cerulean".into());

    let dir = std::env::temp_dir().join("repairbench_lexicon");
    std::fs::create_dir_all(&dir)?;
    let path = dir.join("lexicon.toml");
    std::fs::write(&path, lex.to_toml_string())?;
    println!("wrote {}", path.display());

    let cfg = EpisodeConfig {
        lexicon: Some(path),
        correction_probability: 1.0,
        ..EpisodeConfig::default()
    };
    let env = Environment::new(cfg)?;
    println!("vocabulary: {} ids, includes dice: {}", env.vocab().len(), env.vocab().id("dice").is_some());
    for seed in 0..8 {
        let mut ep = env.reset(seed)?;
        let out = rollout(&mut ep, &mut Oracle::new(), None)?;
        println!("{:<22} {:<55} success {}", format!("{:?}", out.kind), ep.goal().text(), out.success);
    }
    Ok(())
}
