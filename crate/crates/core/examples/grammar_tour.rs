//! Generates instructions and corrections, parses them back, merges the
//! correction into the goal and encodes the result as token ids.
//!
//! ```text
//! cargo run --example grammar_tour
//! ```

use repairbench::grammar::{
    extend_goal, generate_correction, generate_instruction, parse_utterance, Beginning, Lexicon, NounForm,
    ObjectDescription, SemanticGoal, SynonymChoice, Utterance, Vocabulary, MAX_GOAL_TOKENS,
};
use repairbench::{Color, Shape, Task};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let lex = Lexicon::default();
    let vocab = Vocabulary::from_lexicon(&lex);
    println!("vocabulary: {} ids, pad first", vocab.len());

    let goal = SemanticGoal::new(Task::Grasp, ObjectDescription::shape(Shape::Cube));
    for verb in 0..3 {
        let choice = SynonymChoice { verb, shape: verb, rare_color: false };
        let u = generate_instruction(&lex, &goal, NounForm::ShapeOnly, choice)?;
        println!("instruction: {}", u.text());
    }

    let instruction = generate_instruction(&lex, &goal, NounForm::ShapeOnly, SynonymChoice::default())?;
    let corrections = [
        (ObjectDescription::color_shape(Color::Green, Shape::Cube), Beginning::Edit, NounForm::ColorShape),
        (ObjectDescription::color(Color::Green), Beginning::Excuse(0), NounForm::ColorOnly),
        (ObjectDescription::not_color(Color::Red), Beginning::Negation, NounForm::ColorOnly),
    ];
    for (fragment, beginning, form) in corrections {
        let c = generate_correction(&lex, &fragment, beginning, form, SynonymChoice::default())?;
        let full = extend_goal(&instruction, &c);
        let parsed = parse_utterance(&full, &lex)?;
        println!("{:<40} -> {}", full.text(), parsed.combined);
        let ids = vocab.encode(&full, MAX_GOAL_TOKENS)?;
        println!("{:<40}    ids {ids:?}", "");
    }

    // A rare color word is heard as any color.
    let rare = Utterance::from_text("reach the azure cuboid");
    println!("{} -> {}", rare.text(), parse_utterance(&rare, &lex)?.combined);

    // Parse errors point at the first token that does not fit.
    match parse_utterance(&Utterance::from_text("reach a red cube"), &lex) {
        Err(e) => println!("error: {e}"),
        Ok(p) => println!("unexpected parse {}", p.combined),
    }
    Ok(())
}
