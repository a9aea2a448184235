//! Exhaustive enumeration of generator choices, checked against the
//! recognizer and the parser.

use repairbench::grammar::{
    extend_goal, generate_correction, generate_instruction, parse_utterance, Beginning, ColorTerm, Lexicon, NounForm,
    ObjectDescription, SemanticGoal, SynonymChoice, Utterance, Vocabulary, MAX_GOAL_TOKENS,
};
use repairbench::{Color, Shape, Task};

pub struct Instr {
    pub goal: SemanticGoal,
    pub utterance: Utterance,
}

pub struct Corr {
    pub fragment: ObjectDescription,
    pub utterance: Utterance,
}

pub fn all_instructions(lex: &Lexicon) -> Vec<Instr> {
    let mut out = Vec::new();
    for task in Task::ALL {
        for verb in 0..3 {
            for rare in [false, true] {
                for color in Color::ALL {
                    for shape in Shape::ALL {
                        for syn in 0..3 {
                            let choice = SynonymChoice { verb, shape: syn, rare_color: rare };
                            let obj = ObjectDescription::color_shape(color, shape);
                            let u = generate_instruction(lex, &SemanticGoal::new(task, obj), NounForm::ColorShape, choice)
                                .unwrap();
                            let mut expect = ObjectDescription::color_shape(color, shape);
                            if rare {
                                expect.color = Some(ColorTerm::Unknown);
                            }
                            out.push(Instr { goal: SemanticGoal::new(task, expect), utterance: u });
                        }
                    }
                    let u = generate_instruction(
                        lex,
                        &SemanticGoal::new(task, ObjectDescription::color(color)),
                        NounForm::ColorOnly,
                        SynonymChoice { verb, shape: 0, rare_color: rare },
                    )
                    .unwrap();
                    let mut expect = ObjectDescription::color(color);
                    if rare {
                        expect.color = Some(ColorTerm::Unknown);
                    }
                    out.push(Instr { goal: SemanticGoal::new(task, expect), utterance: u });
                }
                if rare {
                    continue;
                }
                for shape in Shape::ALL {
                    for syn in 0..3 {
                        let goal = SemanticGoal::new(task, ObjectDescription::shape(shape));
                        let choice = SynonymChoice { verb, shape: syn, rare_color: false };
                        let u = generate_instruction(lex, &goal, NounForm::ShapeOnly, choice).unwrap();
                        out.push(Instr { goal, utterance: u });
                    }
                }
            }
        }
    }
    out
}

pub fn all_corrections(lex: &Lexicon) -> Vec<Corr> {
    let mut out = Vec::new();
    let mut beginnings: Vec<Beginning> = (0..lex.excuses.len()).map(Beginning::Excuse).collect();
    beginnings.push(Beginning::Edit);
    let mut affirmative = Vec::new();
    let mut negative = Vec::new();
    for c in Color::ALL {
        affirmative.push((ObjectDescription::color(c), NounForm::ColorOnly, 0));
        negative.push((ObjectDescription::not_color(c), NounForm::ColorOnly, 0));
        for s in Shape::ALL {
            for syn in 0..3 {
                affirmative.push((ObjectDescription::color_shape(c, s), NounForm::ColorShape, syn));
                let both = ObjectDescription::not_color(c).merge(&ObjectDescription::not_shape(s));
                negative.push((both, NounForm::ColorShape, syn));
            }
        }
    }
    for s in Shape::ALL {
        for syn in 0..3 {
            affirmative.push((ObjectDescription::shape(s), NounForm::ShapeOnly, syn));
            negative.push((ObjectDescription::not_shape(s), NounForm::ShapeOnly, syn));
        }
    }
    for b in beginnings {
        for (frag, form, syn) in &affirmative {
            let choice = SynonymChoice { verb: 0, shape: *syn, rare_color: false };
            let u = generate_correction(lex, frag, b, *form, choice).unwrap();
            out.push(Corr { fragment: frag.clone(), utterance: u });
        }
    }
    for (frag, form, syn) in negative {
        let choice = SynonymChoice { verb: 0, shape: syn, rare_color: false };
        let u = generate_correction(lex, &frag, Beginning::Negation, form, choice).unwrap();
        out.push(Corr { fragment: frag, utterance: u });
    }
    out
}

pub fn tokens(u: &Utterance) -> Vec<&str> {
    u.tokens().iter().map(String::as_str).collect()
}

pub struct Soundness {
    pub instructions: usize,
    pub corrections: usize,
    pub extended: usize,
    pub failures: usize,
    pub longest: usize,
}

/// Every instruction, every correction, and every instruction extended by
/// every correction: recognized, parsed back to its semantics, and
/// round-tripped through token ids.
pub fn soundness() -> Soundness {
    let lex = Lexicon::default();
    let vocab = Vocabulary::from_lexicon(&lex);
    let instructions = all_instructions(&lex);
    let corrections = all_corrections(&lex);

    let mut failures = 0usize;
    let mut longest = 0;
    for i in &instructions {
        let t = tokens(&i.utterance);
        failures += usize::from(!super::instruction(&t));
        let p = parse_utterance(&i.utterance, &lex).unwrap();
        failures += usize::from(p.instruction != i.goal || p.correction.is_some() || p.combined != i.goal);
    }
    for c in &corrections {
        failures += usize::from(!super::correction(&tokens(&c.utterance)));
    }
    for i in &instructions {
        for c in &corrections {
            let u = extend_goal(&i.utterance, &c.utterance);
            longest = longest.max(u.len());
            if !super::extended(&tokens(&u)) {
                failures += 1;
                continue;
            }
            match parse_utterance(&u, &lex) {
                Ok(p) => {
                    let frag_ok = p.correction.as_ref().map(|pc| &pc.fragment) == Some(&c.fragment);
                    let combined = i.goal.with_correction(&c.fragment);
                    failures += usize::from(p.instruction != i.goal || !frag_ok || p.combined != combined);
                }
                Err(_) => failures += 1,
            }
            if vocab.encode(&u, MAX_GOAL_TOKENS).map(|ids| vocab.decode(&ids)).ok() != Some(Ok(u.clone())) {
                failures += 1;
            }
        }
    }
    Soundness {
        instructions: instructions.len(),
        corrections: corrections.len(),
        extended: instructions.len() * corrections.len(),
        failures,
        longest,
    }
}
