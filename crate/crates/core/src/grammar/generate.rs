use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::attributes::{Color, Shape};

use super::lexicon::{Lexicon, OBJECT_WORD};
use super::semantics::{ColorTerm, ObjectDescription, SemanticGoal};
use super::GrammarError;

/// A lowercase, punctuation-free token sequence.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Utterance {
    tokens: Vec<String>,
}

impl Utterance {
    pub fn new(tokens: Vec<String>) -> Self {
        Utterance { tokens }
    }

    /// Tokenizes free text: lowercases, drops ASCII punctuation, splits on
    /// whitespace.
    pub fn from_text(text: &str) -> Self {
        let cleaned: String = text
            .chars()
            .map(|c| if c.is_ascii_punctuation() { ' ' } else { c.to_ascii_lowercase() })
            .collect();
        Utterance {
            tokens: cleaned.split_whitespace().map(str::to_string).collect(),
        }
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn text(&self) -> String {
        self.tokens.join(" ")
    }
}

impl fmt::Display for Utterance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.text())
    }
}

/// Which `<OBJECT>` production renders a noun phrase.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NounForm {
    ColorShape,
    ShapeOnly,
    ColorOnly,
}

impl NounForm {
    pub const ALL: [NounForm; 3] = [NounForm::ColorShape, NounForm::ShapeOnly, NounForm::ColorOnly];
}

/// `<BEGINNING>` of a correction. `Excuse` indexes [`Lexicon::excuses`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Beginning {
    Excuse(usize),
    Negation,
    Edit,
}

/// Synonym picks for one utterance. Indices must be in range for the lexicon.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SynonymChoice {
    pub verb: usize,
    pub shape: usize,
    /// Render the color with its rare synonym instead of the common word.
    pub rare_color: bool,
}

impl SynonymChoice {
    /// Uniform synonym picks (common color word).
    pub fn random<R: Rng + ?Sized>(lexicon: &Lexicon, goal_task: crate::Task, shape: Option<Shape>, rng: &mut R) -> Self {
        let verb = rng.gen_range(0..lexicon.verbs(goal_task).len());
        let shape = match shape {
            Some(s) => rng.gen_range(0..lexicon.shape_synonyms(s).len()),
            None => 0,
        };
        SynonymChoice { verb, shape, rare_color: false }
    }
}

fn color_token(lexicon: &Lexicon, color: Color, rare: bool) -> String {
    if rare {
        lexicon.rare_synonym(color).to_string()
    } else {
        lexicon.color_word(color).to_string()
    }
}

fn shape_token(lexicon: &Lexicon, shape: Shape, index: usize) -> Result<String, GrammarError> {
    lexicon
        .shape_synonyms(shape)
        .get(index)
        .cloned()
        .ok_or_else(|| GrammarError::Contract(format!("shape synonym index {index} out of range for {shape}")))
}

fn known_color(term: Option<ColorTerm>) -> Result<Option<Color>, GrammarError> {
    match term {
        None => Ok(None),
        Some(ColorTerm::Known(c)) => Ok(Some(c)),
        Some(ColorTerm::Unknown) => Err(GrammarError::Contract(
            "an unknown color has no surface form".into(),
        )),
    }
}

/// Renders `<OBJECT>` for the given attribute values.
fn object_tokens(
    lexicon: &Lexicon,
    color: Option<Color>,
    shape: Option<Shape>,
    form: NounForm,
    choice: SynonymChoice,
) -> Result<Vec<String>, GrammarError> {
    match (form, color, shape) {
        (NounForm::ColorShape, Some(c), Some(s)) => Ok(vec![
            color_token(lexicon, c, choice.rare_color),
            shape_token(lexicon, s, choice.shape)?,
        ]),
        (NounForm::ShapeOnly, None, Some(s)) => Ok(vec![shape_token(lexicon, s, choice.shape)?]),
        (NounForm::ColorOnly, Some(c), None) => Ok(vec![
            color_token(lexicon, c, choice.rare_color),
            OBJECT_WORD.to_string(),
        ]),
        _ => Err(GrammarError::Contract(format!(
            "noun form {form:?} does not fit color={color:?} shape={shape:?}"
        ))),
    }
}

/// `<INSTRUCTION> ::= <TASKVERB> <ARTICLE> <OBJECT>`
pub fn generate_instruction(
    lexicon: &Lexicon,
    goal: &SemanticGoal,
    form: NounForm,
    choice: SynonymChoice,
) -> Result<Utterance, GrammarError> {
    if goal.object.has_negation() {
        return Err(GrammarError::Contract("instructions cannot carry negations".into()));
    }
    let verb = lexicon
        .verbs(goal.task)
        .get(choice.verb)
        .cloned()
        .ok_or_else(|| GrammarError::Contract(format!("verb index {} out of range", choice.verb)))?;
    let color = known_color(goal.object.color)?;
    let mut tokens = vec![verb, lexicon.article.clone()];
    tokens.extend(object_tokens(lexicon, color, goal.object.shape, form, choice)?);
    Ok(Utterance::new(tokens))
}

/// `<CORRECTION> ::= <BEGINNING> <ARTICLE> <OBJECT>`
///
/// With `Beginning::Negation` the rendered object is built from the
/// fragment's negated attributes, one per slot; otherwise from its
/// affirmative ones.
pub fn generate_correction(
    lexicon: &Lexicon,
    fragment: &ObjectDescription,
    beginning: Beginning,
    form: NounForm,
    choice: SynonymChoice,
) -> Result<Utterance, GrammarError> {
    if fragment.is_empty() {
        return Err(GrammarError::Contract("empty correction fragment".into()));
    }
    let (color, shape) = match beginning {
        Beginning::Negation => {
            if fragment.has_affirmative() {
                return Err(GrammarError::Contract(
                    "a negation correction cannot assert attributes".into(),
                ));
            }
            if fragment.not_colors.len() > 1 || fragment.not_shapes.len() > 1 {
                return Err(GrammarError::Contract(
                    "a negation names at most one color and one shape".into(),
                ));
            }
            (
                fragment.not_colors.iter().next().copied(),
                fragment.not_shapes.iter().next().copied(),
            )
        }
        Beginning::Excuse(_) | Beginning::Edit => {
            if fragment.has_negation() {
                return Err(GrammarError::Contract(
                    "negated attributes need the negation beginning".into(),
                ));
            }
            (known_color(fragment.color)?, fragment.shape)
        }
    };
    let mut tokens: Vec<String> = match beginning {
        Beginning::Excuse(i) => lexicon
            .excuse_tokens(i)
            .ok_or_else(|| GrammarError::Contract(format!("excuse index {i} out of range")))?
            .into_iter()
            .map(str::to_string)
            .collect(),
        Beginning::Negation => vec![lexicon.negation_word.clone()],
        Beginning::Edit => vec![lexicon.edit_word.clone()],
    };
    tokens.push(lexicon.article.clone());
    tokens.extend(object_tokens(lexicon, color, shape, form, choice)?);
    Ok(Utterance::new(tokens))
}

/// `g ∘ correction`: plain token concatenation.
pub fn extend_goal(goal: &Utterance, correction: &Utterance) -> Utterance {
    let mut tokens = goal.tokens.clone();
    tokens.extend(correction.tokens.iter().cloned());
    Utterance::new(tokens)
}

/// The noun form that renders exactly the affirmative slots of `desc`.
pub fn form_for(desc: &ObjectDescription) -> Option<NounForm> {
    match (desc.color.is_some(), desc.shape.is_some()) {
        (true, true) => Some(NounForm::ColorShape),
        (false, true) => Some(NounForm::ShapeOnly),
        (true, false) => Some(NounForm::ColorOnly),
        (false, false) => None,
    }
}

/// The noun form that renders the negated slots of `desc`.
pub fn negation_form_for(desc: &ObjectDescription) -> Option<NounForm> {
    match (!desc.not_colors.is_empty(), !desc.not_shapes.is_empty()) {
        (true, true) => Some(NounForm::ColorShape),
        (false, true) => Some(NounForm::ShapeOnly),
        (true, false) => Some(NounForm::ColorOnly),
        (false, false) => None,
    }
}
