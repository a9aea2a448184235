use std::collections::BTreeSet;

use crate::attributes::{Color, Shape, Task};

use super::generate::{Beginning, Utterance};
use super::lexicon::{Lexicon, OBJECT_WORD};
use super::semantics::{ColorTerm, ObjectDescription, SemanticGoal};
use super::GrammarError;

/// Result of parsing an (optionally extended) instruction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParsedGoal {
    pub instruction: SemanticGoal,
    pub correction: Option<ParsedCorrection>,
    /// Instruction merged with the correction (equal to `instruction` when
    /// there is none).
    pub combined: SemanticGoal,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParsedCorrection {
    pub beginning: Beginning,
    pub fragment: ObjectDescription,
}

struct Cursor<'a> {
    tokens: &'a [String],
    pos: usize,
    lexicon: &'a Lexicon,
}

impl<'a> Cursor<'a> {
    fn peek(&self) -> Option<&'a str> {
        self.tokens.get(self.pos).map(String::as_str)
    }

    fn fail(&self, expected: &'static str) -> GrammarError {
        GrammarError::Parse {
            index: self.pos,
            token: self.peek().map(str::to_string),
            expected,
        }
    }

    fn article(&mut self) -> Result<(), GrammarError> {
        if self.peek() == Some(self.lexicon.article.as_str()) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.fail("article"))
        }
    }

    fn verb(&mut self) -> Result<Task, GrammarError> {
        let task = self.peek().and_then(|w| self.lexicon.task_of(w));
        match task {
            Some(t) => {
                self.pos += 1;
                Ok(t)
            }
            None => Err(self.fail("task verb")),
        }
    }

    fn color(&mut self) -> Option<ColorTerm> {
        let word = self.peek()?;
        let term = if let Some(c) = self.lexicon.color_of(word) {
            ColorTerm::Known(c)
        } else if self.lexicon.rare_color_of(word).is_some() {
            ColorTerm::Unknown
        } else {
            return None;
        };
        self.pos += 1;
        Some(term)
    }

    fn shape(&mut self) -> Option<Shape> {
        let s = self.peek().and_then(|w| self.lexicon.shape_of(w))?;
        self.pos += 1;
        Some(s)
    }

    /// `<OBJECT> ::= <COLOR> <SHAPE> | <SHAPE> | <COLOR> object`
    fn object(&mut self) -> Result<(Option<ColorTerm>, Option<Shape>), GrammarError> {
        if let Some(color) = self.color() {
            if let Some(shape) = self.shape() {
                return Ok((Some(color), Some(shape)));
            }
            if self.peek() == Some(OBJECT_WORD) {
                self.pos += 1;
                return Ok((Some(color), None));
            }
            return Err(self.fail("shape or \"object\""));
        }
        match self.shape() {
            Some(shape) => Ok((None, Some(shape))),
            None => Err(self.fail("color or shape")),
        }
    }

    fn beginning(&mut self) -> Result<Beginning, GrammarError> {
        let lex = self.lexicon;
        let word = self.peek().ok_or_else(|| self.fail("correction beginning"))?;
        if word == lex.negation_word {
            self.pos += 1;
            return Ok(Beginning::Negation);
        }
        if word == lex.edit_word {
            self.pos += 1;
            return Ok(Beginning::Edit);
        }
        // longest excuse phrase first
        let mut order: Vec<usize> = (0..lex.excuses.len()).collect();
        order.sort_by_key(|&i| std::cmp::Reverse(lex.excuses[i].split(' ').count()));
        for i in order {
            let parts = lex.excuse_tokens(i).unwrap_or_default();
            let end = self.pos + parts.len();
            if end <= self.tokens.len()
                && self.tokens[self.pos..end].iter().zip(&parts).all(|(t, p)| t == p)
            {
                self.pos = end;
                return Ok(Beginning::Excuse(i));
            }
        }
        Err(self.fail("correction beginning"))
    }
}

fn description(color: Option<ColorTerm>, shape: Option<Shape>) -> ObjectDescription {
    ObjectDescription {
        color,
        shape,
        ..Default::default()
    }
}

fn negated(color: Option<ColorTerm>, shape: Option<Shape>) -> ObjectDescription {
    // a negated rare synonym carries no usable information
    let not_colors: BTreeSet<Color> = match color {
        Some(ColorTerm::Known(c)) => BTreeSet::from([c]),
        _ => BTreeSet::new(),
    };
    ObjectDescription {
        color: None,
        shape: None,
        not_colors,
        not_shapes: shape.into_iter().collect(),
    }
}

/// Parses `<INSTRUCTION>` optionally followed by one `<CORRECTION>`.
///
/// A negated object with both a color and a shape ("not the red cube")
/// excludes each named attribute separately.
pub fn parse_utterance(utterance: &Utterance, lexicon: &Lexicon) -> Result<ParsedGoal, GrammarError> {
    let mut cur = Cursor {
        tokens: utterance.tokens(),
        pos: 0,
        lexicon,
    };
    let task = cur.verb()?;
    cur.article()?;
    let (color, shape) = cur.object()?;
    let instruction = SemanticGoal::new(task, description(color, shape));

    if cur.peek().is_none() {
        return Ok(ParsedGoal {
            combined: instruction.clone(),
            instruction,
            correction: None,
        });
    }

    let beginning = cur.beginning()?;
    cur.article()?;
    let (color, shape) = cur.object()?;
    if cur.peek().is_some() {
        return Err(cur.fail("end of utterance"));
    }
    let fragment = match beginning {
        Beginning::Negation => negated(color, shape),
        _ => description(color, shape),
    };
    let combined = instruction.with_correction(&fragment);
    Ok(ParsedGoal {
        instruction,
        correction: Some(ParsedCorrection { beginning, fragment }),
        combined,
    })
}
