//! Instruction and correction grammars.
//!
//! ```text
//! <EXTENDED> ::= <INSTRUCTION> <CORRECTION>
//! <INSTRUCTION> ::= <TASKVERB> <ARTICLE> <OBJECT>
//! <CORRECTION> ::= <BEGINNING> <ARTICLE> <OBJECT>
//! <OBJECT> ::= <COLOR> <SHAPE> | <SHAPE> | <COLOR> object
//! <BEGINNING> ::= <EXCUSE> | <NEGATION> | <EDIT>
//! ```
//!
//! Terminals come from a [`Lexicon`]. Utterances are comma-free lowercase
//! token lists.

mod generate;
mod lexicon;
mod parse;
mod semantics;
mod vocab;

use thiserror::Error;

pub use generate::{
    extend_goal, form_for, generate_correction, generate_instruction, negation_form_for, Beginning,
    NounForm, SynonymChoice, Utterance,
};
pub use lexicon::{Lexicon, OBJECT_WORD};
pub use parse::{parse_utterance, ParsedCorrection, ParsedGoal};
pub use semantics::{ColorTerm, ObjectDescription, SemanticGoal};
pub use vocab::{Vocabulary, MAX_GOAL_TOKENS, PAD_ID, PAD_TOKEN};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GrammarError {
    #[error("contract violation: {0}")]
    Contract(String),
    #[error("parse error at token {index} ({}): expected {expected}", token.as_deref().unwrap_or("end of input"))]
    Parse {
        index: usize,
        token: Option<String>,
        expected: &'static str,
    },
    #[error("token {0:?} is not in the vocabulary")]
    UnknownToken(String),
    #[error("invalid lexicon: {0}")]
    Lexicon(String),
}
