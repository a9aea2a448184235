use std::collections::BTreeMap;

use super::generate::Utterance;
use super::lexicon::Lexicon;
use super::GrammarError;

/// Fixed token budget of an encoded goal.
pub const MAX_GOAL_TOKENS: usize = 12;

pub const PAD_ID: u32 = 0;
pub const PAD_TOKEN: &str = "<pad>";

/// Lexicographically ordered word list; id 0 is padding.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Vocabulary {
    words: Vec<String>,
    ids: BTreeMap<String, u32>,
}

impl Vocabulary {
    pub fn from_lexicon(lexicon: &Lexicon) -> Self {
        let mut words = vec![PAD_TOKEN.to_string()];
        // BTreeSet iteration is already lexicographic
        words.extend(lexicon.all_words());
        let ids = words
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, w)| (w.clone(), i as u32))
            .collect();
        Vocabulary { words, ids }
    }

    /// Number of ids including padding.
    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.len() <= 1
    }

    pub fn words(&self) -> &[String] {
        &self.words
    }

    pub fn id(&self, word: &str) -> Option<u32> {
        self.ids.get(word).copied()
    }

    pub fn word(&self, id: u32) -> Option<&str> {
        if id == PAD_ID {
            return None;
        }
        self.words.get(id as usize).map(String::as_str)
    }

    /// Right-padded id sequence of length `max_len`.
    pub fn encode(&self, utterance: &Utterance, max_len: usize) -> Result<Vec<u32>, GrammarError> {
        if utterance.len() > max_len {
            return Err(GrammarError::Contract(format!(
                "utterance has {} tokens, limit is {max_len}",
                utterance.len()
            )));
        }
        let mut out = Vec::with_capacity(max_len);
        for tok in utterance.tokens() {
            out.push(self.id(tok).ok_or_else(|| GrammarError::UnknownToken(tok.clone()))?);
        }
        out.resize(max_len, PAD_ID);
        Ok(out)
    }

    pub fn decode(&self, ids: &[u32]) -> Result<Utterance, GrammarError> {
        let used = ids.iter().rposition(|&i| i != PAD_ID).map_or(0, |p| p + 1);
        let mut tokens = Vec::with_capacity(used);
        for &id in &ids[..used] {
            let word = self
                .word(id)
                .ok_or_else(|| GrammarError::UnknownToken(format!("#{id}")))?;
            tokens.push(word.to_string());
        }
        Ok(Utterance::new(tokens))
    }
}
