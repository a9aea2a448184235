use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::attributes::{Color, Shape, Task};

use super::GrammarError;

/// Every terminal of the instruction and correction grammars.
///
/// The default lexicon is compiled in; a TOML file with the same keys can
/// replace it (see [`Lexicon::from_toml_str`]).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Lexicon {
    pub colors: Vec<String>,
    pub shapes: BTreeMap<Shape, Vec<String>>,
    pub task_verbs: BTreeMap<Task, Vec<String>>,
    pub excuses: Vec<String>,
    pub negation_word: String,
    pub edit_word: String,
    pub rare_color_synonyms: BTreeMap<Color, String>,
    pub article: String,
}

/// Literal closing the `<COLOR> object` production.
pub const OBJECT_WORD: &str = "object";

fn words(list: &[&str]) -> Vec<String> {
    list.iter().map(|w| w.to_string()).collect()
}

impl Default for Lexicon {
    fn default() -> Self {
        let shapes = BTreeMap::from([
            (Shape::Cube, words(&["cube", "box", "block"])),
            (Shape::Cuboid, words(&["cuboid", "brick", "oblong"])),
            (Shape::Cylinder, words(&["cylinder", "barrel", "tophat"])),
        ]);
        let task_verbs = BTreeMap::from([
            (Task::Reach, words(&["reach", "touch", "contact"])),
            (Task::Push, words(&["push", "move", "shift"])),
            (Task::Grasp, words(&["grasp", "grip", "take"])),
            (Task::Lift, words(&["lift", "raise", "hoist"])),
        ]);
        let rare_color_synonyms = BTreeMap::from([
            (Color::Red, "crimson".to_string()),
            (Color::Green, "emerald".to_string()),
            (Color::Blue, "azure".to_string()),
            (Color::Yellow, "amber".to_string()),
            (Color::Purple, "violet".to_string()),
            (Color::Orange, "tangerine".to_string()),
            (Color::Pink, "rose".to_string()),
            (Color::Cyan, "teal".to_string()),
            (Color::Brown, "chestnut".to_string()),
        ]);
        Lexicon {
            colors: Color::ALL.iter().map(|c| c.name().to_string()).collect(),
            shapes,
            task_verbs,
            excuses: words(&["sorry", "excuse me", "no i meant", "pardon"]),
            negation_word: "not".into(),
            edit_word: "actually".into(),
            rare_color_synonyms,
            article: "the".into(),
        }
    }
}

fn is_word(w: &str) -> bool {
    !w.is_empty() && w.chars().all(|c| c.is_ascii_lowercase())
}

impl Lexicon {
    pub fn from_toml_str(text: &str) -> Result<Self, GrammarError> {
        let lex: Lexicon =
            toml::from_str(text).map_err(|e| GrammarError::Lexicon(e.to_string()))?;
        lex.validate()?;
        Ok(lex)
    }

    pub fn load(path: &Path) -> Result<Self, GrammarError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| GrammarError::Lexicon(format!("{}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("lexicon serializes")
    }

    /// Checks the structural invariants: the nine canonical colors in order,
    /// non-empty synonym lists for every shape and task, single lowercase
    /// words everywhere except multi-word excuses, and no word serving two
    /// roles.
    pub fn validate(&self) -> Result<(), GrammarError> {
        let bad = |msg: String| Err(GrammarError::Lexicon(msg));
        let canonical: Vec<&str> = Color::ALL.iter().map(|c| c.name()).collect();
        if self.colors.iter().map(String::as_str).ne(canonical.iter().copied()) {
            return bad(format!("colors must be exactly {canonical:?}"));
        }
        for shape in Shape::ALL {
            match self.shapes.get(&shape) {
                Some(list) if !list.is_empty() => {}
                _ => return bad(format!("shapes.{shape} needs at least one synonym")),
            }
        }
        for task in Task::ALL {
            match self.task_verbs.get(&task) {
                Some(list) if !list.is_empty() => {}
                _ => return bad(format!("task_verbs.{task} needs at least one verb")),
            }
        }
        for color in Color::ALL {
            if !self.rare_color_synonyms.contains_key(&color) {
                return bad(format!("rare_color_synonyms.{color} is missing"));
            }
        }
        if self.excuses.is_empty() {
            return bad("excuses must not be empty".into());
        }

        // role-tagged single words; excuse constituents may repeat among excuses
        let mut owner: BTreeMap<String, &'static str> = BTreeMap::new();
        let mut claim = |word: &str, role: &'static str| -> Result<(), GrammarError> {
            if !is_word(word) {
                return bad(format!("{role}: {word:?} is not a single lowercase word"));
            }
            match owner.insert(word.to_string(), role) {
                Some(prev) if prev != role || role != "excuses" => {
                    bad(format!("word {word:?} used by both {prev} and {role}"))
                }
                _ => Ok(()),
            }
        };
        for c in &self.colors {
            claim(c, "colors")?;
        }
        for list in self.shapes.values() {
            for w in list {
                claim(w, "shapes")?;
            }
        }
        for list in self.task_verbs.values() {
            for w in list {
                claim(w, "task_verbs")?;
            }
        }
        for w in self.rare_color_synonyms.values() {
            claim(w, "rare_color_synonyms")?;
        }
        claim(&self.negation_word, "negation_word")?;
        claim(&self.edit_word, "edit_word")?;
        claim(&self.article, "article")?;
        claim(OBJECT_WORD, "object")?;
        let mut seen_excuse_words = BTreeSet::new();
        for excuse in &self.excuses {
            let parts: Vec<&str> = excuse.split(' ').collect();
            for part in parts {
                if seen_excuse_words.insert(part) {
                    claim(part, "excuses")?;
                }
            }
        }
        Ok(())
    }

    pub fn color_word(&self, color: Color) -> &str {
        &self.colors[color.index()]
    }

    pub fn shape_synonyms(&self, shape: Shape) -> &[String] {
        &self.shapes[&shape]
    }

    pub fn verbs(&self, task: Task) -> &[String] {
        &self.task_verbs[&task]
    }

    pub fn rare_synonym(&self, color: Color) -> &str {
        &self.rare_color_synonyms[&color]
    }

    pub fn excuse_tokens(&self, index: usize) -> Option<Vec<&str>> {
        self.excuses.get(index).map(|e| e.split(' ').collect())
    }

    pub fn color_of(&self, word: &str) -> Option<Color> {
        Color::ALL.into_iter().find(|&c| self.color_word(c) == word)
    }

    pub fn rare_color_of(&self, word: &str) -> Option<Color> {
        self.rare_color_synonyms
            .iter()
            .find(|(_, w)| w.as_str() == word)
            .map(|(c, _)| *c)
    }

    pub fn shape_of(&self, word: &str) -> Option<Shape> {
        Shape::ALL
            .into_iter()
            .find(|&s| self.shape_synonyms(s).iter().any(|w| w == word))
    }

    pub fn task_of(&self, word: &str) -> Option<Task> {
        Task::ALL
            .into_iter()
            .find(|&t| self.verbs(t).iter().any(|w| w == word))
    }

    /// Every distinct single word the grammars can emit, including the
    /// literal `object`, in no particular order.
    pub fn all_words(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        out.extend(self.colors.iter().cloned());
        out.extend(self.shapes.values().flatten().cloned());
        out.extend(self.task_verbs.values().flatten().cloned());
        out.extend(self.rare_color_synonyms.values().cloned());
        for e in &self.excuses {
            out.extend(e.split(' ').map(str::to_string));
        }
        out.insert(self.negation_word.clone());
        out.insert(self.edit_word.clone());
        out.insert(self.article.clone());
        out.insert(OBJECT_WORD.to_string());
        out
    }
}
