use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::attributes::{Color, Shape, Task};

/// A color slot as understood by the listener. Rare synonyms outside the
/// common vocabulary are heard as `Unknown`, which matches any color.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ColorTerm {
    Known(Color),
    Unknown,
}

impl ColorTerm {
    pub fn admits(self, color: Color) -> bool {
        match self {
            ColorTerm::Known(c) => c == color,
            ColorTerm::Unknown => true,
        }
    }
}

/// Attribute constraints on a single object: the noun phrase of an
/// instruction, or a correction fragment.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ObjectDescription {
    pub color: Option<ColorTerm>,
    pub shape: Option<Shape>,
    pub not_colors: BTreeSet<Color>,
    pub not_shapes: BTreeSet<Shape>,
}

impl ObjectDescription {
    pub fn new(color: Option<Color>, shape: Option<Shape>) -> Self {
        ObjectDescription {
            color: color.map(ColorTerm::Known),
            shape,
            ..Default::default()
        }
    }

    pub fn color(color: Color) -> Self {
        Self::new(Some(color), None)
    }

    pub fn shape(shape: Shape) -> Self {
        Self::new(None, Some(shape))
    }

    pub fn color_shape(color: Color, shape: Shape) -> Self {
        Self::new(Some(color), Some(shape))
    }

    pub fn not_color(color: Color) -> Self {
        ObjectDescription {
            not_colors: BTreeSet::from([color]),
            ..Default::default()
        }
    }

    pub fn not_shape(shape: Shape) -> Self {
        ObjectDescription {
            not_shapes: BTreeSet::from([shape]),
            ..Default::default()
        }
    }

    pub fn has_affirmative(&self) -> bool {
        self.color.is_some() || self.shape.is_some()
    }

    pub fn has_negation(&self) -> bool {
        !self.not_colors.is_empty() || !self.not_shapes.is_empty()
    }

    pub fn is_empty(&self) -> bool {
        !self.has_affirmative() && !self.has_negation()
    }

    /// Well-formedness: something is constrained and no slot is both
    /// asserted and negated.
    pub fn is_well_formed(&self) -> bool {
        if self.is_empty() {
            return false;
        }
        if let Some(ColorTerm::Known(c)) = self.color {
            if self.not_colors.contains(&c) {
                return false;
            }
        }
        if let Some(s) = self.shape {
            if self.not_shapes.contains(&s) {
                return false;
            }
        }
        true
    }

    pub fn matches(&self, color: Color, shape: Shape) -> bool {
        self.color.is_none_or(|t| t.admits(color))
            && self.shape.is_none_or(|s| s == shape)
            && !self.not_colors.contains(&color)
            && !self.not_shapes.contains(&shape)
    }

    /// Combines an instruction with a correction fragment.
    ///
    /// Affirmative correction attributes replace the instruction's value in
    /// the same slot (or fill an empty/unknown slot); instruction attributes
    /// the correction does not touch are kept; negations accumulate and a
    /// negation that contradicts a kept affirmative drops that affirmative.
    pub fn merge(&self, correction: &ObjectDescription) -> ObjectDescription {
        let mut out = self.clone();
        if correction.color.is_some() {
            out.color = correction.color;
        }
        if correction.shape.is_some() {
            out.shape = correction.shape;
        }
        out.not_colors.extend(correction.not_colors.iter().copied());
        out.not_shapes.extend(correction.not_shapes.iter().copied());
        if let Some(ColorTerm::Known(c)) = out.color {
            if out.not_colors.contains(&c) {
                out.color = None;
            }
        }
        if let Some(s) = out.shape {
            if out.not_shapes.contains(&s) {
                out.shape = None;
            }
        }
        out
    }
}

impl fmt::Display for ObjectDescription {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        match self.color {
            Some(ColorTerm::Known(c)) => parts.push(c.name().to_string()),
            Some(ColorTerm::Unknown) => parts.push("?color".to_string()),
            None => {}
        }
        if let Some(s) = self.shape {
            parts.push(s.name().to_string());
        }
        for c in &self.not_colors {
            parts.push(format!("!{c}"));
        }
        for s in &self.not_shapes {
            parts.push(format!("!{s}"));
        }
        write!(f, "{}", parts.join(" & "))
    }
}

/// The meaning of an instruction: a task applied to a described object.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SemanticGoal {
    pub task: Task,
    pub object: ObjectDescription,
}

impl SemanticGoal {
    pub fn new(task: Task, object: ObjectDescription) -> Self {
        SemanticGoal { task, object }
    }

    pub fn with_correction(&self, correction: &ObjectDescription) -> SemanticGoal {
        SemanticGoal {
            task: self.task,
            object: self.object.merge(correction),
        }
    }
}

impl fmt::Display for SemanticGoal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({})", self.task, self.object)
    }
}
