//! Closed attribute sets shared by the grammar, the simulator and the agents.

use std::fmt;

use serde::{Deserialize, Serialize};

/// The four manipulation tasks.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Task {
    Reach,
    Push,
    Grasp,
    Lift,
}

impl Task {
    pub const ALL: [Task; 4] = [Task::Reach, Task::Push, Task::Grasp, Task::Lift];

    pub fn name(self) -> &'static str {
        match self {
            Task::Reach => "reach",
            Task::Push => "push",
            Task::Grasp => "grasp",
            Task::Lift => "lift",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Color {
    Red,
    Green,
    Blue,
    Yellow,
    Purple,
    Orange,
    Pink,
    Cyan,
    Brown,
}

impl Color {
    pub const ALL: [Color; 9] = [
        Color::Red,
        Color::Green,
        Color::Blue,
        Color::Yellow,
        Color::Purple,
        Color::Orange,
        Color::Pink,
        Color::Cyan,
        Color::Brown,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Color::Red => "red",
            Color::Green => "green",
            Color::Blue => "blue",
            Color::Yellow => "yellow",
            Color::Purple => "purple",
            Color::Orange => "orange",
            Color::Pink => "pink",
            Color::Cyan => "cyan",
            Color::Brown => "brown",
        }
    }

    /// Position in [`Color::ALL`], used for one-hot encodings.
    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_name(word: &str) -> Option<Color> {
        Color::ALL.into_iter().find(|c| c.name() == word)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Shape {
    Cube,
    Cuboid,
    Cylinder,
}

impl Shape {
    pub const ALL: [Shape; 3] = [Shape::Cube, Shape::Cuboid, Shape::Cylinder];

    pub fn name(self) -> &'static str {
        match self {
            Shape::Cube => "cube",
            Shape::Cuboid => "cuboid",
            Shape::Cylinder => "cylinder",
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

macro_rules! display_by_name {
    ($($t:ty),*) => {$(
        impl fmt::Display for $t {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.name())
            }
        }
    )*};
}

display_by_name!(Task, Color, Shape);
