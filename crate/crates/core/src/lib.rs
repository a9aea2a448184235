//! Seedable tabletop environments for language-conditioned instruction
//! following, where a scripted instructor repairs misunderstandings by
//! extending the goal with an action correction.

pub mod attributes;
pub mod agents;
pub mod config;
pub mod env;
pub mod grammar;
pub mod harness;
pub mod instructor;
pub mod protocol;
pub mod world;

pub use attributes::{Color, Shape, Task};
