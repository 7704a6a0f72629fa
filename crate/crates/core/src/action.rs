//! The shared action alphabet.
//!
//! Every game exposes a subset of this seven-token alphabet as its legal set;
//! genomes, tree edges, and traces all speak it. The declaration order is the
//! canonical order: indices into [`Action::ALL`] are stable and are what the
//! statistical tree uses to key its children.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[repr(u8)]
pub enum Action {
    Up,
    Down,
    Left,
    Right,
    Use,
    Nil,
    Escape,
}

impl Action {
    /// All actions in canonical order; `ALL[a.index()] == a`.
    pub const ALL: [Action; 7] = [
        Action::Up,
        Action::Down,
        Action::Left,
        Action::Right,
        Action::Use,
        Action::Nil,
        Action::Escape,
    ];

    pub const COUNT: usize = 7;

    #[inline]
    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Option<Action> {
        Action::ALL.get(i).copied()
    }

    pub fn name(self) -> &'static str {
        match self {
            Action::Up => "up",
            Action::Down => "down",
            Action::Left => "left",
            Action::Right => "right",
            Action::Use => "use",
            Action::Nil => "nil",
            Action::Escape => "escape",
        }
    }

    /// Grid displacement of a movement action; `(0, 0)` for the rest.
    /// `y` grows downward.
    #[inline]
    pub fn delta(self) -> (i16, i16) {
        match self {
            Action::Up => (0, -1),
            Action::Down => (0, 1),
            Action::Left => (-1, 0),
            Action::Right => (1, 0),
            _ => (0, 0),
        }
    }
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("unknown action name: {0:?}")]
pub struct ParseActionError(pub String);

impl FromStr for Action {
    type Err = ParseActionError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Action::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| ParseActionError(s.to_string()))
    }
}
