//! Episode status and outcome snapshots.

use std::fmt;

/// Whether an episode is still running, and how it ended if not.
/// Terminal states are absorbing: a finished game rejects further advances.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Status {
    Ongoing,
    Win,
    Loss,
}

impl Status {
    pub fn is_terminal(self) -> bool {
        !matches!(self, Status::Ongoing)
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Ongoing => "ongoing",
            Status::Win => "win",
            Status::Loss => "loss",
        })
    }
}

/// A snapshot of where an episode stands: status, accumulated score, and the
/// tick at which the snapshot was taken.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GameOutcome {
    pub status: Status,
    pub score: f64,
    pub tick: u32,
}
