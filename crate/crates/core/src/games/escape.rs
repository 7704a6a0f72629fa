//! d-escape: reach an exit cell before the tick limit.
//!
//! Pure navigation with a sparse reward: the only score is +1 for stepping
//! onto an exit, which also wins the episode. Timing out loses.

use crate::action::Action;
use crate::outcome::Status;

use super::GameState;

pub(super) fn step(s: &mut GameState, action: Action) {
    s.move_avatar(action);
    if s.level.exits.contains(&s.avatar) {
        s.score += 1.0;
        s.status = Status::Win;
    }
}
