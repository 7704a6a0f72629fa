//! d-race: beat a scripted rival to the rightmost column.
//!
//! The avatar moves freely; the rival advances one cell right every
//! `racer-period` ticks along its own lane. Reaching the goal column wins,
//! the rival getting there first (or the clock running out) loses. Score is
//! +1 each time the avatar pushes its furthest-right column — progress made
//! by re-walking old ground pays nothing, so the reward is dense but
//! un-farmable.

use crate::action::Action;
use crate::outcome::Status;

use super::GameState;

pub(super) fn step(s: &mut GameState, action: Action) {
    s.move_avatar(action);
    if s.avatar.x > s.best_x {
        s.best_x = s.avatar.x;
        s.score += 1.0;
    }
    if s.avatar.x >= s.level.goal_x {
        s.status = Status::Win;
        return;
    }
    if s.tick % s.level.racer_period == 0 && !s.is_wall(s.racer.x + 1, s.racer.y) {
        s.racer.x += 1;
    }
    if s.racer.x >= s.level.goal_x {
        s.status = Status::Loss;
    }
}

#[cfg(test)]
mod tests {
    use crate::action::Action;
    use crate::games::{load_level, GameId};
    use crate::outcome::Status;

    const LEVEL: &str = "\
#max-ticks=40
#racer-period=2
wwwwwwww
wA.....w
wwwwwwww
wr.....w
wwwwwwww
";

    #[test]
    fn sprinting_right_wins() {
        let mut s = load_level(LEVEL, GameId::Race).unwrap();
        for _ in 0..5 {
            s.advance(Action::Right).unwrap();
        }
        assert_eq!(s.status(), Status::Win);
        assert_eq!(s.score(), 5.0);
    }

    #[test]
    fn idling_lets_the_rival_win() {
        let mut s = load_level(LEVEL, GameId::Race).unwrap();
        let mut ticks = 0;
        while s.status() == Status::Ongoing {
            s.advance(Action::Nil).unwrap();
            ticks += 1;
        }
        assert_eq!(s.status(), Status::Loss);
        // Rival starts at x=1, needs 5 moves to reach x=6, moving on even
        // ticks: arrives at tick 10.
        assert_eq!(ticks, 10);
        assert_eq!(s.score(), 0.0);
    }

    #[test]
    fn backtracking_earns_nothing() {
        let mut s = load_level(LEVEL, GameId::Race).unwrap();
        s.advance(Action::Right).unwrap();
        assert_eq!(s.score(), 1.0);
        s.advance(Action::Left).unwrap();
        assert_eq!(s.score(), 1.0);
        s.advance(Action::Right).unwrap();
        assert_eq!(s.score(), 1.0, "re-reaching old best pays nothing");
        s.advance(Action::Right).unwrap();
        assert_eq!(s.score(), 2.0);
    }

    #[test]
    fn avatar_checked_before_rival_on_same_tick() {
        // Period 1: rival moves every tick, same speed as the avatar. Both
        // start one column from the left, so a perfect sprint is a dead heat
        // at the goal — resolved for the avatar.
        let level = "\
#max-ticks=40
#racer-period=1
wwwwwwww
wA.....w
wwwwwwww
wr.....w
wwwwwwww
";
        let mut s = load_level(level, GameId::Race).unwrap();
        for _ in 0..5 {
            s.advance(Action::Right).unwrap();
        }
        assert_eq!(s.status(), Status::Win);
    }
}
