//! d-missiles: intercept falling missiles before they level the cities.
//!
//! Missiles descend one cell every `missile-period` ticks. A missile entering
//! a city cell destroys both; one entering a wall (the floor) fizzles. `Use`
//! detonates every missile orthogonally adjacent to the avatar for +2 each.
//! Losing all cities loses; clearing the sky with a city still standing wins.
//! Missiles pass straight through the avatar.

use crate::action::Action;
use crate::outcome::Status;

use super::GameState;

pub(super) fn step(s: &mut GameState, action: Action) {
    s.move_avatar(action);
    if action == Action::Use {
        let avatar = s.avatar;
        let before = s.missiles.len();
        s.missiles.retain(|m| m.manhattan(avatar) != 1);
        s.score += 2.0 * (before - s.missiles.len()) as f64;
    }
    if s.tick % s.level.missile_period == 0 {
        let mut i = 0;
        while i < s.missiles.len() {
            let target = super::Pos::new(s.missiles[i].x, s.missiles[i].y + 1);
            if let Some(c) = s.cities.iter().position(|&c| c == target) {
                s.cities.remove(c);
                s.missiles.remove(i);
            } else if s.is_wall(target.x, target.y) {
                s.missiles.remove(i);
            } else {
                s.missiles[i] = target;
                i += 1;
            }
        }
    }
    if s.cities.is_empty() {
        s.status = Status::Loss;
    } else if s.missiles.is_empty() {
        s.status = Status::Win;
    }
}

#[cfg(test)]
mod tests {
    use crate::action::Action;
    use crate::games::{load_level, GameId, Pos};
    use crate::outcome::Status;

    // Missile over the city in column 3; avatar beside the flight path.
    const LEVEL: &str = "\
#max-ticks=30
#missile-period=2
wwwwwww
w..m..w
w.....w
w.A...w
w.....w
w..c..w
wwwwwww
";

    #[test]
    fn unopposed_missile_destroys_city_and_loses() {
        let mut s = load_level(LEVEL, GameId::Missiles).unwrap();
        // Falls on ticks 2, 4, 6, 8: y = 2, 3, 4, then the city row.
        for _ in 0..7 {
            s.advance(Action::Nil).unwrap();
            assert_eq!(s.status(), Status::Ongoing);
        }
        s.advance(Action::Nil).unwrap();
        assert_eq!(s.status(), Status::Loss);
        assert!(s.cities().is_empty());
        assert!(s.missiles().is_empty());
        assert_eq!(s.score(), 0.0);
    }

    #[test]
    fn use_destroys_adjacent_missile_and_wins() {
        let mut s = load_level(LEVEL, GameId::Missiles).unwrap();
        // Missile reaches (3,3) on tick 4; the avatar walks to (2,3),
        // which is orthogonally adjacent, and fires.
        s.advance(Action::Nil).unwrap();
        s.advance(Action::Nil).unwrap();
        assert_eq!(s.missiles(), &[Pos::new(3, 2)]);
        s.advance(Action::Nil).unwrap();
        s.advance(Action::Nil).unwrap();
        assert_eq!(s.missiles(), &[Pos::new(3, 3)]);
        assert_eq!(s.avatar(), Pos::new(2, 3));
        s.advance(Action::Use).unwrap();
        assert_eq!(s.status(), Status::Win);
        assert_eq!(s.score(), 2.0);
        assert_eq!(s.cities().len(), 1);
    }

    #[test]
    fn use_with_nothing_adjacent_scores_nothing() {
        let mut s = load_level(LEVEL, GameId::Missiles).unwrap();
        s.advance(Action::Use).unwrap();
        assert_eq!(s.score(), 0.0);
        assert_eq!(s.missiles().len(), 1);
    }

    #[test]
    fn diagonal_is_not_adjacent() {
        let mut s = load_level(LEVEL, GameId::Missiles).unwrap();
        // Tick 1: move up to (2,2); missile still at (3,1) — diagonal.
        s.advance(Action::Up).unwrap();
        assert_eq!(s.avatar(), Pos::new(2, 2));
        assert_eq!(s.missiles(), &[Pos::new(3, 1)]);
        s.advance(Action::Use).unwrap();
        // Tick 2 also moved the missile to (3,2): adjacency is evaluated
        // before the fall, so the diagonal miss stands.
        assert_eq!(s.score(), 0.0);
        assert_eq!(s.missiles(), &[Pos::new(3, 2)]);
    }

    #[test]
    fn missile_without_city_below_fizzles_on_floor() {
        let level = "\
#max-ticks=30
#missile-period=1
wwwwww
w.m..w
w....w
wA..cw
wwwwww
";
        let mut s = load_level(level, GameId::Missiles).unwrap();
        s.advance(Action::Nil).unwrap();
        assert_eq!(s.missiles(), &[Pos::new(2, 2)]);
        s.advance(Action::Nil).unwrap();
        assert_eq!(s.missiles(), &[Pos::new(2, 3)]);
        s.advance(Action::Nil).unwrap();
        // Floor wall absorbs the missile; the city elsewhere survives → win.
        assert!(s.missiles().is_empty());
        assert_eq!(s.cities().len(), 1);
        assert_eq!(s.status(), Status::Win);
    }

    #[test]
    fn missile_passes_through_avatar() {
        let level = "\
#max-ticks=30
#missile-period=1
wwwwww
w.m..w
w....w
w.A.cw
wwwwww
";
        let mut s = load_level(level, GameId::Missiles).unwrap();
        s.advance(Action::Nil).unwrap();
        s.advance(Action::Nil).unwrap();
        // Missile now shares the avatar's cell; nothing happened to either.
        assert_eq!(s.missiles(), &[Pos::new(2, 3)]);
        assert_eq!(s.avatar(), Pos::new(2, 3));
        assert_eq!(s.status(), Status::Ongoing);
    }

    #[test]
    fn score_deltas_come_in_twos() {
        let mut s = load_level(LEVEL, GameId::Missiles).unwrap();
        let mut prev = s.score();
        let acts = [Action::Nil, Action::Nil, Action::Nil, Action::Nil, Action::Use];
        for a in acts {
            s.advance(a).unwrap();
            let d = s.score() - prev;
            assert!(d == 0.0 || d == 2.0, "unexpected delta {d}");
            prev = s.score();
        }
    }
}
