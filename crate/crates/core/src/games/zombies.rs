//! s-zombies: survive the horde until the clock runs out.
//!
//! Each zombie, each tick, steps toward the avatar with probability `beta`
//! (along the axis of larger separation, coin-flipping exact diagonals) and
//! uniformly at random otherwise; walls block, blocked zombies stay. Honey
//! cells pay +1 when picked up. Any zombie sharing the avatar's cell —
//! whether the avatar walked in or the zombie did — loses immediately.
//! Uniquely in the suite, reaching `max-ticks` alive is the win.

use crate::action::Action;
use crate::outcome::Status;

use super::{GameState, Pos};

const DIRS: [(i16, i16); 4] = [(0, -1), (0, 1), (-1, 0), (1, 0)];

pub(super) fn step(s: &mut GameState, action: Action) {
    s.move_avatar(action);
    if let Some(i) = s.honey.iter().position(|&h| h == s.avatar) {
        s.honey.remove(i);
        s.score += 1.0;
    }
    if s.zombies.contains(&s.avatar) {
        s.status = Status::Loss;
        return;
    }
    let beta = s.level.zombie_bias;
    let avatar = s.avatar;
    for i in 0..s.zombies.len() {
        let z = s.zombies[i];
        let (dx, dy) = if s.rng.gen_bool(beta) {
            toward(z, avatar, &mut s.rng)
        } else {
            DIRS[s.rng.next_below(4) as usize]
        };
        let t = Pos::new(z.x + dx, z.y + dy);
        if !s.is_wall(t.x, t.y) {
            s.zombies[i] = t;
        }
    }
    if s.zombies.contains(&s.avatar) {
        s.status = Status::Loss;
    }
}

/// One step along the axis with the larger separation; ties are coin-flipped.
fn toward(z: Pos, a: Pos, rng: &mut crate::rng::SeededRng) -> (i16, i16) {
    let dx = a.x - z.x;
    let dy = a.y - z.y;
    let horizontal = if dx.abs() > dy.abs() {
        true
    } else if dy.abs() > dx.abs() {
        false
    } else {
        rng.next_below(2) == 0
    };
    if horizontal {
        (dx.signum(), 0)
    } else {
        (0, dy.signum())
    }
}

#[cfg(test)]
mod tests {
    use crate::action::Action;
    use crate::games::{load_level, GameId, Pos};
    use crate::outcome::Status;
    use crate::rng::SeededRng;

    #[test]
    fn surviving_to_the_limit_wins() {
        // The zombie is walled off: it can never reach the avatar.
        let level = "\
#max-ticks=12
#beta=1
wwwwww
wA.w.w
w..wzw
wwwwww
";
        let mut s = load_level(level, GameId::Zombies).unwrap();
        s.set_rng(SeededRng::new(2, 0));
        for _ in 0..12 {
            s.advance(Action::Nil).unwrap();
        }
        assert_eq!(s.status(), Status::Win);
        assert_eq!(s.tick(), 12);
    }

    #[test]
    fn walking_into_a_zombie_loses_before_it_moves() {
        let level = "\
#max-ticks=50
#beta=0
wwwww
wAz.w
w...w
wwwww
";
        let mut s = load_level(level, GameId::Zombies).unwrap();
        s.set_rng(SeededRng::new(4, 0));
        s.advance(Action::Right).unwrap();
        assert_eq!(s.status(), Status::Loss);
        assert_eq!(s.tick(), 1);
    }

    #[test]
    fn fully_biased_zombie_homes_in_and_kills() {
        // beta=1 in an open corridor: the zombie closes one cell per tick
        // along the row while the avatar idles 4 cells away.
        let level = "\
#max-ticks=50
#beta=1
wwwwwww
wA...zw
wwwwwww
";
        let mut s = load_level(level, GameId::Zombies).unwrap();
        s.set_rng(SeededRng::new(6, 0));
        for expected_x in [4i16, 3, 2] {
            s.advance(Action::Nil).unwrap();
            assert_eq!(s.zombies(), &[Pos::new(expected_x, 1)]);
            assert_eq!(s.status(), Status::Ongoing);
        }
        s.advance(Action::Nil).unwrap();
        assert_eq!(s.status(), Status::Loss, "zombie stepped onto the avatar");
    }

    #[test]
    fn honey_pays_one_each_and_disappears() {
        let level = "\
#max-ticks=50
#beta=1
wwwwwww
wAhh..w
w.....w
w....zw
wwwwwww
";
        let mut s = load_level(level, GameId::Zombies).unwrap();
        s.set_rng(SeededRng::new(8, 0));
        s.advance(Action::Right).unwrap();
        assert_eq!(s.score(), 1.0);
        assert_eq!(s.honey().len(), 1);
        s.advance(Action::Right).unwrap();
        assert_eq!(s.score(), 2.0);
        assert!(s.honey().is_empty());
        // Re-walking the cell pays nothing.
        s.advance(Action::Left).unwrap();
        if s.status() == Status::Ongoing {
            assert_eq!(s.score(), 2.0);
        }
    }

    #[test]
    fn same_stream_reproduces_the_horde_exactly() {
        let level = "\
#max-ticks=60
#beta=0.5
wwwwwwwww
w.z.....w
w...h...w
w......zw
w..A....w
wwwwwwwww
";
        let base = load_level(level, GameId::Zombies).unwrap();
        let mut a = base.clone();
        let mut b = base;
        a.set_rng(SeededRng::new(33, 1));
        b.set_rng(SeededRng::new(33, 1));
        for _ in 0..60 {
            if a.status().is_terminal() {
                break;
            }
            a.advance(Action::Nil).unwrap();
            b.advance(Action::Nil).unwrap();
            assert_eq!(a, b);
        }
    }
}
