//! s-butterflies: catch every drifting butterfly before time runs out.
//!
//! Each butterfly takes one uniformly random step per tick (up/down/left/
//! right, staying put against walls). Sharing a cell with the avatar catches
//! it for +2 — checked both after the avatar moves and after the butterflies
//! move, so walking into one and being fluttered into both count. Catching
//! the last one wins; the timeout loses.

use crate::action::Action;
use crate::outcome::Status;

use super::{GameState, Pos};

const DIRS: [(i16, i16); 4] = [(0, -1), (0, 1), (-1, 0), (1, 0)];

fn catch(s: &mut GameState) {
    let avatar = s.avatar;
    let before = s.butterflies.len();
    s.butterflies.retain(|&b| b != avatar);
    s.score += 2.0 * (before - s.butterflies.len()) as f64;
}

pub(super) fn step(s: &mut GameState, action: Action) {
    s.move_avatar(action);
    catch(s);
    for i in 0..s.butterflies.len() {
        let (dx, dy) = DIRS[s.rng.next_below(4) as usize];
        let b = s.butterflies[i];
        let t = Pos::new(b.x + dx, b.y + dy);
        if !s.is_wall(t.x, t.y) {
            s.butterflies[i] = t;
        }
    }
    catch(s);
    if s.butterflies.is_empty() {
        s.status = Status::Win;
    }
}
