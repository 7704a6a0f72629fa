//! s-aliens: shoot down a marching rank of aliens while dodging their bombs.
//!
//! The avatar slides left/right along the floor. Aliens march horizontally in
//! lockstep every `alien-period` ticks, reversing at walls. Each tick, every
//! alien drops a bomb at its own cell with probability `p` (the game's only
//! random draw source); bombs fall one cell per tick and despawn on walls.
//! `Use` fires an instant vertical shot that kills the nearest alien directly
//! above the avatar (+1). Touching a bomb loses; clearing the rank wins.
//!
//! Tick order: avatar (move or shoot) → march → bombs fall → contact check →
//! new drops → win check. Established before the win check, a loss stands
//! even if the last alien died the same tick.

use crate::action::Action;
use crate::outcome::Status;

use super::{GameState, Pos};

pub(super) fn step(s: &mut GameState, action: Action) {
    s.move_avatar(action);
    if action == Action::Use {
        // Nearest alien straight up from the avatar.
        let (ax, ay) = (s.avatar.x, s.avatar.y);
        if let Some(hit) = s
            .aliens
            .iter()
            .enumerate()
            .filter(|(_, p)| p.x == ax && p.y < ay)
            .max_by_key(|(_, p)| p.y)
            .map(|(i, _)| i)
        {
            s.aliens.remove(hit);
            s.score += 1.0;
        }
    }

    if s.tick % s.level.alien_period == 0 && !s.aliens.is_empty() {
        let blocked = |s: &GameState, d: i16| s.aliens.iter().any(|a| s.is_wall(a.x + d, a.y));
        if blocked(s, s.alien_dir) {
            s.alien_dir = -s.alien_dir;
        }
        if !blocked(s, s.alien_dir) {
            let d = s.alien_dir;
            for a in &mut s.aliens {
                a.x += d;
            }
        }
    }

    let mut i = 0;
    while i < s.bombs.len() {
        let target = Pos::new(s.bombs[i].x, s.bombs[i].y + 1);
        if s.is_wall(target.x, target.y) {
            s.bombs.remove(i);
        } else {
            s.bombs[i] = target;
            i += 1;
        }
    }
    if s.bombs.contains(&s.avatar) {
        s.status = Status::Loss;
        return;
    }

    let p = s.level.bomb_prob;
    for i in 0..s.aliens.len() {
        if s.rng.gen_bool(p) {
            s.bombs.push(s.aliens[i]);
        }
    }

    if s.aliens.is_empty() {
        s.status = Status::Win;
    }
}
