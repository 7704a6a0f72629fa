//! The six-game benchmark suite.
//!
//! Each game is a small grid world driven by one [`advance`](GameState::advance)
//! call per tick. States are plain values: cloning one and advancing the clone
//! is how agents plan, and the clone evolves independently of the original.
//! The `d-` games are deterministic; the `s-` games draw from the state's own
//! [`SeededRng`] stream, so two equal states advanced with the same action
//! stay equal.
//!
//! Every advance of any state on a thread bumps a thread-local call counter
//! ([`fm_call_count`]); the benchmark harness uses it to audit that agents are
//! charged exactly one budget unit per simulated tick.

pub mod level;

mod aliens;
mod butterflies;
mod escape;
mod missiles;
mod race;
mod zombies;

use std::cell::Cell;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use thiserror::Error;

use crate::action::Action;
use crate::outcome::{GameOutcome, Status};
use crate::rng::SeededRng;
pub use level::{parse_level_text, LevelMap, ParseLevelError, LEGEND};

thread_local! {
    static FM_CALLS: Cell<u64> = const { Cell::new(0) };
}

/// Total successful [`GameState::advance`] calls made on this thread.
pub fn fm_call_count() -> u64 {
    FM_CALLS.with(|c| c.get())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GameId {
    Escape,
    Race,
    Missiles,
    Aliens,
    Butterflies,
    Zombies,
}

pub const LEVELS_PER_GAME: usize = 5;

impl GameId {
    pub const ALL: [GameId; 6] = [
        GameId::Escape,
        GameId::Race,
        GameId::Missiles,
        GameId::Aliens,
        GameId::Butterflies,
        GameId::Zombies,
    ];

    pub fn id(self) -> &'static str {
        match self {
            GameId::Escape => "d-escape",
            GameId::Race => "d-race",
            GameId::Missiles => "d-missiles",
            GameId::Aliens => "s-aliens",
            GameId::Butterflies => "s-butterflies",
            GameId::Zombies => "s-zombies",
        }
    }

    /// Whether the forward model draws random numbers.
    pub fn is_stochastic(self) -> bool {
        matches!(self, GameId::Aliens | GameId::Butterflies | GameId::Zombies)
    }

    /// The actions this game accepts. Always a subset of [`Action::ALL`] in
    /// canonical order; `Nil` is legal everywhere.
    pub fn legal_actions(self) -> &'static [Action] {
        use Action::*;
        match self {
            GameId::Escape | GameId::Race | GameId::Butterflies | GameId::Zombies => {
                &[Up, Down, Left, Right, Nil]
            }
            GameId::Missiles => &[Up, Down, Left, Right, Use, Nil],
            GameId::Aliens => &[Left, Right, Use, Nil],
        }
    }

    /// How an episode ends when the tick limit is reached with the game
    /// still undecided. Surviving is the whole point of `s-zombies`, so the
    /// timeout is a win there; everywhere else running out of time is a loss.
    pub fn timeout_status(self) -> Status {
        match self {
            GameId::Zombies => Status::Win,
            _ => Status::Loss,
        }
    }

    /// Glyphs this game's levels may contain, beyond `w . A`.
    fn extra_glyphs(self) -> &'static [char] {
        match self {
            GameId::Escape => &['x'],
            GameId::Race => &['r'],
            GameId::Missiles => &['m', 'c'],
            GameId::Aliens => &['e'],
            GameId::Butterflies => &['b'],
            GameId::Zombies => &['z', 'h'],
        }
    }

    /// Header keys this game's levels may set, beyond `max-ticks`.
    fn extra_headers(self) -> &'static [&'static str] {
        match self {
            GameId::Escape => &[],
            GameId::Race => &["racer-period"],
            GameId::Missiles => &["missile-period"],
            GameId::Aliens => &["p", "alien-period"],
            GameId::Butterflies => &[],
            GameId::Zombies => &["beta"],
        }
    }

    /// The level text shipped with the crate, or `None` past the roster.
    pub fn builtin_level(self, index: usize) -> Option<&'static str> {
        builtin::level_text(self, index)
    }
}

impl fmt::Display for GameId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("unknown game id: {0:?}")]
pub struct ParseGameError(pub String);

impl FromStr for GameId {
    type Err = ParseGameError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        GameId::ALL
            .into_iter()
            .find(|g| g.id() == s)
            .ok_or_else(|| ParseGameError(s.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Pos {
    pub x: i16,
    pub y: i16,
}

impl Pos {
    pub fn new(x: i16, y: i16) -> Self {
        Pos { x, y }
    }

    pub fn manhattan(self, other: Pos) -> i16 {
        (self.x - other.x).abs() + (self.y - other.y).abs()
    }
}

/// Immutable per-level data, shared by all clones of a state via `Arc` so
/// cloning a state costs only its entity lists.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelStatic {
    pub game: GameId,
    pub width: i16,
    pub height: i16,
    walls: Vec<bool>,
    pub max_ticks: u32,
    pub exits: Vec<Pos>,
    /// Rightmost interior column; reaching it wins `d-race`.
    pub goal_x: i16,
    pub racer_period: u32,
    pub missile_period: u32,
    pub alien_period: u32,
    /// Per-alien, per-tick bomb-drop probability.
    pub bomb_prob: f64,
    /// Probability that a zombie steps toward the avatar instead of randomly.
    pub zombie_bias: f64,
}

impl LevelStatic {
    #[inline]
    pub fn is_wall(&self, x: i16, y: i16) -> bool {
        if x < 0 || y < 0 || x >= self.width || y >= self.height {
            return true;
        }
        self.walls[y as usize * self.width as usize + x as usize]
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum AdvanceError {
    #[error("advance on a terminal state")]
    Terminal,
    #[error("action {action} is not legal in {game}")]
    IllegalAction { game: GameId, action: Action },
}

/// A full game state: cheap to clone, advanced one action per tick.
///
/// Unused entity lists stay empty for games that do not need them; the
/// one-struct layout keeps cloning and dispatch branch-free and simple.
#[derive(Debug, Clone, PartialEq)]
pub struct GameState {
    level: Arc<LevelStatic>,
    pub(crate) status: Status,
    pub(crate) score: f64,
    pub(crate) tick: u32,
    pub(crate) avatar: Pos,
    pub(crate) rng: SeededRng,
    // d-race
    pub(crate) racer: Pos,
    pub(crate) best_x: i16,
    // d-missiles
    pub(crate) missiles: Vec<Pos>,
    pub(crate) cities: Vec<Pos>,
    // s-aliens
    pub(crate) aliens: Vec<Pos>,
    pub(crate) alien_dir: i16,
    pub(crate) bombs: Vec<Pos>,
    // s-butterflies
    pub(crate) butterflies: Vec<Pos>,
    // s-zombies
    pub(crate) zombies: Vec<Pos>,
    pub(crate) honey: Vec<Pos>,
}

impl GameState {
    pub fn game(&self) -> GameId {
        self.level.game
    }

    pub fn level(&self) -> &LevelStatic {
        &self.level
    }

    pub fn status(&self) -> Status {
        self.status
    }

    pub fn score(&self) -> f64 {
        self.score
    }

    pub fn tick(&self) -> u32 {
        self.tick
    }

    pub fn avatar(&self) -> Pos {
        self.avatar
    }

    pub fn outcome(&self) -> GameOutcome {
        GameOutcome {
            status: self.status,
            score: self.score,
            tick: self.tick,
        }
    }

    pub fn legal_actions(&self) -> &'static [Action] {
        self.level.game.legal_actions()
    }

    /// Replace the state's random stream (stochastic games only draw from
    /// this). The episode runner seeds the real environment; planners seed
    /// their clones so rollouts sample fresh futures.
    pub fn set_rng(&mut self, rng: SeededRng) {
        self.rng = rng;
    }

    /// Override the level's tick limit (e.g. to shorten survival games in
    /// quick experiments). Affects only this state and its future clones.
    pub fn set_max_ticks(&mut self, max_ticks: u32) {
        std::sync::Arc::make_mut(&mut self.level).max_ticks = max_ticks;
    }

    pub fn missiles(&self) -> &[Pos] {
        &self.missiles
    }

    pub fn cities(&self) -> &[Pos] {
        &self.cities
    }

    pub fn aliens(&self) -> &[Pos] {
        &self.aliens
    }

    pub fn bombs(&self) -> &[Pos] {
        &self.bombs
    }

    pub fn butterflies(&self) -> &[Pos] {
        &self.butterflies
    }

    pub fn zombies(&self) -> &[Pos] {
        &self.zombies
    }

    pub fn honey(&self) -> &[Pos] {
        &self.honey
    }

    pub fn racer(&self) -> Pos {
        self.racer
    }

    #[inline]
    pub(crate) fn is_wall(&self, x: i16, y: i16) -> bool {
        self.level.is_wall(x, y)
    }

    /// Move the avatar by the action's delta, staying put against walls.
    /// The tick is consumed either way.
    #[inline]
    pub(crate) fn move_avatar(&mut self, action: Action) {
        let (dx, dy) = action.delta();
        let (nx, ny) = (self.avatar.x + dx, self.avatar.y + dy);
        if !self.is_wall(nx, ny) {
            self.avatar = Pos::new(nx, ny);
        }
    }

    /// Advance one tick. Exactly one unit of forward-model budget at call
    /// sites that plan; the thread-local call counter increments on every
    /// successful call regardless. Terminal states reject further advances,
    /// and illegal actions are an error rather than a no-op.
    pub fn advance(&mut self, action: Action) -> Result<(), AdvanceError> {
        if self.status.is_terminal() {
            return Err(AdvanceError::Terminal);
        }
        if !self.legal_actions().contains(&action) {
            return Err(AdvanceError::IllegalAction {
                game: self.level.game,
                action,
            });
        }
        FM_CALLS.with(|c| c.set(c.get() + 1));
        self.tick += 1;
        match self.level.game {
            GameId::Escape => escape::step(self, action),
            GameId::Race => race::step(self, action),
            GameId::Missiles => missiles::step(self, action),
            GameId::Aliens => aliens::step(self, action),
            GameId::Butterflies => butterflies::step(self, action),
            GameId::Zombies => zombies::step(self, action),
        }
        if self.status == Status::Ongoing && self.tick >= self.level.max_ticks {
            self.status = self.level.game.timeout_status();
        }
        Ok(())
    }

    /// Render the state back to a glyph grid (no headers). At tick 0 this is
    /// the level's own grid; later it is a debug view where runtime-spawned
    /// alien bombs show as 'o'.
    pub fn render(&self) -> String {
        let (w, h) = (self.level.width as usize, self.level.height as usize);
        let mut grid = vec![vec!['.'; w]; h];
        for y in 0..h {
            for x in 0..w {
                if self.level.walls[y * w + x] {
                    grid[y][x] = 'w';
                }
            }
        }
        let mut put = |p: Pos, g: char| grid[p.y as usize][p.x as usize] = g;
        for &p in &self.level.exits {
            put(p, 'x');
        }
        for &p in &self.cities {
            put(p, 'c');
        }
        for &p in &self.honey {
            put(p, 'h');
        }
        for &p in &self.missiles {
            put(p, 'm');
        }
        for &p in &self.aliens {
            put(p, 'e');
        }
        for &p in &self.bombs {
            put(p, 'o');
        }
        for &p in &self.butterflies {
            put(p, 'b');
        }
        for &p in &self.zombies {
            put(p, 'z');
        }
        if self.level.game == GameId::Race {
            put(self.racer, 'r');
        }
        put(self.avatar, 'A');
        let mut out = String::with_capacity((w + 1) * h);
        for row in grid {
            out.extend(row);
            out.push('\n');
        }
        out
    }
}

fn parse_header<T: FromStr>(
    map: &LevelMap,
    key: &str,
    default: T,
) -> Result<T, ParseLevelError> {
    match map.headers.get(key) {
        None => Ok(default),
        Some(v) => v.parse().map_err(|_| ParseLevelError::BadHeaderValue {
            line: 0,
            key: key.to_string(),
            msg: format!("cannot parse {v:?}"),
        }),
    }
}

fn require(game: GameId, ok: bool, msg: &str) -> Result<(), ParseLevelError> {
    if ok {
        Ok(())
    } else {
        Err(ParseLevelError::GameRequirement {
            game: game.id().to_string(),
            msg: msg.to_string(),
        })
    }
}

/// Parse level text and build the initial state for `game`.
///
/// The state starts at tick 0, score 0, `Ongoing`, with a placeholder random
/// stream (`SeededRng::new(0, 0)`) that callers running stochastic games
/// should replace via [`GameState::set_rng`].
pub fn load_level(text: &str, game: GameId) -> Result<GameState, ParseLevelError> {
    let map = parse_level_text(text)?;

    for key in map.headers.keys() {
        if key != "max-ticks" && !game.extra_headers().contains(&key.as_str()) {
            return Err(ParseLevelError::UnknownHeader {
                line: 0,
                key: key.clone(),
                game: game.id().to_string(),
            });
        }
    }
    let max_ticks: u32 = match map.headers.get("max-ticks") {
        None => return Err(ParseLevelError::MissingMaxTicks),
        Some(v) => v.parse().map_err(|_| ParseLevelError::BadHeaderValue {
            line: 0,
            key: "max-ticks".to_string(),
            msg: format!("cannot parse {v:?}"),
        })?,
    };
    require(game, max_ticks >= 1, "max-ticks must be at least 1")?;
    let racer_period: u32 = parse_header(&map, "racer-period", 2)?;
    let missile_period: u32 = parse_header(&map, "missile-period", 2)?;
    let alien_period: u32 = parse_header(&map, "alien-period", 2)?;
    let bomb_prob: f64 = parse_header(&map, "p", 0.1)?;
    let zombie_bias: f64 = parse_header(&map, "beta", 0.5)?;
    for (key, v) in [("p", bomb_prob), ("beta", zombie_bias)] {
        if !(0.0..=1.0).contains(&v) {
            return Err(ParseLevelError::BadHeaderValue {
                line: 0,
                key: key.to_string(),
                msg: format!("{v} is outside [0, 1]"),
            });
        }
    }
    for (key, v) in [
        ("racer-period", racer_period),
        ("missile-period", missile_period),
        ("alien-period", alien_period),
    ] {
        if v == 0 {
            return Err(ParseLevelError::BadHeaderValue {
                line: 0,
                key: key.to_string(),
                msg: "period must be at least 1".to_string(),
            });
        }
    }

    let (w, h) = (map.width, map.height);
    let mut walls = vec![false; w * h];
    let mut avatar: Option<Pos> = None;
    let mut exits = Vec::new();
    let mut missiles = Vec::new();
    let mut cities = Vec::new();
    let mut aliens = Vec::new();
    let mut butterflies = Vec::new();
    let mut zombies = Vec::new();
    let mut honey = Vec::new();
    let mut racer: Option<Pos> = None;

    for y in 0..h {
        for x in 0..w {
            let g = map.cells[y][x];
            let (line, col) = map.source_pos(x, y);
            if g != 'w' && g != '.' && g != 'A' && !game.extra_glyphs().contains(&g) {
                return Err(ParseLevelError::GlyphNotAllowed {
                    line,
                    col,
                    glyph: g,
                    game: game.id().to_string(),
                });
            }
            let p = Pos::new(x as i16, y as i16);
            match g {
                'w' => walls[y * w + x] = true,
                '.' => {}
                'A' => {
                    if avatar.replace(p).is_some() {
                        return Err(ParseLevelError::DuplicateAvatar { line, col });
                    }
                }
                'x' => exits.push(p),
                'm' => missiles.push(p),
                'c' => cities.push(p),
                'e' => aliens.push(p),
                'b' => butterflies.push(p),
                'z' => zombies.push(p),
                'h' => honey.push(p),
                'r' => {
                    if racer.replace(p).is_some() {
                        return Err(ParseLevelError::GameRequirement {
                            game: game.id().to_string(),
                            msg: "more than one racer 'r'".to_string(),
                        });
                    }
                }
                _ => unreachable!("legend-checked glyph"),
            }
        }
    }

    let avatar = avatar.ok_or(ParseLevelError::MissingAvatar)?;
    let goal_x = w as i16 - 2;
    match game {
        GameId::Escape => require(game, !exits.is_empty(), "needs at least one exit 'x'")?,
        GameId::Race => {
            require(game, racer.is_some(), "needs a racer 'r'")?;
            require(game, avatar.x < goal_x, "avatar must start left of the goal column")?;
            require(
                game,
                racer.unwrap().x < goal_x,
                "racer must start left of the goal column",
            )?;
        }
        GameId::Missiles => {
            require(game, !missiles.is_empty(), "needs at least one missile 'm'")?;
            require(game, !cities.is_empty(), "needs at least one city 'c'")?;
        }
        GameId::Aliens => require(game, !aliens.is_empty(), "needs at least one alien 'e'")?,
        GameId::Butterflies => {
            require(game, !butterflies.is_empty(), "needs at least one butterfly 'b'")?
        }
        GameId::Zombies => require(game, !zombies.is_empty(), "needs at least one zombie 'z'")?,
    }

    let level = LevelStatic {
        game,
        width: w as i16,
        height: h as i16,
        walls,
        max_ticks,
        exits,
        goal_x,
        racer_period,
        missile_period,
        alien_period,
        bomb_prob,
        zombie_bias,
    };
    Ok(GameState {
        level: Arc::new(level),
        status: Status::Ongoing,
        score: 0.0,
        tick: 0,
        avatar,
        rng: SeededRng::new(0, 0),
        racer: racer.unwrap_or(Pos::new(0, 0)),
        best_x: avatar.x,
        missiles,
        cities,
        aliens,
        alien_dir: 1,
        bombs: Vec::new(),
        butterflies,
        zombies,
        honey,
    })
}

mod builtin {
    use super::GameId;

    macro_rules! levels {
        ($dir:literal) => {
            [
                include_str!(concat!(env!("CARGO_MANIFEST_DIR"), "/levels/", $dir, "/0.txt")),
                include_str!(concat!(env!("CARGO_MANIFEST_DIR"), "/levels/", $dir, "/1.txt")),
                include_str!(concat!(env!("CARGO_MANIFEST_DIR"), "/levels/", $dir, "/2.txt")),
                include_str!(concat!(env!("CARGO_MANIFEST_DIR"), "/levels/", $dir, "/3.txt")),
                include_str!(concat!(env!("CARGO_MANIFEST_DIR"), "/levels/", $dir, "/4.txt")),
            ]
        };
    }

    const ESCAPE: [&str; 5] = levels!("d-escape");
    const RACE: [&str; 5] = levels!("d-race");
    const MISSILES: [&str; 5] = levels!("d-missiles");
    const ALIENS: [&str; 5] = levels!("s-aliens");
    const BUTTERFLIES: [&str; 5] = levels!("s-butterflies");
    const ZOMBIES: [&str; 5] = levels!("s-zombies");

    pub fn level_text(game: GameId, index: usize) -> Option<&'static str> {
        let set = match game {
            GameId::Escape => &ESCAPE,
            GameId::Race => &RACE,
            GameId::Missiles => &MISSILES,
            GameId::Aliens => &ALIENS,
            GameId::Butterflies => &BUTTERFLIES,
            GameId::Zombies => &ZOMBIES,
        };
        set.get(index).copied()
    }
}
