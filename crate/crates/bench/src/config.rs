//! Tournament configuration: which agents meet which games, how often,
//! and under what budget. A [`RunSpec`] can be built from defaults, a
//! flat `key=value` config file, or command-line overrides layered on
//! top of either.

use rhea_core::agents::AgentVariant;
use rhea_core::budget::DEFAULT_BUDGET;
use rhea_core::games::{GameId, LEVELS_PER_GAME};
use std::str::FromStr;
use thiserror::Error;

/// Default repetitions per (agent, game, level) cell.
pub const DEFAULT_REPETITIONS: u32 = 20;

/// Default base seed for episode-seed derivation.
pub const DEFAULT_BASE_SEED: u64 = 1;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunSpec {
    pub agents: Vec<AgentVariant>,
    pub games: Vec<GameId>,
    pub levels: Vec<u8>,
    pub repetitions: u32,
    pub base_seed: u64,
    /// Forward-model calls allowed per decision.
    pub budget: u32,
    /// Optional override of every level's tick limit.
    pub max_ticks: Option<u32>,
}

impl Default for RunSpec {
    /// The full tournament: every agent on every game and level,
    /// twenty repetitions each, 900 calls per decision.
    fn default() -> Self {
        RunSpec {
            agents: AgentVariant::ALL.to_vec(),
            games: GameId::ALL.to_vec(),
            levels: (0..LEVELS_PER_GAME as u8).collect(),
            repetitions: DEFAULT_REPETITIONS,
            base_seed: DEFAULT_BASE_SEED,
            budget: DEFAULT_BUDGET,
            max_ticks: None,
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ConfigError {
    #[error("line {0}: expected key=value, got {1:?}")]
    BadLine(usize, String),
    #[error("line {0}: unknown key {1:?}")]
    UnknownKey(usize, String),
    #[error("bad value for {key}: {detail}")]
    BadValue { key: &'static str, detail: String },
    #[error("agents list is empty")]
    NoAgents,
    #[error("games list is empty")]
    NoGames,
    #[error("levels list is empty")]
    NoLevels,
    #[error("level {0} out of range (levels are 0..{})", LEVELS_PER_GAME)]
    LevelOutOfRange(u8),
    #[error("repetitions must be at least 1")]
    NoRepetitions,
    #[error("budget must be at least 1")]
    NoBudget,
}

impl RunSpec {
    /// Check invariants; every constructor funnels through this.
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.agents.is_empty() {
            return Err(ConfigError::NoAgents);
        }
        if self.games.is_empty() {
            return Err(ConfigError::NoGames);
        }
        if self.levels.is_empty() {
            return Err(ConfigError::NoLevels);
        }
        if let Some(&bad) = self
            .levels
            .iter()
            .find(|&&l| l as usize >= LEVELS_PER_GAME)
        {
            return Err(ConfigError::LevelOutOfRange(bad));
        }
        if self.repetitions == 0 {
            return Err(ConfigError::NoRepetitions);
        }
        if self.budget == 0 {
            return Err(ConfigError::NoBudget);
        }
        Ok(())
    }

    /// Total number of episodes this run describes.
    pub fn episode_count(&self) -> usize {
        self.agents.len() * self.games.len() * self.levels.len() * self.repetitions as usize
    }

    /// Parse a flat `key=value` config file. Keys: `agents`, `games`,
    /// `levels`, `reps` (alias `repetitions`), `seed`, `budget`,
    /// `max-ticks`. Blank lines and `#` comments are skipped; a repeated
    /// key overrides the earlier value. Unlisted keys keep their
    /// defaults. The result is validated.
    pub fn from_config_text(text: &str) -> Result<RunSpec, ConfigError> {
        let mut spec = RunSpec::default();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| ConfigError::BadLine(line_no, line.to_string()))?;
            let (key, value) = (key.trim(), value.trim());
            match key {
                "agents" => spec.agents = parse_agents(value)?,
                "games" => spec.games = parse_games(value)?,
                "levels" => spec.levels = parse_levels(value)?,
                "reps" | "repetitions" => {
                    spec.repetitions = parse_num(value, "reps")?;
                }
                "seed" => spec.base_seed = parse_num(value, "seed")?,
                "budget" => spec.budget = parse_num(value, "budget")?,
                "max-ticks" => spec.max_ticks = Some(parse_num(value, "max-ticks")?),
                _ => return Err(ConfigError::UnknownKey(line_no, key.to_string())),
            }
        }
        spec.validate()?;
        Ok(spec)
    }
}

fn parse_num<T: FromStr>(value: &str, key: &'static str) -> Result<T, ConfigError>
where
    T::Err: std::fmt::Display,
{
    value.parse().map_err(|e: T::Err| ConfigError::BadValue {
        key,
        detail: format!("{value:?}: {e}"),
    })
}

/// Comma-separated agent ids; duplicates collapse, order kept.
pub fn parse_agents(value: &str) -> Result<Vec<AgentVariant>, ConfigError> {
    let mut out = Vec::new();
    for part in value.split(',') {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        let agent = part.parse().map_err(|e| ConfigError::BadValue {
            key: "agents",
            detail: format!("{e}"),
        })?;
        if !out.contains(&agent) {
            out.push(agent);
        }
    }
    if out.is_empty() {
        return Err(ConfigError::NoAgents);
    }
    Ok(out)
}

/// Comma-separated game ids; duplicates collapse, order kept.
pub fn parse_games(value: &str) -> Result<Vec<GameId>, ConfigError> {
    let mut out = Vec::new();
    for part in value.split(',') {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        let game = part.parse().map_err(|e| ConfigError::BadValue {
            key: "games",
            detail: format!("{e}"),
        })?;
        if !out.contains(&game) {
            out.push(game);
        }
    }
    if out.is_empty() {
        return Err(ConfigError::NoGames);
    }
    Ok(out)
}

/// Level selections: single indices and inclusive ranges, comma
/// separated — `0-4`, `0,2`, `0-1,3`. Duplicates collapse, order kept.
pub fn parse_levels(value: &str) -> Result<Vec<u8>, ConfigError> {
    let bad = |detail: String| ConfigError::BadValue {
        key: "levels",
        detail,
    };
    let mut out: Vec<u8> = Vec::new();
    for part in value.split(',') {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        let (lo, hi) = match part.split_once('-') {
            Some((a, b)) => (
                a.trim()
                    .parse::<u8>()
                    .map_err(|e| bad(format!("{a:?}: {e}")))?,
                b.trim()
                    .parse::<u8>()
                    .map_err(|e| bad(format!("{b:?}: {e}")))?,
            ),
            None => {
                let v = part.parse::<u8>().map_err(|e| bad(format!("{part:?}: {e}")))?;
                (v, v)
            }
        };
        if lo > hi {
            return Err(bad(format!("empty range {part:?}")));
        }
        for l in lo..=hi {
            if !out.contains(&l) {
                out.push(l);
            }
        }
    }
    if out.is_empty() {
        return Err(ConfigError::NoLevels);
    }
    Ok(out)
}
