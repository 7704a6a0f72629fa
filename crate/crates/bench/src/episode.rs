//! Single-episode execution: seed derivation, the decision loop, and
//! the audit shim that cross-checks every planner against the budget
//! meter using the forward model's own call counter.

use rhea_core::agents::{make_agent, AgentVariant};
use rhea_core::budget::BudgetMeter;
use rhea_core::evo::EvoParams;
use rhea_core::games::{fm_call_count, load_level, GameId, ParseLevelError};
use rhea_core::outcome::Status;
use rhea_core::rng::SeededRng;
use serde::{Deserialize, Serialize};
use std::time::Instant;
use thiserror::Error;

/// RNG stream index for the real environment of an episode.
const ENV_STREAM: u64 = 0;
/// RNG stream index for the agent's private decision stream.
const AGENT_STREAM: u64 = 1;

/// Hard ceiling on episode length; every built-in level times out long
/// before this, so hitting it means a game failed to terminate.
const TICK_CEILING: u32 = 1_000_000;

/// One finished episode, exactly as persisted: one CSV row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpisodeRecord {
    pub agent: String,
    pub game: String,
    pub level: u8,
    pub seed: u64,
    /// 1 on a win, 0 otherwise.
    pub win: u8,
    /// Final in-game score.
    pub score: f64,
    /// Episode length in environment ticks.
    pub ticks: u32,
    /// Forward-model calls the planner spent, summed over decisions.
    pub fm_calls: u64,
    /// Wall-clock duration; informational only, never compared.
    pub wall_ms: u64,
}

#[derive(Debug, Error)]
pub enum EpisodeError {
    #[error("{game} has no level {level}")]
    NoSuchLevel { game: GameId, level: u8 },
    #[error(transparent)]
    Level(#[from] ParseLevelError),
    #[error("advance failed at tick {tick}: {detail}")]
    Advance { tick: u32, detail: String },
    #[error("audit failed at tick {tick}: {detail}")]
    Audit { tick: u32, detail: String },
    #[error("episode exceeded {TICK_CEILING} ticks without terminating")]
    Runaway,
}

/// Derive the seed for one episode from the run's base seed and the
/// cell coordinates (FNV-1a over the coordinate bytes). Stable across
/// runs, platforms, and execution order; distinct coordinates almost
/// surely get distinct streams.
pub fn derive_episode_seed(
    base_seed: u64,
    agent: &str,
    game: &str,
    level: u8,
    rep: u32,
) -> u64 {
    const OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
    const PRIME: u64 = 0x0000_0100_0000_01b3;
    fn eat(mut h: u64, bytes: &[u8]) -> u64 {
        for &b in bytes {
            h = (h ^ b as u64).wrapping_mul(PRIME);
        }
        h
    }
    let mut h = OFFSET;
    h = eat(h, &base_seed.to_le_bytes());
    h = eat(h, agent.as_bytes());
    h = eat(h, &[0xff]); // field separator: ids never contain 0xff
    h = eat(h, game.as_bytes());
    h = eat(h, &[0xff]);
    h = eat(h, &[level]);
    h = eat(h, &rep.to_le_bytes());
    h
}

/// What one decision did to the environment; handed to the trace
/// callback after the chosen action is applied for real.
#[derive(Debug, Clone, Copy)]
pub struct TickTrace {
    /// Tick index the decision was made at (0-based).
    pub tick: u32,
    pub action: rhea_core::action::Action,
    /// Forward-model calls this decision consumed.
    pub used: u32,
    /// Score after the action took effect.
    pub score: f64,
    pub status: Status,
}

/// Play one episode to termination and report it. The planner gets a
/// fresh meter each tick; the real advance is applied outside the
/// meter. Every decision is audited: the forward model's thread-local
/// call counter must move by exactly the meter's `used`, which must
/// equal the decision's own accounting and its summed rollout depth.
pub fn run_episode(
    agent: AgentVariant,
    game: GameId,
    level: u8,
    seed: u64,
    budget: u32,
    max_ticks: Option<u32>,
) -> Result<EpisodeRecord, EpisodeError> {
    run_episode_with(agent, game, level, seed, budget, max_ticks, |_| {})
}

/// [`run_episode`] with a per-tick observer, used by the `play`
/// subcommand to emit traces.
pub fn run_episode_with(
    agent: AgentVariant,
    game: GameId,
    level: u8,
    seed: u64,
    budget: u32,
    max_ticks: Option<u32>,
    mut on_tick: impl FnMut(TickTrace),
) -> Result<EpisodeRecord, EpisodeError> {
    let text = game
        .builtin_level(level as usize)
        .ok_or(EpisodeError::NoSuchLevel { game, level })?;
    let mut state = load_level(text, game)?;
    if let Some(cap) = max_ticks {
        state.set_max_ticks(cap);
    }
    state.set_rng(SeededRng::new(seed, ENV_STREAM));

    let params = EvoParams {
        budget,
        ..EvoParams::default()
    };
    let mut planner = make_agent(agent, params, SeededRng::new(seed, AGENT_STREAM));
    let mut meter = BudgetMeter::new(budget);

    let started = Instant::now();
    let mut fm_total = 0u64;
    while state.status() == Status::Ongoing {
        let tick = state.tick();
        if tick >= TICK_CEILING {
            return Err(EpisodeError::Runaway);
        }
        meter.reset();
        let calls_before = fm_call_count();
        let decision = planner.decide(&state, &mut meter);
        let calls_moved = fm_call_count() - calls_before;

        let audit = |ok: bool, detail: String| {
            if ok {
                Ok(())
            } else {
                Err(EpisodeError::Audit { tick, detail })
            }
        };
        audit(
            meter.used() <= budget,
            format!("meter used {} over budget {budget}", meter.used()),
        )?;
        audit(
            decision.stats.used == meter.used(),
            format!(
                "decision reports {} used, meter says {}",
                decision.stats.used,
                meter.used()
            ),
        )?;
        audit(
            calls_moved == meter.used() as u64,
            format!(
                "forward model counted {calls_moved} calls, meter charged {}",
                meter.used()
            ),
        )?;
        audit(
            decision.stats.depth_sum == decision.stats.used as u64,
            format!(
                "summed rollout depth {} != used {}",
                decision.stats.depth_sum, decision.stats.used
            ),
        )?;
        fm_total += meter.used() as u64;

        state
            .advance(decision.action)
            .map_err(|e| EpisodeError::Advance {
                tick,
                detail: e.to_string(),
            })?;
        on_tick(TickTrace {
            tick,
            action: decision.action,
            used: meter.used(),
            score: state.score(),
            status: state.status(),
        });
    }

    Ok(EpisodeRecord {
        agent: agent.id().to_string(),
        game: game.id().to_string(),
        level,
        seed,
        win: (state.status() == Status::Win) as u8,
        score: state.score(),
        ticks: state.tick(),
        fm_calls: fm_total,
        wall_ms: started.elapsed().as_millis() as u64,
    })
}
