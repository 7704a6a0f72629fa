//! The tournament matrix: expand a [`RunSpec`] into cells, run every
//! cell's episode (optionally across worker threads), and collect the
//! records in a canonical order that does not depend on scheduling.

use crate::config::RunSpec;
use crate::episode::{derive_episode_seed, run_episode, EpisodeRecord};
use rhea_core::agents::AgentVariant;
use rhea_core::games::GameId;
use std::cmp::Ordering;
use std::sync::atomic::{AtomicUsize, Ordering as AtomicOrdering};
use std::sync::OnceLock;

/// One (agent, game, level, repetition) coordinate of the matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Cell {
    pub agent: AgentVariant,
    pub game: GameId,
    pub level: u8,
    pub rep: u32,
}

/// A cell whose episode could not run; the matrix keeps going.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CellFailure {
    pub agent: String,
    pub game: String,
    pub level: u8,
    pub rep: u32,
    pub message: String,
}

#[derive(Debug, Default)]
pub struct MatrixOutput {
    /// Finished episodes in canonical order (see [`sort_canonical`]).
    pub records: Vec<EpisodeRecord>,
    /// Cells that failed, in cell order.
    pub failures: Vec<CellFailure>,
}

/// Expand a `RunSpec` into its cells: agents × games × levels × reps,
/// in its own list orders.
pub fn cells_of(spec: &RunSpec) -> Vec<Cell> {
    let mut cells = Vec::with_capacity(spec.episode_count());
    for &agent in &spec.agents {
        for &game in &spec.games {
            for &level in &spec.levels {
                for rep in 0..spec.repetitions {
                    cells.push(Cell {
                        agent,
                        game,
                        level,
                        rep,
                    });
                }
            }
        }
    }
    cells
}

/// Sort records into the canonical order used for persistence and
/// run-to-run comparison. Wall-clock time is deliberately not part of
/// the key, so two replays of the same run order identically.
pub fn sort_canonical(records: &mut [EpisodeRecord]) {
    records.sort_by(canonical_cmp);
}

fn canonical_cmp(a: &EpisodeRecord, b: &EpisodeRecord) -> Ordering {
    (a.agent.as_str(), a.game.as_str(), a.level, a.seed)
        .cmp(&(b.agent.as_str(), b.game.as_str(), b.level, b.seed))
        .then(a.win.cmp(&b.win))
        .then(a.score.total_cmp(&b.score))
        .then(a.ticks.cmp(&b.ticks))
        .then(a.fm_calls.cmp(&b.fm_calls))
}

/// Run every cell of a `RunSpec`. `parallelism` is the worker-thread
/// count (values below 1 mean 1); workers pull cells from a shared
/// queue, and because each episode is fully determined by its cell
/// coordinates, the output is identical whatever the thread count or
/// interleaving. Failures are collected, not fatal.
pub fn run_matrix(spec: &RunSpec, parallelism: usize) -> MatrixOutput {
    let cells = cells_of(spec);
    let slots: Vec<OnceLock<Result<EpisodeRecord, String>>> =
        (0..cells.len()).map(|_| OnceLock::new()).collect();
    let next = AtomicUsize::new(0);
    let workers = parallelism.max(1).min(cells.len().max(1));

    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, AtomicOrdering::Relaxed);
                let Some(cell) = cells.get(i) else { break };
                let seed = derive_episode_seed(
                    spec.base_seed,
                    cell.agent.id(),
                    cell.game.id(),
                    cell.level,
                    cell.rep,
                );
                let outcome = run_episode(
                    cell.agent,
                    cell.game,
                    cell.level,
                    seed,
                    spec.budget,
                    spec.max_ticks,
                )
                .map_err(|e| e.to_string());
                let _ = slots[i].set(outcome);
            });
        }
    });

    let mut out = MatrixOutput::default();
    for (cell, slot) in cells.iter().zip(slots) {
        match slot.into_inner().expect("every queued cell ran") {
            Ok(record) => out.records.push(record),
            Err(message) => out.failures.push(CellFailure {
                agent: cell.agent.id().to_string(),
                game: cell.game.id().to_string(),
                level: cell.level,
                rep: cell.rep,
                message,
            }),
        }
    }
    sort_canonical(&mut out.records);
    out
}
