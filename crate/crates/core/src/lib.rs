//! Budget-bounded forward planning for small grid games.
//!
//! The crate has three layers:
//!
//! * planning primitives — [`action::Action`], [`budget::BudgetMeter`],
//!   [`rng::SeededRng`], [`outcome::GameOutcome`];
//! * a suite of six forward-model games ([`games`]) that agents plan
//!   against by cloning states and advancing the clones;
//! * the planners themselves — rolling-horizon evolution ([`evo`]), the
//!   open-loop statistical tree ([`tree`]), and the five benchmark agents
//!   ([`agents`]) — plus the ranking / significance helpers ([`stats`])
//!   used to compare them.
//!
//! Everything is deterministic given a seed: games, operators, and agents
//! draw exclusively from [`rng::SeededRng`] streams handed to them.

pub mod action;
pub mod agents;
pub mod budget;
pub mod evo;
pub mod games;
pub mod outcome;
pub mod rng;
pub mod stats;
pub mod tree;
