//! The per-decision forward-model budget.
//!
//! Agents are compared under a fixed number of simulated game ticks per
//! decision, not wall time. One advance of a copied game state costs one
//! unit; advancing the real game costs nothing. The meter is all-or-nothing:
//! a `consume` that would overshoot fails and leaves the count untouched, so
//! `used` can never exceed `limit`.

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
#[error("forward-model budget exhausted ({used}/{limit} used, {requested} requested)")]
pub struct BudgetExhausted {
    pub used: u32,
    pub limit: u32,
    pub requested: u32,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BudgetMeter {
    limit: u32,
    used: u32,
}

/// Default forward-model calls allowed per decision.
pub const DEFAULT_BUDGET: u32 = 900;

impl BudgetMeter {
    pub fn new(limit: u32) -> Self {
        BudgetMeter { limit, used: 0 }
    }

    /// Charge `n >= 1` units; fails without charging if fewer than `n` remain.
    pub fn consume(&mut self, n: u32) -> Result<(), BudgetExhausted> {
        debug_assert!(n >= 1, "consume(0) is meaningless");
        if self.used + n > self.limit {
            return Err(BudgetExhausted {
                used: self.used,
                limit: self.limit,
                requested: n,
            });
        }
        self.used += n;
        Ok(())
    }

    pub fn remaining(&self) -> u32 {
        self.limit - self.used
    }

    pub fn used(&self) -> u32 {
        self.used
    }

    pub fn limit(&self) -> u32 {
        self.limit
    }

    /// Start a new decision: the count returns to zero, the limit stays.
    pub fn reset(&mut self) {
        self.used = 0;
    }
}
