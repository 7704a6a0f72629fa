//! The five planning agents benchmarked by this crate.
//!
//! Four are rolling-horizon evolutionary planners sharing one loop —
//! build a population, evolve it until the forward-model budget runs
//! out, fire the first action of the fittest member — and differ only
//! in where the initial population comes from and what survives
//! between decisions:
//!
//! * **vanilla** — fresh random population every decision.
//! * **shift-buffer** — carries the previous population, shifted left
//!   one gene, into the next decision.
//! * **stat-tree** — fresh population, plus an open-loop statistics
//!   tree fed by every evaluation and re-rooted on the fired action.
//! * **stat-tree-seeding** — the statistics tree additionally seeds the
//!   initial population and injects one sampled candidate after each
//!   generation.
//!
//! The fifth, **mcts**, is a conventional open-loop Monte-Carlo tree
//! search given the same budget and rollout horizon, included as a
//! non-evolutionary baseline.

use crate::action::Action;
use crate::budget::BudgetMeter;
use crate::evo::{
    evaluate, init_population, next_generation, shift_carryover, EvalResult, EvoParams,
    Individual, Population,
};
use crate::games::GameState;
use crate::outcome::Status;
use crate::rng::SeededRng;
use crate::tree::{StatTree, UcbParams};

/// Which planner an [`Agent`] is running.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum AgentVariant {
    Vanilla,
    ShiftBuffer,
    StatTree,
    StatTreeSeeding,
    Mcts,
}

impl AgentVariant {
    pub const ALL: [AgentVariant; 5] = [
        AgentVariant::Vanilla,
        AgentVariant::ShiftBuffer,
        AgentVariant::StatTree,
        AgentVariant::StatTreeSeeding,
        AgentVariant::Mcts,
    ];

    /// Stable name used on the command line and in result files.
    pub fn id(self) -> &'static str {
        match self {
            AgentVariant::Vanilla => "vanilla",
            AgentVariant::ShiftBuffer => "shift-buffer",
            AgentVariant::StatTree => "stat-tree",
            AgentVariant::StatTreeSeeding => "stat-tree-seeding",
            AgentVariant::Mcts => "mcts",
        }
    }
}

impl std::fmt::Display for AgentVariant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.id())
    }
}

/// Error for unrecognized agent names.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown agent `{0}` (expected one of vanilla, shift-buffer, stat-tree, stat-tree-seeding, mcts)")]
pub struct ParseAgentError(pub String);

impl std::str::FromStr for AgentVariant {
    type Err = ParseAgentError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        AgentVariant::ALL
            .into_iter()
            .find(|v| v.id() == s)
            .ok_or_else(|| ParseAgentError(s.to_string()))
    }
}

/// Per-decision accounting. Every simulated tick an agent spends is
/// attributed to exactly one of the evaluation counters, so
/// `depth_sum` must always equal the budget units the meter charged.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct DecisionStats {
    /// Budget units the meter recorded for this decision.
    pub used: u32,
    /// Simulated ticks summed over every evaluation and rollout.
    pub depth_sum: u64,
    /// Evaluations of the initial population (random or tree-seeded).
    pub seed_evaluations: u32,
    /// Evaluations of offspring inside the generation loop.
    pub generation_evaluations: u32,
    /// Evaluations of tree-sampled injection candidates.
    pub injection_evaluations: u32,
    /// Completed generational steps.
    pub generations: u32,
    /// How much the statistics-tree root visit count grew during this
    /// decision (before re-rooting); zero for tree-less agents. For
    /// tree-search this counts backpropagated iterations instead.
    pub root_visit_growth: u64,
}

impl DecisionStats {
    /// Total evaluations of whole genomes (excludes tree-search iterations).
    pub fn evaluations(&self) -> u32 {
        self.seed_evaluations + self.generation_evaluations + self.injection_evaluations
    }
}

/// An action chosen for the real game, plus the accounting behind it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Decision {
    pub action: Action,
    pub stats: DecisionStats,
}

/// A budget-bounded planner. `decide` may simulate only through the
/// meter it is handed; the real game advance is never charged to it.
pub trait Agent: Send {
    fn variant(&self) -> AgentVariant;

    /// Plan one action from `root`, which must be non-terminal.
    fn decide(&mut self, root: &GameState, meter: &mut BudgetMeter) -> Decision;
}

/// Build an agent of the given variant. `rng` is the agent's private
/// decision stream; two agents built with identical variants, params,
/// and rng replay identically on identical inputs.
pub fn make_agent(variant: AgentVariant, params: EvoParams, rng: SeededRng) -> Box<dyn Agent> {
    match variant {
        AgentVariant::Mcts => Box::new(MctsAgent::new(params, rng)),
        _ => Box::new(RheaAgent::new(variant, params, rng)),
    }
}

/// Outcome of seeding a population from the statistics tree.
pub struct SeedOutcome {
    pub population: Population,
    /// Members that received a fitness before the budget ran out.
    pub evaluated: u32,
    /// Simulated ticks those evaluations consumed.
    pub sim_steps: u64,
}

/// Build the initial population for the tree-seeding planner: member 0
/// follows the tree's greedy best path, the rest are UCB1-sampled
/// sequences, and every member is evaluated (feeding the tree) as soon
/// as it is built. If the budget dies mid-seeding, the remaining slots
/// are filled with unevaluated uniform-random genomes.
pub fn seed_population_from_tree(
    tree: &mut StatTree,
    params: &EvoParams,
    root: &GameState,
    meter: &mut BudgetMeter,
    rng: &mut SeededRng,
) -> SeedOutcome {
    let legal = root.legal_actions();
    let mut members = Vec::with_capacity(params.population_size);
    let mut evaluated = 0u32;
    let mut sim_steps = 0u64;
    for slot in 0..params.population_size {
        let genome = if meter.remaining() == 0 {
            if slot == 0 {
                tree.best_path(params.genome_len, legal, rng)
            } else {
                return fill_random(members, params, legal, rng, evaluated, sim_steps);
            }
        } else if slot == 0 {
            tree.best_path(params.genome_len, legal, rng)
        } else {
            tree.sample_ucb1_sequence(params.genome_len, legal, rng)
        };
        let mut ind = Individual::from_genome(genome);
        if let EvalResult::Evaluated { depth } = evaluate(
            &mut ind,
            root,
            meter,
            Some(tree),
            rng.fork(),
            params.win_bonus,
        ) {
            evaluated += 1;
            sim_steps += depth as u64;
        }
        members.push(ind);
    }
    SeedOutcome {
        population: Population {
            members,
            generation: 0,
        },
        evaluated,
        sim_steps,
    }
}

fn fill_random(
    mut members: Vec<Individual>,
    params: &EvoParams,
    legal: &[Action],
    rng: &mut SeededRng,
    evaluated: u32,
    sim_steps: u64,
) -> SeedOutcome {
    while members.len() < params.population_size {
        members.push(Individual::random(params.genome_len, legal, rng));
    }
    SeedOutcome {
        population: Population {
            members,
            generation: 0,
        },
        evaluated,
        sim_steps,
    }
}

/// Outcome of one post-generation injection attempt.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct InjectOutcome {
    /// Whether a candidate was sampled and evaluated at all.
    pub evaluated: bool,
    /// Whether the candidate displaced the worst member.
    pub replaced: bool,
    /// Simulated ticks the candidate's evaluation consumed.
    pub sim_steps: u64,
}

/// After a generation, sample one UCB1 sequence from the tree, evaluate
/// it (the tree learns from it regardless), and let it displace the
/// worst member only if strictly fitter. Skipped outright when the
/// meter cannot afford a full-length evaluation, so replacement never
/// rides on a partially evaluated candidate.
pub fn inject_tree_individual(
    pop: &mut Population,
    tree: &mut StatTree,
    root: &GameState,
    meter: &mut BudgetMeter,
    params: &EvoParams,
    rng: &mut SeededRng,
) -> InjectOutcome {
    if (meter.remaining() as usize) < params.genome_len {
        return InjectOutcome {
            evaluated: false,
            replaced: false,
            sim_steps: 0,
        };
    }
    let legal = root.legal_actions();
    let mut candidate =
        Individual::from_genome(tree.sample_ucb1_sequence(params.genome_len, legal, rng));
    let depth = match evaluate(
        &mut candidate,
        root,
        meter,
        Some(tree),
        rng.fork(),
        params.win_bonus,
    ) {
        EvalResult::Evaluated { depth } => depth,
        // Unreachable: remaining >= genome_len >= 1 guarantees at least
        // one simulated tick.
        EvalResult::NoBudget => 0,
    };
    let replaced = apply_injection(pop, candidate);
    InjectOutcome {
        evaluated: true,
        replaced,
        sim_steps: depth as u64,
    }
}

/// The pure replacement rule: an evaluated candidate displaces the
/// current worst evaluated member if and only if it is strictly
/// fitter. The population is untouched otherwise, so the best member
/// can never be lost to an injection. Returns whether it replaced.
pub fn apply_injection(pop: &mut Population, candidate: Individual) -> bool {
    let fitness = candidate
        .fitness
        .expect("injection candidates arrive evaluated");
    let Some(worst) = pop.worst_index() else {
        // No evaluated member to compare against; keep the population.
        return false;
    };
    let worst_fitness = pop.members[worst]
        .fitness
        .expect("worst_index only ranks evaluated members");
    if fitness > worst_fitness {
        pop.members[worst] = candidate;
        true
    } else {
        false
    }
}

/// The four evolutionary variants, parameterized by carryover policy.
struct RheaAgent {
    variant: AgentVariant,
    params: EvoParams,
    rng: SeededRng,
    /// Shift-buffer carryover; `None` for the other variants.
    pop: Option<Population>,
    /// Statistics tree for the two tree variants; `None` otherwise.
    tree: Option<StatTree>,
}

impl RheaAgent {
    fn new(variant: AgentVariant, params: EvoParams, rng: SeededRng) -> Self {
        params.validate().expect("agent built with invalid params");
        assert!(
            variant != AgentVariant::Mcts,
            "tree search has a dedicated agent"
        );
        RheaAgent {
            variant,
            params,
            rng,
            pop: None,
            tree: None,
        }
    }

    fn uses_tree(&self) -> bool {
        matches!(
            self.variant,
            AgentVariant::StatTree | AgentVariant::StatTreeSeeding
        )
    }
}

impl Agent for RheaAgent {
    fn variant(&self) -> AgentVariant {
        self.variant
    }

    fn decide(&mut self, root: &GameState, meter: &mut BudgetMeter) -> Decision {
        assert_eq!(root.status(), Status::Ongoing, "deciding on a finished game");
        let legal = root.legal_actions();
        let mut stats = DecisionStats::default();
        let used_at_entry = meter.used();

        if self.uses_tree() && self.tree.is_none() {
            self.tree = Some(StatTree::new(UcbParams { k: self.params.ucb_k }));
        }
        let root_visits_before = self.tree.as_ref().map_or(0, |t| t.root().visits());

        // Initial population, per variant.
        let mut pop = match self.variant {
            AgentVariant::Vanilla | AgentVariant::StatTree => {
                init_population(&self.params, legal, &mut self.rng)
            }
            AgentVariant::ShiftBuffer => self
                .pop
                .take()
                .unwrap_or_else(|| init_population(&self.params, legal, &mut self.rng)),
            AgentVariant::StatTreeSeeding => {
                let seeded = seed_population_from_tree(
                    self.tree.as_mut().expect("tree initialized above"),
                    &self.params,
                    root,
                    meter,
                    &mut self.rng,
                );
                stats.seed_evaluations = seeded.evaluated;
                stats.depth_sum += seeded.sim_steps;
                seeded.population
            }
            AgentVariant::Mcts => unreachable!(),
        };

        // Evaluate whichever members still lack a fitness (all of them
        // for the non-seeding variants; none, normally, after seeding).
        for member in &mut pop.members {
            if member.fitness.is_some() {
                continue;
            }
            if let EvalResult::Evaluated { depth } = evaluate(
                member,
                root,
                meter,
                self.tree.as_mut(),
                self.rng.fork(),
                self.params.win_bonus,
            ) {
                stats.seed_evaluations += 1;
                stats.depth_sum += depth as u64;
            }
        }

        // Evolve until the meter is dry.
        while meter.remaining() > 0 {
            let out = next_generation(
                &pop,
                &self.params,
                root,
                meter,
                self.tree.as_mut(),
                &mut self.rng,
            );
            pop = out.population;
            stats.generations += 1;
            stats.generation_evaluations += out.evaluated;
            stats.depth_sum += out.sim_steps;

            if self.variant == AgentVariant::StatTreeSeeding {
                let inj = inject_tree_individual(
                    &mut pop,
                    self.tree.as_mut().expect("tree initialized above"),
                    root,
                    meter,
                    &self.params,
                    &mut self.rng,
                );
                if inj.evaluated {
                    stats.injection_evaluations += 1;
                    stats.depth_sum += inj.sim_steps;
                }
            }
        }

        // Fire the first gene of the fittest member; with nothing
        // evaluated (zero budget) fall back to a uniform-random move.
        let action = match pop.best_index() {
            Some(best) => pop.members[best].genome[0],
            None => *self.rng.choose(legal),
        };

        // Carryover for the next decision.
        match self.variant {
            AgentVariant::ShiftBuffer => {
                shift_carryover(&mut pop, legal, &mut self.rng);
                self.pop = Some(pop);
            }
            _ => self.pop = None,
        }
        if let Some(tree) = self.tree.as_mut() {
            stats.root_visit_growth = tree.root().visits() - root_visits_before;
            tree.reroot(action);
        }

        stats.used = meter.used() - used_at_entry;
        Decision { action, stats }
    }
}

/// Open-loop Monte-Carlo tree search under the same budget contract:
/// UCB1 descent through the stored tree, one expansion per iteration,
/// uniform rollout to the shared horizon, reward backpropagated along
/// the in-tree path. The tree persists across decisions via re-rooting.
struct MctsAgent {
    params: EvoParams,
    rng: SeededRng,
    tree: StatTree,
}

impl MctsAgent {
    fn new(params: EvoParams, rng: SeededRng) -> Self {
        params.validate().expect("agent built with invalid params");
        let tree = StatTree::new(UcbParams { k: params.ucb_k });
        MctsAgent { params, rng, tree }
    }
}

impl Agent for MctsAgent {
    fn variant(&self) -> AgentVariant {
        AgentVariant::Mcts
    }

    fn decide(&mut self, root: &GameState, meter: &mut BudgetMeter) -> Decision {
        assert_eq!(root.status(), Status::Ongoing, "deciding on a finished game");
        let legal = root.legal_actions();
        let horizon = self.params.genome_len;
        let mut stats = DecisionStats::default();
        let used_at_entry = meter.used();
        let root_visits_before = self.tree.root().visits();

        while meter.remaining() > 0 {
            let mut sim = root.clone();
            sim.set_rng(self.rng.fork());
            let mut path: Vec<Action> = Vec::new();
            let mut depth = 0usize;

            // Selection: walk stored statistics until stepping off the
            // tree (one expansion) or hitting the horizon/terminal.
            while depth < horizon && !sim.status().is_terminal() {
                let node = self
                    .tree
                    .node_at(&path)
                    .expect("selection path stays inside the tree");
                let picked = self.tree.select_child(node, legal, &mut self.rng);
                if meter.consume(1).is_err() {
                    break;
                }
                sim.advance(picked.action).expect("legal non-terminal step");
                path.push(picked.action);
                depth += 1;
                if picked.unvisited {
                    break;
                }
            }
            // Rollout: uniform-random continuation to the horizon.
            while depth < horizon && !sim.status().is_terminal() {
                if meter.consume(1).is_err() {
                    break;
                }
                let action = *self.rng.choose(legal);
                sim.advance(action).expect("legal non-terminal step");
                depth += 1;
            }
            if depth == 0 {
                // The meter died before the first step; nothing to learn.
                break;
            }
            let mut reward = sim.score();
            if sim.status() == Status::Win {
                reward += self.params.win_bonus;
            }
            self.tree.backpropagate(&path, reward);
            stats.depth_sum += depth as u64;
        }

        // Most-visited root action; ties broken by higher mean reward,
        // residual ties uniformly at random. No tree (zero budget) means
        // a uniform-random legal action.
        let mut best: Vec<Action> = Vec::new();
        let mut best_key = (0u64, f64::NEG_INFINITY);
        for &action in legal {
            let Some(child) = self.tree.root().child(action) else {
                continue;
            };
            let key = (child.visits(), child.mean());
            if best.is_empty() || key.0 > best_key.0 || (key.0 == best_key.0 && key.1 > best_key.1)
            {
                best.clear();
                best.push(action);
                best_key = key;
            } else if key.0 == best_key.0 && key.1 == best_key.1 {
                best.push(action);
            }
        }
        let action = if best.is_empty() {
            *self.rng.choose(legal)
        } else {
            *self.rng.choose(&best)
        };

        stats.root_visit_growth = self.tree.root().visits() - root_visits_before;
        self.tree.reroot(action);
        stats.used = meter.used() - used_at_entry;
        Decision { action, stats }
    }
}
