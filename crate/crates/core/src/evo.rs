//! The rolling-horizon evolutionary engine.
//!
//! An individual is a fixed-length plan of actions (the genome); its fitness
//! is the raw game score reached by simulating the plan from the current
//! root state on a copy, one budget unit per simulated tick. Generations are
//! produced by tournament selection, uniform crossover, and per-gene
//! mutation, with elitism; evaluation order within a generation is fixed so
//! replays are deterministic. Budget exhaustion truncates evaluations and,
//! when a slot's offspring cannot be simulated even one tick, retains the
//! previous occupant of that slot — evaluated fitness is never compared
//! against unevaluated fitness.

use crate::action::Action;
use crate::budget::BudgetMeter;
use crate::games::GameState;
use crate::outcome::Status;
use crate::rng::SeededRng;
use crate::tree::StatTree;

use thiserror::Error;

/// Default genome length (planning horizon).
pub const DEFAULT_GENOME_LEN: usize = 14;
/// Default population size.
pub const DEFAULT_POPULATION: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvoParams {
    pub population_size: usize,
    pub genome_len: usize,
    /// Per-gene mutation probability.
    pub mutation_rate: f64,
    pub tournament_size: usize,
    pub elites: usize,
    /// Forward-model calls allowed per decision.
    pub budget: u32,
    /// UCB1 exploration constant for tree-backed variants.
    pub ucb_k: f64,
    /// Added to fitness on a Win state; 0 keeps fitness = raw score.
    pub win_bonus: f64,
}

impl Default for EvoParams {
    fn default() -> Self {
        EvoParams {
            population_size: DEFAULT_POPULATION,
            genome_len: DEFAULT_GENOME_LEN,
            mutation_rate: 1.0 / DEFAULT_GENOME_LEN as f64,
            tournament_size: 3,
            elites: 1,
            budget: crate::budget::DEFAULT_BUDGET,
            ucb_k: 1.0,
            win_bonus: 0.0,
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParamError {
    #[error("population size must be at least 2")]
    PopulationTooSmall,
    #[error("genome length must be at least 1")]
    EmptyGenome,
    #[error("mutation rate must lie in [0, 1]")]
    BadMutationRate,
    #[error("tournament size must be between 1 and the population size")]
    BadTournamentSize,
    #[error("elite count must be less than the population size")]
    TooManyElites,
    #[error("UCB exploration constant must be positive")]
    BadExploration,
}

impl EvoParams {
    pub fn validate(&self) -> Result<(), ParamError> {
        if self.population_size < 2 {
            return Err(ParamError::PopulationTooSmall);
        }
        if self.genome_len < 1 {
            return Err(ParamError::EmptyGenome);
        }
        if !(0.0..=1.0).contains(&self.mutation_rate) {
            return Err(ParamError::BadMutationRate);
        }
        if self.tournament_size < 1 || self.tournament_size > self.population_size {
            return Err(ParamError::BadTournamentSize);
        }
        if self.elites >= self.population_size {
            return Err(ParamError::TooManyElites);
        }
        if self.ucb_k <= 0.0 {
            return Err(ParamError::BadExploration);
        }
        Ok(())
    }
}

/// A fixed-length action plan with cached evaluation results.
/// `fitness` is present iff the plan was evaluated against the current root
/// (or deliberately carried); `depth` is how many genes were actually
/// simulated before terminal state or budget cut the rollout short.
#[derive(Debug, Clone, PartialEq)]
pub struct Individual {
    pub genome: Vec<Action>,
    pub fitness: Option<f64>,
    pub depth: usize,
}

impl Individual {
    pub fn from_genome(genome: Vec<Action>) -> Self {
        Individual {
            genome,
            fitness: None,
            depth: 0,
        }
    }

    pub fn random(len: usize, legal: &[Action], rng: &mut SeededRng) -> Self {
        Individual::from_genome((0..len).map(|_| *rng.choose(legal)).collect())
    }

    /// Fitness for ordering purposes; unevaluated sorts below everything.
    pub fn fitness_key(&self) -> f64 {
        self.fitness.unwrap_or(f64::NEG_INFINITY)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Population {
    pub members: Vec<Individual>,
    pub generation: u32,
}

impl Population {
    /// Index of the best evaluated member: highest fitness, ties to the
    /// lowest index. `None` when nothing is evaluated.
    pub fn best_index(&self) -> Option<usize> {
        let mut best: Option<(usize, f64)> = None;
        for (i, m) in self.members.iter().enumerate() {
            if let Some(f) = m.fitness {
                if best.map_or(true, |(_, bf)| f > bf) {
                    best = Some((i, f));
                }
            }
        }
        best.map(|(i, _)| i)
    }

    /// Index of the worst evaluated member: lowest fitness, ties to the
    /// HIGHEST index — disjoint from `best_index` whenever two or more
    /// members are evaluated, so replacing the worst can never clobber the
    /// best.
    pub fn worst_index(&self) -> Option<usize> {
        let mut worst: Option<(usize, f64)> = None;
        for (i, m) in self.members.iter().enumerate() {
            if let Some(f) = m.fitness {
                if worst.map_or(true, |(_, wf)| f <= wf) {
                    worst = Some((i, f));
                }
            }
        }
        worst.map(|(i, _)| i)
    }
}

/// A fresh population of uniform-random legal genomes, unevaluated.
pub fn init_population(params: &EvoParams, legal: &[Action], rng: &mut SeededRng) -> Population {
    Population {
        members: (0..params.population_size)
            .map(|_| Individual::random(params.genome_len, legal, rng))
            .collect(),
        generation: 0,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EvalResult {
    /// The plan was simulated `depth ≥ 1` ticks and now has a fitness.
    Evaluated { depth: usize },
    /// The meter was empty at entry; the individual is untouched.
    NoBudget,
}

/// Simulate `ind`'s genome from `root` on a copy, one budget unit per tick,
/// stopping early at a terminal state or on budget exhaustion. Fitness is
/// the raw score of the final reached state (plus `win_bonus` on a Win).
/// With a tree present, the applied prefix and fitness are backpropagated.
/// `rollout_rng` re-seeds the copy so stochastic futures are freshly
/// sampled per evaluation.
pub fn evaluate(
    ind: &mut Individual,
    root: &GameState,
    meter: &mut BudgetMeter,
    tree: Option<&mut StatTree>,
    rollout_rng: SeededRng,
    win_bonus: f64,
) -> EvalResult {
    if meter.remaining() == 0 {
        return EvalResult::NoBudget;
    }
    let mut sim = root.clone();
    sim.set_rng(rollout_rng);
    let mut depth = 0;
    for &a in &ind.genome {
        if sim.status().is_terminal() || meter.consume(1).is_err() {
            break;
        }
        sim.advance(a).expect("legal action on ongoing state");
        depth += 1;
    }
    let mut fitness = sim.score();
    if sim.status() == Status::Win {
        fitness += win_bonus;
    }
    ind.fitness = Some(fitness);
    ind.depth = depth;
    if let Some(tree) = tree {
        tree.backpropagate(&ind.genome[..depth], fitness);
    }
    EvalResult::Evaluated { depth }
}

/// Uniform crossover: each gene copied from parent `a` or `b` by an
/// independent fair draw (0 → `a`, 1 → `b`), one draw per gene in order.
pub fn uniform_crossover(a: &Individual, b: &Individual, rng: &mut SeededRng) -> Individual {
    debug_assert_eq!(a.genome.len(), b.genome.len());
    let genome = a
        .genome
        .iter()
        .zip(&b.genome)
        .map(|(&ga, &gb)| if rng.next_below(2) == 0 { ga } else { gb })
        .collect();
    Individual::from_genome(genome)
}

/// Per-gene mutation: each gene is independently resampled uniformly from
/// the legal set with probability `rate` (resampling may reproduce the same
/// gene). One probability draw per gene, plus one index draw per mutation.
pub fn mutate(ind: &mut Individual, rate: f64, legal: &[Action], rng: &mut SeededRng) {
    for g in &mut ind.genome {
        if rng.next_f64() < rate {
            *g = *rng.choose(legal);
        }
    }
    ind.fitness = None;
    ind.depth = 0;
}

/// Tournament selection: sample `size` distinct members uniformly, return
/// the index of the fittest; exact fitness ties among the sampled are broken
/// uniformly at random.
pub fn tournament_select(pop: &Population, size: usize, rng: &mut SeededRng) -> usize {
    debug_assert!(size >= 1 && size <= pop.members.len());
    let sample = rng.sample_indices(pop.members.len(), size);
    let best = sample
        .iter()
        .map(|&i| pop.members[i].fitness_key())
        .fold(f64::NEG_INFINITY, f64::max);
    let mut tied = [0usize; 16];
    let mut tied_n = 0;
    for &i in &sample {
        if pop.members[i].fitness_key() == best && tied_n < tied.len() {
            tied[tied_n] = i;
            tied_n += 1;
        }
    }
    if tied_n == 1 {
        tied[0]
    } else {
        tied[rng.next_below(tied_n as u64) as usize]
    }
}

/// What one generational step did, beyond the population itself;
/// the counts feed budget-conservation audits.
#[derive(Debug, Clone, PartialEq)]
pub struct GenerationOutcome {
    pub population: Population,
    /// Offspring that received a fitness this step.
    pub evaluated: u32,
    /// Total simulated ticks spent on those evaluations.
    pub sim_steps: u64,
}

/// One generational step. The top `elites` members carry over unchanged
/// (fitness kept); every other slot is filled by an evaluated offspring of
/// two tournament parents, or retains its previous occupant when the meter
/// cannot afford even one simulated tick for the offspring. Slots are
/// processed in a fixed order, and exhausted slots draw nothing, so replays
/// are deterministic.
pub fn next_generation(
    pop: &Population,
    params: &EvoParams,
    root: &GameState,
    meter: &mut BudgetMeter,
    mut tree: Option<&mut StatTree>,
    rng: &mut SeededRng,
) -> GenerationOutcome {
    let m = params.population_size;
    debug_assert_eq!(pop.members.len(), m);
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&i, &j| {
        pop.members[j]
            .fitness_key()
            .partial_cmp(&pop.members[i].fitness_key())
            .unwrap()
            .then(i.cmp(&j))
    });
    let mut next: Vec<Individual> = Vec::with_capacity(m);
    for &i in order.iter().take(params.elites) {
        next.push(pop.members[i].clone());
    }
    let mut evaluated = 0u32;
    let mut sim_steps = 0u64;
    for slot in params.elites..m {
        if meter.remaining() == 0 {
            next.push(pop.members[slot].clone());
            continue;
        }
        let pa = tournament_select(pop, params.tournament_size, rng);
        let pb = tournament_select(pop, params.tournament_size, rng);
        let mut child = uniform_crossover(&pop.members[pa], &pop.members[pb], rng);
        mutate(&mut child, params.mutation_rate, root.legal_actions(), rng);
        match evaluate(
            &mut child,
            root,
            meter,
            tree.as_deref_mut(),
            rng.fork(),
            params.win_bonus,
        ) {
            EvalResult::Evaluated { depth } => {
                evaluated += 1;
                sim_steps += depth as u64;
                next.push(child);
            }
            EvalResult::NoBudget => next.push(pop.members[slot].clone()),
        }
    }
    GenerationOutcome {
        population: Population {
            members: next,
            generation: pop.generation + 1,
        },
        evaluated,
        sim_steps,
    }
}

/// Shift-buffer carryover: every genome drops its first gene and appends a
/// fresh uniform-random legal action; all fitnesses are invalidated (the
/// shifted plan was never evaluated as such). Population size and genome
/// length are unchanged.
pub fn shift_carryover(pop: &mut Population, legal: &[Action], rng: &mut SeededRng) {
    for m in &mut pop.members {
        m.genome.remove(0);
        m.genome.push(*rng.choose(legal));
        m.fitness = None;
        m.depth = 0;
    }
}
