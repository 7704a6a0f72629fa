//! The open-loop statistical tree.
//!
//! Nodes are keyed by actions, not game states: a node stands for "the
//! sequence of actions leading here", holding only a visit count `n` and a
//! cumulative reward `W`. Rollout evaluations backpropagate their fitness
//! along the applied action prefix, creating nodes as needed; firing an
//! action re-roots the tree on the matching child so statistics survive
//! across decisions. No game state is ever stored.
//!
//! Child selection uses UCB1 with mean rewards min-max normalized to [0, 1]
//! over the fitness values observed since the last re-root, so one
//! exploration constant works across games with very different score scales.
//! The raw sums stay unnormalized; normalization happens at read time.

use crate::action::Action;
use crate::rng::SeededRng;

/// Per-action statistics node. Children are indexed by canonical action
/// index; an absent child has simply never been visited.
#[derive(Debug, Clone, PartialEq)]
pub struct StatNode {
    visits: u64,
    reward: f64,
    children: [Option<Box<StatNode>>; Action::COUNT],
}

const NO_CHILD: Option<Box<StatNode>> = None;

impl StatNode {
    pub fn new() -> Self {
        StatNode {
            visits: 0,
            reward: 0.0,
            children: [NO_CHILD; Action::COUNT],
        }
    }

    pub fn visits(&self) -> u64 {
        self.visits
    }

    pub fn reward(&self) -> f64 {
        self.reward
    }

    /// Mean reward; 0 when unvisited.
    pub fn mean(&self) -> f64 {
        if self.visits == 0 {
            0.0
        } else {
            self.reward / self.visits as f64
        }
    }

    pub fn child(&self, action: Action) -> Option<&StatNode> {
        self.children[action.index()].as_deref()
    }

    /// Children in canonical action order.
    pub fn children(&self) -> impl Iterator<Item = (Action, &StatNode)> {
        Action::ALL
            .into_iter()
            .filter_map(|a| self.child(a).map(|c| (a, c)))
    }

    /// Whether `action` leads to a child with at least one visit.
    fn visited(&self, action: Action) -> bool {
        self.child(action).map_or(false, |c| c.visits > 0)
    }

    pub fn node_count(&self) -> usize {
        1 + self
            .children
            .iter()
            .flatten()
            .map(|c| c.node_count())
            .sum::<usize>()
    }
}

impl Default for StatNode {
    fn default() -> Self {
        StatNode::new()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UcbParams {
    /// Exploration constant K; must be > 0.
    pub k: f64,
}

impl Default for UcbParams {
    fn default() -> Self {
        UcbParams { k: 1.0 }
    }
}

/// UCB1 as used everywhere in this crate:
///
/// ```text
/// value = mean + 2·K·sqrt(2·ln(parent_visits) / child_visits)
/// ```
///
/// `mean` is expected to be the (possibly normalized) mean reward of the
/// child. A child with zero visits has unbounded urgency.
pub fn ucb1_value(mean: f64, k: f64, parent_visits: u64, child_visits: u64) -> f64 {
    if child_visits == 0 {
        return f64::INFINITY;
    }
    mean + 2.0 * k * (2.0 * (parent_visits as f64).ln() / child_visits as f64).sqrt()
}

/// The outcome of one tree-policy step.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Selected {
    pub action: Action,
    /// True when the action had no visited child yet — the frontier.
    pub unvisited: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StatTree {
    root: StatNode,
    params: UcbParams,
    /// (min, max) fitness observed since the last re-root; drives
    /// normalization for this decision cycle.
    bounds: Option<(f64, f64)>,
}

impl StatTree {
    pub fn new(params: UcbParams) -> Self {
        StatTree {
            root: StatNode::new(),
            params,
            bounds: None,
        }
    }

    pub fn root(&self) -> &StatNode {
        &self.root
    }

    pub fn params(&self) -> UcbParams {
        self.params
    }

    pub fn bounds(&self) -> Option<(f64, f64)> {
        self.bounds
    }

    pub fn is_empty(&self) -> bool {
        self.root.visits == 0
    }

    pub fn node_count(&self) -> usize {
        self.root.node_count()
    }

    /// The node reached by following `path` from the root, if every edge
    /// exists.
    pub fn node_at(&self, path: &[Action]) -> Option<&StatNode> {
        let mut node = &self.root;
        for &a in path {
            node = node.child(a)?;
        }
        Some(node)
    }

    /// Map a raw mean into [0, 1] against the observed fitness bounds.
    /// With no observations or a degenerate range every mean reads as 0,
    /// leaving only the exploration term.
    fn normalized(&self, mean: f64) -> f64 {
        match self.bounds {
            Some((lo, hi)) if hi > lo => (mean - lo) / (hi - lo),
            _ => 0.0,
        }
    }

    /// UCB1 value of `child` under `parent_visits`, with the normalized mean.
    pub fn child_value(&self, parent_visits: u64, child: &StatNode) -> f64 {
        ucb1_value(
            self.normalized(child.mean()),
            self.params.k,
            parent_visits,
            child.visits(),
        )
    }

    /// One step of the tree policy at `node`: any legal action without a
    /// visited child is taken first (uniformly among such), otherwise the
    /// UCB1-maximal child, breaking exact value ties uniformly.
    pub fn select_child(&self, node: &StatNode, legal: &[Action], rng: &mut SeededRng) -> Selected {
        debug_assert!(!legal.is_empty());
        let mut fresh = [Action::Nil; Action::COUNT];
        let mut fresh_n = 0;
        for &a in legal {
            if !node.visited(a) {
                fresh[fresh_n] = a;
                fresh_n += 1;
            }
        }
        if fresh_n > 0 {
            let pick = if fresh_n == 1 {
                fresh[0]
            } else {
                fresh[rng.next_below(fresh_n as u64) as usize]
            };
            return Selected {
                action: pick,
                unvisited: true,
            };
        }
        let n = node.visits();
        let mut best = f64::NEG_INFINITY;
        let mut tied = [Action::Nil; Action::COUNT];
        let mut tied_n = 0;
        for &a in legal {
            let c = node.child(a).expect("visited child exists");
            let v = self.child_value(n, c);
            if v > best {
                best = v;
                tied[0] = a;
                tied_n = 1;
            } else if v == best {
                tied[tied_n] = a;
                tied_n += 1;
            }
        }
        let pick = if tied_n == 1 {
            tied[0]
        } else {
            tied[rng.next_below(tied_n as u64) as usize]
        };
        Selected {
            action: pick,
            unvisited: false,
        }
    }

    /// Record one evaluation: every node along `path` (root included) gains
    /// a visit and the fitness, creating nodes on first traversal. Also
    /// widens this decision's normalization bounds.
    pub fn backpropagate(&mut self, path: &[Action], fitness: f64) {
        self.bounds = Some(match self.bounds {
            None => (fitness, fitness),
            Some((lo, hi)) => (lo.min(fitness), hi.max(fitness)),
        });
        self.root.visits += 1;
        self.root.reward += fitness;
        let mut node = &mut self.root;
        for &a in path {
            let slot = &mut node.children[a.index()];
            let child = slot.get_or_insert_with(|| Box::new(StatNode::new()));
            child.visits += 1;
            child.reward += fitness;
            node = child;
        }
    }

    /// Move the root to the child reached by `fired`, keeping that subtree's
    /// statistics intact and discarding its siblings. Firing an action the
    /// tree never tried resets it. Normalization bounds reset either way —
    /// they belong to the finished decision cycle.
    pub fn reroot(&mut self, fired: Action) {
        let child = self.root.children[fired.index()].take();
        self.root = match child {
            Some(c) => *c,
            None => StatNode::new(),
        };
        self.bounds = None;
    }

    /// The greedy plan: from each node take the visited child with the
    /// highest mean reward (exact ties uniform-random), stopping at the
    /// frontier; the remainder is padded with uniform-random legal actions
    /// so the result is always exactly `len` genes.
    pub fn best_path(&self, len: usize, legal: &[Action], rng: &mut SeededRng) -> Vec<Action> {
        let mut out = Vec::with_capacity(len);
        let mut node = &self.root;
        while out.len() < len {
            let mut best = f64::NEG_INFINITY;
            let mut tied = [Action::Nil; Action::COUNT];
            let mut tied_n = 0;
            for &a in legal {
                if node.visited(a) {
                    let m = node.child(a).unwrap().mean();
                    if m > best {
                        best = m;
                        tied[0] = a;
                        tied_n = 1;
                    } else if m == best {
                        tied[tied_n] = a;
                        tied_n += 1;
                    }
                }
            }
            if tied_n == 0 {
                break;
            }
            let pick = if tied_n == 1 {
                tied[0]
            } else {
                tied[rng.next_below(tied_n as u64) as usize]
            };
            out.push(pick);
            node = node.child(pick).unwrap();
        }
        while out.len() < len {
            out.push(*rng.choose(legal));
        }
        out
    }

    /// A UCB1-guided plan: descend with the tree policy until it steps off
    /// the visited frontier, then pad with uniform-random legal actions.
    pub fn sample_ucb1_sequence(
        &self,
        len: usize,
        legal: &[Action],
        rng: &mut SeededRng,
    ) -> Vec<Action> {
        let mut out = Vec::with_capacity(len);
        let mut node = &self.root;
        while out.len() < len {
            let sel = self.select_child(node, legal, rng);
            out.push(sel.action);
            if sel.unvisited {
                break;
            }
            node = node.child(sel.action).expect("visited child exists");
        }
        while out.len() < len {
            out.push(*rng.choose(legal));
        }
        out
    }

    /// Indented per-node dump (action, visits, cumulative reward) in
    /// canonical action order, for debugging and traces.
    pub fn export_text(&self) -> String {
        fn walk(node: &StatNode, label: &str, depth: usize, out: &mut String) {
            for _ in 0..depth {
                out.push_str("  ");
            }
            out.push_str(&format!(
                "{label} n={} w={}\n",
                node.visits(),
                node.reward()
            ));
            for (a, c) in node.children() {
                walk(c, a.name(), depth + 1, out);
            }
        }
        let mut out = String::new();
        walk(&self.root, "root", 0, &mut out);
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use Action::*;

    fn rng() -> SeededRng {
        SeededRng::new(99, 0)
    }

    #[test]
    fn ucb1_named_fixture() {
        // mean 0.5, K = 1, parent 10, child 2:
        // 0.5 + 2·sqrt(2·ln 10 / 2) = 0.5 + 2·sqrt(ln 10)
        let v = ucb1_value(0.5, 1.0, 10, 2);
        assert!((v - 3.5348542587702925).abs() < 1e-12, "got {v}");
    }

    #[test]
    fn ucb1_zero_child_visits_is_infinite() {
        assert_eq!(ucb1_value(0.3, 1.0, 5, 0), f64::INFINITY);
    }

    #[test]
    fn backpropagate_single_path() {
        let mut t = StatTree::new(UcbParams::default());
        t.backpropagate(&[Up, Up], 3.0);
        assert_eq!(t.root().visits(), 1);
        assert_eq!(t.root().reward(), 3.0);
        let c = t.root().child(Up).unwrap();
        assert_eq!((c.visits(), c.reward()), (1, 3.0));
        let g = c.child(Up).unwrap();
        assert_eq!((g.visits(), g.reward()), (1, 3.0));
        assert_eq!(t.node_count(), 3);
    }

    #[test]
    fn backpropagate_additivity() {
        let mut t = StatTree::new(UcbParams::default());
        t.backpropagate(&[Left, Right], 1.0);
        t.backpropagate(&[Left, Right], 5.0);
        let leaf = t.node_at(&[Left, Right]).unwrap();
        assert_eq!(leaf.visits(), 2);
        assert_eq!(leaf.reward(), 6.0);
        assert_eq!(leaf.mean(), 3.0);
    }

    #[test]
    fn conservation_over_random_scripts() {
        let mut r = rng();
        for _ in 0..50 {
            let mut t = StatTree::new(UcbParams::default());
            let calls = 1 + r.next_below(40) as usize;
            let mut sum = 0.0;
            for _ in 0..calls {
                let depth = r.next_below(6) as usize;
                let path: Vec<Action> = (0..depth)
                    .map(|_| Action::ALL[r.next_below(7) as usize])
                    .collect();
                let fit = (r.next_f64() - 0.3) * 17.0;
                sum += fit;
                t.backpropagate(&path, fit);
            }
            assert_eq!(t.root().visits(), calls as u64);
            assert_eq!(t.root().reward(), sum, "exact f64 accumulation");
        }
    }

    #[test]
    fn children_visits_never_exceed_parent() {
        let mut r = rng();
        let mut t = StatTree::new(UcbParams::default());
        for _ in 0..200 {
            let depth = r.next_below(5) as usize;
            let path: Vec<Action> = (0..depth)
                .map(|_| Action::ALL[r.next_below(7) as usize])
                .collect();
            t.backpropagate(&path, r.next_f64());
        }
        fn check(node: &StatNode) {
            let child_sum: u64 = node.children().map(|(_, c)| c.visits()).sum();
            assert!(child_sum <= node.visits());
            for (_, c) in node.children() {
                check(c);
            }
        }
        check(t.root());
    }

    #[test]
    fn select_prefers_unvisited_then_ucb1_max() {
        let mut t = StatTree::new(UcbParams::default());
        let legal = &[Up, Down, Left][..];
        t.backpropagate(&[Up], 1.0);
        t.backpropagate(&[Down], 5.0);
        let mut r = rng();
        // Left is unvisited: always chosen regardless of values.
        for _ in 0..20 {
            let s = t.select_child(t.root(), legal, &mut r);
            assert_eq!(s.action, Left);
            assert!(s.unvisited);
        }
        let mut t = t;
        t.backpropagate(&[Left], 0.0);
        // All visited now; Down has the best mean and equal visits.
        let s = t.select_child(t.root(), legal, &mut r);
        assert_eq!(s.action, Down);
        assert!(!s.unvisited);
    }

    #[test]
    fn select_breaks_exact_ties_uniformly() {
        let mut t = StatTree::new(UcbParams::default());
        let legal = &[Up, Down][..];
        t.backpropagate(&[Up], 2.0);
        t.backpropagate(&[Down], 2.0);
        let mut r = rng();
        let mut up = 0u32;
        let n = 20_000;
        for _ in 0..n {
            if t.select_child(t.root(), legal, &mut r).action == Up {
                up += 1;
            }
        }
        let frac = up as f64 / n as f64;
        assert!((frac - 0.5).abs() < 0.02, "up fraction {frac}");
    }

    #[test]
    fn unvisited_ties_also_uniform() {
        let t = StatTree::new(UcbParams::default());
        let legal = &[Left, Right][..];
        let mut r = rng();
        let mut left = 0u32;
        let n = 20_000;
        for _ in 0..n {
            if t.select_child(t.root(), legal, &mut r).action == Left {
                left += 1;
            }
        }
        let frac = left as f64 / n as f64;
        assert!((frac - 0.5).abs() < 0.02, "left fraction {frac}");
    }

    #[test]
    fn normalization_uses_observed_bounds_and_degenerate_range_reads_zero() {
        let mut t = StatTree::new(UcbParams::default());
        t.backpropagate(&[Up], 10.0);
        t.backpropagate(&[Down], 30.0);
        assert_eq!(t.bounds(), Some((10.0, 30.0)));
        let up = t.root().child(Up).unwrap();
        let down = t.root().child(Down).unwrap();
        // Means 10 and 30 normalize to 0 and 1.
        let vu = t.child_value(2, up);
        let vd = t.child_value(2, down);
        let explore = 2.0 * (2.0 * (2f64).ln() / 1.0).sqrt();
        assert!((vu - explore).abs() < 1e-12);
        assert!((vd - (1.0 + explore)).abs() < 1e-12);

        let mut flat = StatTree::new(UcbParams::default());
        flat.backpropagate(&[Up], 7.0);
        flat.backpropagate(&[Down], 7.0);
        let fu = flat.child_value(2, flat.root().child(Up).unwrap());
        assert!((fu - explore).abs() < 1e-12, "degenerate range → mean reads 0");
    }

    #[test]
    fn reroot_promotes_subtree_bit_for_bit() {
        let mut t = StatTree::new(UcbParams::default());
        let mut r = rng();
        for _ in 0..100 {
            let depth = 1 + r.next_below(4) as usize;
            let path: Vec<Action> = (0..depth)
                .map(|_| Action::ALL[r.next_below(3) as usize])
                .collect();
            t.backpropagate(&path, r.next_f64() * 9.0);
        }
        let snapshot = t.root().child(Up).cloned();
        t.reroot(Up);
        assert_eq!(Some(t.root().clone()), snapshot);
        assert_eq!(t.bounds(), None, "bounds reset on reroot");
    }

    #[test]
    fn reroot_on_unvisited_action_resets() {
        let mut t = StatTree::new(UcbParams::default());
        t.backpropagate(&[Up, Up], 4.0);
        t.reroot(Escape);
        assert!(t.is_empty());
        assert_eq!(t.node_count(), 1);
    }

    #[test]
    fn best_path_follows_means_not_ucb() {
        let mut t = StatTree::new(UcbParams::default());
        // Up: mean 4 from one visit. Down: mean 3 from three visits.
        t.backpropagate(&[Up, Left], 4.0);
        t.backpropagate(&[Down, Right], 3.0);
        t.backpropagate(&[Down, Right], 3.0);
        t.backpropagate(&[Down, Left], 3.0);
        let mut r = rng();
        let legal = &[Up, Down, Left, Right][..];
        let p = t.best_path(4, legal, &mut r);
        assert_eq!(p.len(), 4);
        assert_eq!(p[0], Up, "argmax mean, not argmax visits");
        assert_eq!(p[1], Left, "greedy continues inside the subtree");
    }

    #[test]
    fn best_path_pads_to_exact_length_on_empty_tree() {
        let t = StatTree::new(UcbParams::default());
        let mut r = rng();
        let legal = &[Up, Down, Nil][..];
        let p = t.best_path(14, legal, &mut r);
        assert_eq!(p.len(), 14);
        assert!(p.iter().all(|a| legal.contains(a)));
    }

    #[test]
    fn sample_sequence_takes_frontier_then_pads() {
        let mut t = StatTree::new(UcbParams::default());
        let legal = &[Up, Down][..];
        t.backpropagate(&[Up], 1.0);
        // Down is unvisited at the root: every sample starts by exploring it
        // (frontier rule), then pads randomly.
        let mut r = rng();
        for _ in 0..10 {
            let s = t.sample_ucb1_sequence(5, legal, &mut r);
            assert_eq!(s.len(), 5);
            assert_eq!(s[0], Down);
            assert!(s.iter().all(|a| legal.contains(a)));
        }
    }

    #[test]
    fn export_text_lists_nodes_in_canonical_order() {
        let mut t = StatTree::new(UcbParams::default());
        t.backpropagate(&[Down], 1.0);
        t.backpropagate(&[Up], 2.0);
        let text = t.export_text();
        let lines: Vec<&str> = text.lines().collect();
        assert!(lines[0].starts_with("root n=2"));
        assert!(lines[1].trim_start().starts_with("up n=1"), "{text}");
        assert!(lines[2].trim_start().starts_with("down n=1"), "{text}");
    }
}
