//! Result statistics: sample summaries, the Formula-1 ranking scheme
//! used to aggregate per-game results, and the Mann-Whitney U test
//! used for pairwise significance at the 5% level.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::rng::SeededRng;

/// Two-sided significance threshold used throughout the reports.
pub const SIGNIFICANCE_LEVEL: f64 = 0.05;

/// Points awarded to ranked entrants, best first. A comparison of k
/// agents hands out the first k entries; positions beyond the vector
/// score zero.
pub const F1_POINTS: [u32; 10] = [25, 18, 15, 12, 10, 8, 6, 4, 2, 1];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StatError {
    #[error("sample must contain at least one value")]
    EmptySample,
    #[error("sample contains a non-finite value")]
    NonFinite,
    #[error("duplicate agent `{0}` in one game's standings")]
    DuplicateAgent(String),
    #[error("agent sets differ across per-game point assignments")]
    AgentSetMismatch,
}

/// Count, mean, and sample standard deviation of one batch of values.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampleSummary {
    pub n: usize,
    pub mean: f64,
    pub sd: f64,
}

impl SampleSummary {
    /// Summarize `values`. The deviation uses the n−1 denominator and
    /// is 0 for a single observation.
    pub fn of(values: &[f64]) -> Result<SampleSummary, StatError> {
        if values.is_empty() {
            return Err(StatError::EmptySample);
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(StatError::NonFinite);
        }
        let n = values.len();
        let mean = values.iter().sum::<f64>() / n as f64;
        let sd = if n < 2 {
            0.0
        } else {
            let ss = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>();
            (ss / (n - 1) as f64).sqrt()
        };
        Ok(SampleSummary { n, mean, sd })
    }
}

/// One agent's result on one game, ready for ranking.
#[derive(Debug, Clone, PartialEq)]
pub struct GameStanding {
    pub agent: String,
    pub win_rate: f64,
    pub mean_score: f64,
}

/// Rank one game's standings and hand out points: descending win rate,
/// ties broken by descending mean score, residual exact ties ordered
/// uniformly at random from `rng` (so reruns with the same seed agree).
pub fn f1_points_for_game(
    standings: &[GameStanding],
    rng: &mut SeededRng,
) -> Result<BTreeMap<String, u32>, StatError> {
    if standings.is_empty() {
        return Err(StatError::EmptySample);
    }
    for s in standings {
        if !s.win_rate.is_finite() || !s.mean_score.is_finite() {
            return Err(StatError::NonFinite);
        }
    }
    {
        let mut seen = std::collections::BTreeSet::new();
        for s in standings {
            if !seen.insert(s.agent.as_str()) {
                return Err(StatError::DuplicateAgent(s.agent.clone()));
            }
        }
    }
    let mut order: Vec<usize> = (0..standings.len()).collect();
    order.sort_by(|&i, &j| {
        standings[j]
            .win_rate
            .partial_cmp(&standings[i].win_rate)
            .unwrap()
            .then(
                standings[j]
                    .mean_score
                    .partial_cmp(&standings[i].mean_score)
                    .unwrap(),
            )
            .then(i.cmp(&j))
    });
    // Shuffle inside runs of exactly equal (win rate, score) so the
    // residual order carries no index bias.
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        let key = |idx: usize| (standings[idx].win_rate, standings[idx].mean_score);
        while end < order.len() && key(order[end]) == key(order[start]) {
            end += 1;
        }
        if end - start > 1 {
            rng.shuffle(&mut order[start..end]);
        }
        start = end;
    }
    let mut points = BTreeMap::new();
    for (pos, &idx) in order.iter().enumerate() {
        let award = F1_POINTS.get(pos).copied().unwrap_or(0);
        points.insert(standings[idx].agent.clone(), award);
    }
    Ok(points)
}

/// Sum per-game point assignments into season totals. Every assignment
/// must rank exactly the same set of agents.
pub fn f1_aggregate(
    assignments: &[BTreeMap<String, u32>],
) -> Result<BTreeMap<String, u64>, StatError> {
    if assignments.is_empty() {
        return Err(StatError::EmptySample);
    }
    let mut totals: BTreeMap<String, u64> = assignments[0]
        .keys()
        .map(|k| (k.clone(), 0u64))
        .collect();
    for assignment in assignments {
        if assignment.len() != totals.len()
            || !assignment.keys().all(|k| totals.contains_key(k))
        {
            return Err(StatError::AgentSetMismatch);
        }
        for (agent, pts) in assignment {
            *totals.get_mut(agent).expect("key checked above") += *pts as u64;
        }
    }
    Ok(totals)
}

/// How a Mann-Whitney p-value was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UMethod {
    /// Exact enumeration of the null distribution of U.
    Exact,
    /// Normal approximation with tie and continuity corrections.
    NormalApprox,
}

/// Result of a two-sided Mann-Whitney U test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UTestResult {
    /// U statistic of the first sample (midrank-based; fractional under ties).
    pub u: f64,
    /// Two-sided p-value.
    pub p: f64,
    /// Whether p < [`SIGNIFICANCE_LEVEL`].
    pub significant: bool,
    pub method: UMethod,
}

/// Largest per-sample size for which the production test uses exact
/// enumeration (given a tie-free pooled sample).
pub const EXACT_LIMIT: usize = 10;

/// Two-sided Mann-Whitney U test of `a` against `b`. Exact when both
/// samples have at most [`EXACT_LIMIT`] values and the pooled sample is
/// tie-free; the tie- and continuity-corrected normal approximation
/// otherwise. Two samples with all values identical give p = 1.
pub fn mann_whitney(a: &[f64], b: &[f64]) -> Result<UTestResult, StatError> {
    if a.is_empty() || b.is_empty() {
        return Err(StatError::EmptySample);
    }
    if a.iter().chain(b).any(|v| !v.is_finite()) {
        return Err(StatError::NonFinite);
    }
    let n = a.len();
    let m = b.len();

    // Midranks over the pooled sample, tallying tie-group sizes.
    let mut pooled: Vec<(f64, bool)> = a
        .iter()
        .map(|&v| (v, true))
        .chain(b.iter().map(|&v| (v, false)))
        .collect();
    pooled.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap());
    let total = pooled.len();
    let mut rank_sum_a = 0.0f64;
    let mut tie_term = 0.0f64; // Σ (t³ − t) over tie groups
    let mut any_tie = false;
    let mut i = 0;
    while i < total {
        let mut j = i + 1;
        while j < total && pooled[j].0 == pooled[i].0 {
            j += 1;
        }
        let t = j - i;
        if t > 1 {
            any_tie = true;
            tie_term += (t * t * t - t) as f64;
        }
        // Ranks are 1-based; a run spanning positions i..j shares the
        // average of ranks i+1 ..= j.
        let midrank = (i + 1 + j) as f64 / 2.0;
        for k in i..j {
            if pooled[k].1 {
                rank_sum_a += midrank;
            }
        }
        i = j;
    }
    let u = rank_sum_a - (n * (n + 1)) as f64 / 2.0;
    let nm = (n * m) as f64;

    let (p, method) = if n <= EXACT_LIMIT && m <= EXACT_LIMIT && !any_tie {
        (exact_two_sided_p(u.round() as u64, n, m), UMethod::Exact)
    } else {
        let mu = nm / 2.0;
        let nf = total as f64;
        let variance = nm / 12.0 * ((nf + 1.0) - tie_term / (nf * (nf - 1.0)));
        if variance <= 0.0 {
            // Every pooled value identical: no evidence either way.
            (1.0, UMethod::NormalApprox)
        } else {
            let z = ((u - mu).abs() - 0.5).max(0.0) / variance.sqrt();
            (erfc(z / std::f64::consts::SQRT_2).min(1.0), UMethod::NormalApprox)
        }
    };
    Ok(UTestResult {
        u,
        p,
        significant: p < SIGNIFICANCE_LEVEL,
        method,
    })
}

/// Exact two-sided p-value for an observed U with sample sizes n and m
/// under the tie-free null: twice the smaller tail of the enumerated
/// distribution, capped at 1. Exposed so approximation accuracy can be
/// audited at sizes beyond the production cutover.
pub fn exact_two_sided_p(u_obs: u64, n: usize, m: usize) -> f64 {
    let counts = u_distribution(n, m);
    let total: f64 = counts.iter().sum();
    let u = (u_obs as usize).min(counts.len() - 1);
    let lower: f64 = counts[..=u].iter().sum();
    let upper: f64 = counts[u..].iter().sum();
    (2.0 * (lower.min(upper)) / total).min(1.0)
}

/// Number of rank arrangements of i-vs-j samples yielding each U value
/// 0..=n·m. Recurrence on the largest pooled value: if it belongs to
/// the first sample it outranks all j second-sample values (U gains j),
/// otherwise U is unchanged. Counts stay far below 2^53 at every size
/// the harness reaches, so f64 arithmetic here is exact.
fn u_distribution(n: usize, m: usize) -> Vec<f64> {
    let width = n * m + 1;
    let mut f = vec![vec![vec![0.0f64; width]; m + 1]; n + 1];
    for j in 0..=m {
        f[0][j][0] = 1.0;
    }
    for i in 1..=n {
        f[i][0][0] = 1.0;
        for j in 1..=m {
            for u in 0..=i * j {
                let from_a = if u >= j { f[i - 1][j][u - j] } else { 0.0 };
                let from_b = f[i][j - 1][u];
                f[i][j][u] = from_a + from_b;
            }
        }
    }
    f.swap_remove(n).swap_remove(m)
}

/// Complementary error function (rational Chebyshev fit; absolute error
/// below 1.3e-7, ample for two-digit p-value reporting).
fn erfc(x: f64) -> f64 {
    let z = x.abs();
    let t = 1.0 / (1.0 + 0.5 * z);
    let ans = t
        * (-z * z - 1.26551223
            + t * (1.00002368
                + t * (0.37409196
                    + t * (0.09678418
                        + t * (-0.18628806
                            + t * (0.27886807
                                + t * (-1.13520398
                                    + t * (1.48851587
                                        + t * (-0.82215223 + t * 0.17087277)))))))))
        .exp();
    if x >= 0.0 {
        ans
    } else {
        2.0 - ans
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn summary_mean_and_sample_deviation() {
        let s = SampleSummary::of(&[2.0, 4.0, 4.0, 4.0, 5.0, 5.0, 7.0, 9.0]).unwrap();
        assert_eq!(s.n, 8);
        assert!((s.mean - 5.0).abs() < 1e-12);
        assert!((s.sd - (32.0f64 / 7.0).sqrt()).abs() < 1e-12);
        assert_eq!(SampleSummary::of(&[3.5]).unwrap().sd, 0.0);
        assert_eq!(SampleSummary::of(&[]), Err(StatError::EmptySample));
    }

    fn standings(rows: &[(&str, f64, f64)]) -> Vec<GameStanding> {
        rows.iter()
            .map(|(a, w, s)| GameStanding {
                agent: a.to_string(),
                win_rate: *w,
                mean_score: *s,
            })
            .collect()
    }

    #[test]
    fn points_follow_win_rate_then_score() {
        let mut rng = SeededRng::new(1, 0);
        let pts = f1_points_for_game(
            &standings(&[("a", 0.9, 0.0), ("b", 0.7, 0.0), ("c", 0.5, 0.0), ("d", 0.1, 0.0)]),
            &mut rng,
        )
        .unwrap();
        assert_eq!(pts["a"], 25);
        assert_eq!(pts["b"], 18);
        assert_eq!(pts["c"], 15);
        assert_eq!(pts["d"], 12);

        let pts = f1_points_for_game(
            &standings(&[("a", 0.7, 10.0), ("b", 0.7, 8.0), ("c", 0.1, 0.0), ("d", 0.0, 0.0)]),
            &mut rng,
        )
        .unwrap();
        assert_eq!(pts["a"], 25, "score breaks the win-rate tie");
        assert_eq!(pts["b"], 18);
    }

    #[test]
    fn residual_ties_are_random_but_seeded() {
        let tied = standings(&[("a", 0.5, 1.0), ("b", 0.5, 1.0), ("c", 0.5, 1.0)]);
        let mut hits_a = 0;
        for stream in 0..300 {
            let mut rng = SeededRng::new(7, stream);
            let pts = f1_points_for_game(&tied, &mut rng).unwrap();
            let mut vals: Vec<u32> = pts.values().copied().collect();
            vals.sort_unstable();
            assert_eq!(vals, vec![15, 18, 25]);
            if pts["a"] == 25 {
                hits_a += 1;
            }
        }
        assert!(
            (60..=140).contains(&hits_a),
            "agent a won the shuffle {hits_a}/300 times"
        );
        let mut r1 = SeededRng::new(7, 0);
        let mut r2 = SeededRng::new(7, 0);
        assert_eq!(
            f1_points_for_game(&tied, &mut r1).unwrap(),
            f1_points_for_game(&tied, &mut r2).unwrap()
        );
    }

    #[test]
    fn five_entrants_extend_the_point_vector() {
        let mut rng = SeededRng::new(2, 0);
        let pts = f1_points_for_game(
            &standings(&[
                ("a", 0.9, 0.0),
                ("b", 0.8, 0.0),
                ("c", 0.7, 0.0),
                ("d", 0.6, 0.0),
                ("e", 0.5, 0.0),
            ]),
            &mut rng,
        )
        .unwrap();
        assert_eq!(pts["e"], 10, "fifth place takes the fifth vector entry");
    }

    #[test]
    fn duplicate_agents_rejected() {
        let mut rng = SeededRng::new(3, 0);
        let err = f1_points_for_game(
            &standings(&[("a", 0.9, 0.0), ("a", 0.8, 0.0)]),
            &mut rng,
        )
        .unwrap_err();
        assert_eq!(err, StatError::DuplicateAgent("a".into()));
    }

    #[test]
    fn aggregate_sums_and_rejects_mismatched_agent_sets() {
        let g1: BTreeMap<String, u32> =
            [("a".into(), 25u32), ("b".into(), 18u32)].into_iter().collect();
        let g2: BTreeMap<String, u32> =
            [("a".into(), 18u32), ("b".into(), 25u32)].into_iter().collect();
        let totals = f1_aggregate(&[g1.clone(), g2]).unwrap();
        assert_eq!(totals["a"], 43);
        assert_eq!(totals["b"], 43);
        let odd: BTreeMap<String, u32> = [("a".into(), 25u32), ("c".into(), 18u32)]
            .into_iter()
            .collect();
        assert_eq!(
            f1_aggregate(&[g1, odd]).unwrap_err(),
            StatError::AgentSetMismatch
        );
    }

    #[test]
    fn fully_separated_small_samples_exact_p() {
        let r = mann_whitney(&[1.0, 2.0, 3.0], &[4.0, 5.0, 6.0]).unwrap();
        assert_eq!(r.method, UMethod::Exact);
        assert_eq!(r.u, 0.0);
        assert!((r.p - 0.1).abs() < 1e-12, "p = {}", r.p);
        assert!(!r.significant);
    }

    #[test]
    fn identical_samples_are_never_significant() {
        let r = mann_whitney(&[2.0, 2.0, 2.0], &[2.0, 2.0]).unwrap();
        assert_eq!(r.p, 1.0);
        assert!(!r.significant);
        assert_eq!(r.u, 3.0, "all-midrank U equals nm/2");
    }

    #[test]
    fn u_statistics_of_both_orientations_sum_to_nm() {
        let a = [1.0, 3.0, 3.0, 7.0, 9.0];
        let b = [2.0, 3.0, 5.0, 8.0];
        let ab = mann_whitney(&a, &b).unwrap();
        let ba = mann_whitney(&b, &a).unwrap();
        assert!((ab.u + ba.u - 20.0).abs() < 1e-12);
        assert!((ab.p - ba.p).abs() < 1e-12, "two-sided p is symmetric");
    }

    #[test]
    fn ties_route_to_the_corrected_normal_approximation() {
        let a = [1.0, 2.0, 2.0, 4.0];
        let b = [2.0, 3.0, 5.0, 6.0];
        let r = mann_whitney(&a, &b).unwrap();
        assert_eq!(r.method, UMethod::NormalApprox);
        assert!(r.p > 0.0 && r.p <= 1.0);
    }

    #[test]
    fn large_samples_route_to_normal_approximation() {
        let a: Vec<f64> = (0..11).map(|i| i as f64 * 2.0).collect();
        let b: Vec<f64> = (0..11).map(|i| i as f64 * 2.0 + 1.0).collect();
        let r = mann_whitney(&a, &b).unwrap();
        assert_eq!(r.method, UMethod::NormalApprox);
    }

    #[test]
    fn empty_samples_rejected() {
        assert_eq!(mann_whitney(&[], &[1.0]), Err(StatError::EmptySample));
        assert_eq!(mann_whitney(&[1.0], &[]), Err(StatError::EmptySample));
    }

    #[test]
    fn u_distribution_matches_hand_counts() {
        // n=1, m=1: U uniform on {0, 1}.
        assert_eq!(u_distribution(1, 1), vec![1.0, 1.0]);
        // n=2, m=2: C(4,2)=6 arrangements, U-counts 1,1,2,1,1.
        assert_eq!(u_distribution(2, 2), vec![1.0, 1.0, 2.0, 1.0, 1.0]);
        // Totals are binomial coefficients.
        let d = u_distribution(3, 3);
        assert_eq!(d.iter().sum::<f64>(), 20.0);
        // Symmetry of the null distribution.
        let d = u_distribution(4, 6);
        let total = 4 * 6;
        for u in 0..=total {
            assert_eq!(d[u], d[total - u]);
        }
    }

    #[test]
    fn erfc_reference_points() {
        assert!((erfc(0.0) - 1.0).abs() < 1e-7);
        assert!((erfc(1.0) - 0.15729920705028513).abs() < 1e-7);
        assert!((erfc(-1.0) - 1.8427007929497148).abs() < 1e-7);
        assert!(erfc(6.0) < 1e-15);
    }
}
