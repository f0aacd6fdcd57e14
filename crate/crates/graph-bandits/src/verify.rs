//! Brute-force oracles and randomized property suites for the graph
//! inequalities the algorithms' guarantees rest on.
//!
//! Each suite draws a stream of random digraph instances — forced
//! structured families first (clique, empty graph, total order, star,
//! cycle), then Erdős–Rényi draws with arc density sampled uniformly from
//! {0.1, …, 0.9} — and checks one inequality per instance against an
//! oracle computed exactly and independently of the fast code path it
//! certifies. Violations are returned as data, never panics: a
//! [`CheckReport`] carries every failing instance serialized in the graph
//! file format, ready to replay.
//!
//! Suites are deterministic given `(trials, max_k, seed)`: trial `t` runs
//! on its own substream derived from the suite seed, so results are
//! independent of thread count and any failure reproduces in isolation.
//!
//! All real-valued comparisons use the shared tolerance [`CHECK_TOL`]; the
//! bounds are analytic, so slack beyond floating-point error indicates a
//! real bug rather than noise.

use rand::Rng;

use crate::error::{Error, Result};
use crate::estimators::{exposure, observation_probs, Distribution};
use crate::graph::{
    generate, greedy_dominating_set, independence_number, mas_size, to_graph_file, FeedbackGraph,
    GraphKind, MasMode,
};
use crate::par::indexed_map;
use crate::policies::{elpp_beta, ActDetail, ElpP, Policy};
use crate::rng::{derive_seed, rng_from_seed, SimRng};

/// Tolerance for every real-valued inequality checked by the suites.
pub const CHECK_TOL: f64 = 1e-9;

/// Largest `k` for which [`domination_number`] enumerates exactly.
pub const DOMINATION_EXACT_CAP: usize = 20;

/// Largest `k` for which [`lp_value_by_enumeration`] is practical.
pub const LP_ENUMERATION_CAP: usize = 8;

/// One violated check: the instance that broke the inequality, what was
/// being checked, and by how much.
#[derive(Clone, Debug, PartialEq)]
pub struct Failure {
    /// The offending graph, serialized in the graph file format.
    pub instance: String,
    /// Which inequality failed, with the numbers involved.
    pub detail: String,
    /// Bound minus quantity; negative beyond [`CHECK_TOL`] by definition
    /// of failure.
    pub slack: f64,
}

/// Outcome of one suite run. Failures empty if and only if the suite
/// passed.
#[derive(Clone, Debug, PartialEq)]
pub struct CheckReport {
    /// Suite name as used by the command line.
    pub suite: String,
    /// Trials run.
    pub trials: u64,
    /// Every violated check.
    pub failures: Vec<Failure>,
    /// Largest bound-minus-quantity seen across all checks (equality
    /// checks contribute their negated deviation).
    pub max_slack: f64,
}

impl CheckReport {
    /// Whether every check held.
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Exact domination number: the size of a smallest set whose members'
/// observation sets jointly cover every node.
///
/// Enumerates candidate sets in increasing size with bitmask unions, so it
/// shares no logic with the greedy cover it certifies. Errors with
/// `CapacityExceeded` past [`DOMINATION_EXACT_CAP`].
pub fn domination_number(g: &FeedbackGraph) -> Result<usize> {
    let k = g.k();
    if k > DOMINATION_EXACT_CAP {
        return Err(Error::CapacityExceeded {
            what: "exact domination number",
            k,
            cap: DOMINATION_EXACT_CAP,
        });
    }
    let cover: Vec<u32> = (0..k)
        .map(|i| {
            g.observation_set(i)
                .into_iter()
                .fold(0u32, |m, j| m | (1 << j))
        })
        .collect();
    let full: u32 = if k == 32 { u32::MAX } else { (1 << k) - 1 };
    // The greedy set dominates, so the answer is at most its size; the
    // first set size with a dominating candidate is exact.
    let greedy_size = greedy_dominating_set(g).len();
    for size in 1..=greedy_size {
        let mut mask: u32 = (1 << size) - 1;
        while mask < (1u32 << k) {
            let mut union = 0u32;
            let mut rest = mask;
            while rest != 0 {
                let i = rest.trailing_zeros() as usize;
                union |= cover[i];
                rest &= rest - 1;
            }
            if union == full {
                return Ok(size);
            }
            // Next mask with the same number of set bits (Gosper's hack).
            let c = mask & mask.wrapping_neg();
            let r = mask + c;
            mask = (((r ^ mask) >> 2) / c) | r;
        }
    }
    Ok(greedy_size)
}

/// Exact optimum of the max-min coverage program by exhaustive vertex
/// enumeration, independent of the iterative solver it certifies.
///
/// The program in equality form has variables `(s_1..s_k, t, w_1..w_k)`
/// with rows `coverage_i(s) - t - w_i = 0` and `sum(s) = 1`; every vertex
/// of the feasible region is a basic solution, so trying all column bases
/// of the `(k+1) x (2k+1)` system and keeping the best feasible value is
/// exact. Cost grows as `C(2k+1, k+1)`; errors past
/// [`LP_ENUMERATION_CAP`].
pub fn lp_value_by_enumeration(g: &FeedbackGraph) -> Result<f64> {
    let k = g.k();
    if k > LP_ENUMERATION_CAP {
        return Err(Error::CapacityExceeded {
            what: "coverage program vertex enumeration",
            k,
            cap: LP_ENUMERATION_CAP,
        });
    }
    let rows = k + 1;
    let cols = 2 * k + 1;
    // column(j)[row]: coefficients of the equality system.
    let column = |j: usize| -> Vec<f64> {
        let mut col = vec![0.0; rows];
        if j < k {
            for i in 0..k {
                if g.observes(j, i) {
                    col[i] = 1.0;
                }
            }
            col[k] = 1.0;
        } else if j == k {
            for slot in col.iter_mut().take(k) {
                *slot = -1.0;
            }
        } else {
            col[j - k - 1] = -1.0;
        }
        col
    };
    let mut best = f64::NEG_INFINITY;
    let mut basis: Vec<usize> = (0..rows).collect();
    loop {
        if let Some(x) = solve_square(&basis, &column, rows) {
            if x.iter().all(|&v| v >= -CHECK_TOL) {
                let value = basis
                    .iter()
                    .position(|&j| j == k)
                    .map_or(0.0, |pos| x[pos]);
                if value > best {
                    best = value;
                }
            }
        }
        // Advance to the next index combination in lexicographic order.
        let mut i = rows;
        loop {
            if i == 0 {
                return Ok(best);
            }
            i -= 1;
            if basis[i] != i + cols - rows {
                break;
            }
        }
        basis[i] += 1;
        for j in i + 1..rows {
            basis[j] = basis[j - 1] + 1;
        }
    }
}

/// Solves the square system formed by the chosen columns against the
/// right-hand side `(0, …, 0, 1)`. Returns `None` when the basis matrix is
/// numerically singular.
fn solve_square(basis: &[usize], column: &dyn Fn(usize) -> Vec<f64>, rows: usize) -> Option<Vec<f64>> {
    let mut a = vec![0.0f64; rows * rows];
    for (c, &j) in basis.iter().enumerate() {
        let col = column(j);
        for r in 0..rows {
            a[r * rows + c] = col[r];
        }
    }
    let mut b = vec![0.0f64; rows];
    b[rows - 1] = 1.0;
    for pivot in 0..rows {
        let (best_row, best_abs) = (pivot..rows)
            .map(|r| (r, a[r * rows + pivot].abs()))
            .fold((pivot, 0.0), |acc, cur| if cur.1 > acc.1 { cur } else { acc });
        if best_abs < 1e-9 {
            return None;
        }
        if best_row != pivot {
            for c in 0..rows {
                a.swap(pivot * rows + c, best_row * rows + c);
            }
            b.swap(pivot, best_row);
        }
        let diag = a[pivot * rows + pivot];
        for r in pivot + 1..rows {
            let factor = a[r * rows + pivot] / diag;
            if factor == 0.0 {
                continue;
            }
            for c in pivot..rows {
                a[r * rows + c] -= factor * a[pivot * rows + c];
            }
            b[r] -= factor * b[pivot];
        }
    }
    let mut x = vec![0.0f64; rows];
    for r in (0..rows).rev() {
        let mut acc = b[r];
        for c in r + 1..rows {
            acc -= a[r * rows + c] * x[c];
        }
        x[r] = acc / a[r * rows + r];
    }
    Some(x)
}

/// Instance for trial `t`: five structured families at `max_k` first,
/// then Erdős–Rényi draws with `k` uniform in `2..=max_k` and density
/// uniform over {0.1, …, 0.9}.
fn trial_graph(trial: u64, max_k: usize, rng: &mut SimRng) -> Result<FeedbackGraph> {
    let kind = match trial {
        0 => GraphKind::Clique,
        1 => GraphKind::Empty,
        2 => GraphKind::TotalOrder,
        3 => GraphKind::Symmetric {
            edges: (1..max_k).map(|i| (0, i)).collect(),
        },
        4 => GraphKind::Symmetric {
            edges: if max_k == 2 {
                vec![(0, 1)]
            } else {
                (0..max_k).map(|i| (i, (i + 1) % max_k)).collect()
            },
        },
        _ => {
            let k = rng.gen_range(2..=max_k);
            let density = f64::from(rng.gen_range(1..=9u32)) / 10.0;
            return generate(&GraphKind::ErdosRenyi { density }, k, rng);
        }
    };
    generate(&kind, max_k, rng)
}

fn validate_suite_args(trials: u64, max_k: usize, cap: usize) -> Result<()> {
    if trials == 0 {
        return Err(Error::invalid("suite needs at least one trial"));
    }
    if max_k < 2 || max_k > cap {
        return Err(Error::invalid(format!(
            "max_k must lie in [2, {cap}] for this suite, got {max_k}"
        )));
    }
    Ok(())
}

/// Runs the per-trial closure over derived substreams, classifying each
/// returned `(description, slack)` pair and serializing the instance only
/// when it failed.
fn run_trials<F>(
    suite: &str,
    trials: u64,
    threads: Option<usize>,
    seed: u64,
    per_trial: F,
) -> Result<CheckReport>
where
    F: Fn(u64, &mut SimRng) -> Result<(FeedbackGraph, Vec<(String, f64)>)> + Sync + Send,
{
    let outcomes = indexed_map(trials as usize, threads, |t| {
        let mut rng = rng_from_seed(derive_seed(seed, t as u64));
        per_trial(t as u64, &mut rng)
    });
    let mut failures = Vec::new();
    let mut max_slack = f64::NEG_INFINITY;
    for outcome in outcomes {
        let (graph, checks) = outcome?;
        for (detail, slack) in checks {
            if slack > max_slack {
                max_slack = slack;
            }
            if slack < -CHECK_TOL {
                failures.push(Failure {
                    instance: to_graph_file(&graph),
                    detail,
                    slack,
                });
            }
        }
    }
    Ok(CheckReport {
        suite: suite.into(),
        trials,
        failures,
        max_slack,
    })
}

/// Checks `exposure(p, G) <= mas(G)` on random instances with random
/// interior distributions, using the exact acyclic-subgraph oracle.
pub fn check_exposure_vs_mas(
    trials: u64,
    max_k: usize,
    seed: u64,
    threads: Option<usize>,
) -> Result<CheckReport> {
    validate_suite_args(trials, max_k, 12)?;
    run_trials("exposure", trials, threads, seed, |t, rng| {
        let g = trial_graph(t, max_k, rng)?;
        let p = Distribution::random(g.k(), rng)?;
        let q = exposure(&p, &g)?;
        let mas = mas_size(&g, MasMode::Exact)? as f64;
        let checks = vec![(
            format!("exposure {q} exceeds acyclic-subgraph size {mas}"),
            mas - q,
        )];
        Ok((g, checks))
    })
}

/// Checks the indegree sum bound
/// `sum_i 1/(1 + indegree_i) <= 2 alpha ln(1 + k/alpha)`
/// with the exact independence number.
pub fn check_indegree_sum(
    trials: u64,
    max_k: usize,
    seed: u64,
    threads: Option<usize>,
) -> Result<CheckReport> {
    validate_suite_args(trials, max_k, 16)?;
    run_trials("indegree", trials, threads, seed, |t, rng| {
        let g = trial_graph(t, max_k, rng)?;
        let k = g.k();
        let sum: f64 = (0..k)
            .map(|i| 1.0 / (1.0 + g.in_neighbors(i).count() as f64))
            .sum();
        let alpha = independence_number(&g, k)? as f64;
        let bound = 2.0 * alpha * (1.0 + k as f64 / alpha).ln();
        let checks = vec![(
            format!("indegree sum {sum} exceeds bound {bound} at alpha {alpha}"),
            bound - sum,
        )];
        Ok((g, checks))
    })
}

/// Checks the greedy dominating set: it must dominate, it can never beat
/// the exact optimum, and its size obeys
/// `|R| <= min(gamma (1 + ln k), ceil(2 alpha ln k) + 1)`.
pub fn check_greedy_cover(
    trials: u64,
    max_k: usize,
    seed: u64,
    threads: Option<usize>,
) -> Result<CheckReport> {
    validate_suite_args(trials, max_k, 16)?;
    run_trials("cover", trials, threads, seed, |t, rng| {
        let g = trial_graph(t, max_k, rng)?;
        let k = g.k();
        let greedy = greedy_dominating_set(&g);
        let mut covered = vec![false; k];
        for &i in &greedy {
            for j in g.observation_set(i) {
                covered[j] = true;
            }
        }
        let dominates = covered.iter().all(|&c| c);
        let r = greedy.len() as f64;
        let gamma = domination_number(&g)? as f64;
        let alpha = independence_number(&g, k)? as f64;
        let ln_k = (k as f64).ln();
        let bound = (gamma * (1.0 + ln_k)).min((2.0 * alpha * ln_k).ceil() + 1.0);
        let checks = vec![
            (
                "greedy set fails to dominate".into(),
                if dominates { 0.0 } else { -1.0 },
            ),
            (
                format!("greedy size {r} beats the exact optimum {gamma}"),
                r - gamma,
            ),
            (
                format!("greedy size {r} exceeds bound {bound} at gamma {gamma}, alpha {alpha}"),
                bound - r,
            ),
        ];
        Ok((g, checks))
    })
}

/// Checks the weighted exposure bound: with `R` the greedy dominating set,
/// `r = |R|`, and any distribution keeping `p_i >= beta` on `R`,
/// `sum_i p_i/q_i <= 2 alpha ln(1 + (ceil(k^2/(r beta)) + k)/alpha) + 2r`.
pub fn check_weighted_bound(
    trials: u64,
    max_k: usize,
    seed: u64,
    threads: Option<usize>,
) -> Result<CheckReport> {
    validate_suite_args(trials, max_k, 12)?;
    run_trials("weighted", trials, threads, seed, |t, rng| {
        let g = trial_graph(t, max_k, rng)?;
        let k = g.k();
        let dom = greedy_dominating_set(&g);
        let r = dom.len() as f64;
        // beta uniform in (0, 1/(2r)]; 1 - u lies in (0, 1].
        let u: f64 = rng.gen();
        let beta = (1.0 - u) / (2.0 * r);
        // Spread the mass left after the floor as a random interior point.
        let spread = Distribution::random(k, rng)?;
        let residual = 1.0 - r * beta;
        let mut probs = vec![0.0f64; k];
        for i in 0..k {
            probs[i] = residual * spread.get(i);
        }
        for &i in &dom {
            probs[i] += beta;
        }
        let p = Distribution::new(probs)?;
        let lhs = exposure(&p, &g)?;
        let alpha = independence_number(&g, k)? as f64;
        let inner = ((k * k) as f64 / (r * beta)).ceil() + k as f64;
        let bound = 2.0 * alpha * (1.0 + inner / alpha).ln() + 2.0 * r;
        let checks = vec![(
            format!(
                "weighted exposure {lhs} exceeds bound {bound} at alpha {alpha}, r {r}, beta {beta}"
            ),
            bound - lhs,
        )];
        Ok((g, checks))
    })
}

/// Checks the five moment inequalities satisfied by the distributions the
/// high-probability policy plays: with `p` its action distribution, `q`
/// the observation probabilities, `gamma` its exploration rate, `m` the
/// exact largest-acyclic-subgraph size, and `S_i` the observation set of
/// `i`:
///
/// 1. `sum_i p_i/q_i^2            <= m^2/gamma`
/// 2. `sum_i p_i sum_{j in S_i} p_j/q_j      = 1` (exact identity)
/// 3. `sum_i p_i sum_{j in S_i} p_j/q_j^2    <= m`
/// 4. `sum_i p_i (sum_{j in S_i} p_j/q_j)^2  <= m`
/// 5. `sum_i p_i (sum_{j in S_i} p_j/q_j^2)^2 <= m^3/gamma`
pub fn check_elp_inequalities(
    trials: u64,
    max_k: usize,
    seed: u64,
    threads: Option<usize>,
) -> Result<CheckReport> {
    validate_suite_args(trials, max_k, 12)?;
    run_trials("elp", trials, threads, seed, |t, rng| {
        let g = trial_graph(t, max_k, rng)?;
        let k = g.k();
        // A random confidence level, with the rate pulled under both of
        // the policy's admissibility caps.
        let delta = 0.01 + 0.48 * rng.gen::<f64>();
        let eta = 0.999 * (1.0 / (3.0 * k as f64)).min(0.25 / elpp_beta(k, delta, 1.0));
        let mut policy = ElpP::new(k, delta, eta)?;
        let outcome = policy.act(Some(&g), rng)?;
        let ActDetail::Elp { gamma, .. } = outcome.detail else {
            return Err(Error::invalid("expected exploration detail from the policy"));
        };
        let p = outcome.dist;
        let q = observation_probs(&p, &g)?;
        let m = mas_size(&g, MasMode::Exact)? as f64;
        let mut item1 = 0.0;
        let mut item2 = 0.0;
        let mut item3 = 0.0;
        let mut item4 = 0.0;
        let mut item5 = 0.0;
        for i in 0..k {
            item1 += p.get(i) / (q[i] * q[i]);
            let mut first = 0.0;
            let mut second = 0.0;
            for j in g.observation_set(i) {
                first += p.get(j) / q[j];
                second += p.get(j) / (q[j] * q[j]);
            }
            item2 += p.get(i) * first;
            item3 += p.get(i) * second;
            item4 += p.get(i) * first * first;
            item5 += p.get(i) * second * second;
        }
        let checks = vec![
            (
                format!("item 1: {item1} exceeds {}", m * m / gamma),
                m * m / gamma - item1,
            ),
            (
                format!("item 2: {item2} is not 1"),
                -(item2 - 1.0).abs(),
            ),
            (format!("item 3: {item3} exceeds {m}"), m - item3),
            (format!("item 4: {item4} exceeds {m}"), m - item4),
            (
                format!("item 5: {item5} exceeds {}", m * m * m / gamma),
                m * m * m / gamma - item5,
            ),
        ];
        Ok((g, checks))
    })
}

/// Checks the closed form for the expected observation ratio under
/// Erdős–Rényi graphs: for a fixed distribution `p` assigned to nodes in a
/// fresh uniformly random order each draw, every node's expectation of
/// `p_i/q_i` equals `(1 - (1-r)^k) / (r k)`.
///
/// The label shuffle is part of the statement being checked: for a fixed
/// non-uniform assignment the per-node ratio depends on which mass sits
/// where, and only the label-averaged expectation has the closed form. The
/// Monte-Carlo estimate must land within four standard errors per node.
pub fn check_er_expectation(
    k: usize,
    density: f64,
    draws: u64,
    seed: u64,
    threads: Option<usize>,
) -> Result<CheckReport> {
    if k < 2 {
        return Err(Error::invalid("expectation check needs at least two arms"));
    }
    if !(density > 0.0 && density <= 1.0) {
        return Err(Error::invalid(format!(
            "arc density must lie in (0, 1], got {density}"
        )));
    }
    if draws < 10_000 {
        return Err(Error::invalid(format!(
            "need at least 10000 draws for a stable standard error, got {draws}"
        )));
    }
    // The masses are fixed once, on the setup substream; each draw then
    // shuffles them onto nodes and draws a fresh graph.
    let base = Distribution::random(k, &mut rng_from_seed(derive_seed(seed, 0)))?;
    let samples = indexed_map(draws as usize, threads, |d| -> Result<Vec<f64>> {
        let mut rng = rng_from_seed(derive_seed(seed, 1 + d as u64));
        let mut labels: Vec<usize> = (0..k).collect();
        for i in (1..k).rev() {
            labels.swap(i, rng.gen_range(0..=i));
        }
        let p = Distribution::new(labels.iter().map(|&l| base.get(l)).collect())?;
        let g = generate(&GraphKind::ErdosRenyi { density }, k, &mut rng)?;
        let q = observation_probs(&p, &g)?;
        Ok((0..k).map(|i| p.get(i) / q[i]).collect())
    });
    let mut sums = vec![0.0f64; k];
    let mut squares = vec![0.0f64; k];
    for sample in samples {
        let xs = sample?;
        for i in 0..k {
            sums[i] += xs[i];
            squares[i] += xs[i] * xs[i];
        }
    }
    let n = draws as f64;
    let target = (1.0 - (1.0 - density).powi(k as i32)) / (density * k as f64);
    let mut failures = Vec::new();
    let mut max_slack = f64::NEG_INFINITY;
    for i in 0..k {
        let mean = sums[i] / n;
        let var = ((squares[i] - n * mean * mean) / (n - 1.0)).max(0.0);
        let se = (var / n).sqrt();
        let dev = (mean - target).abs();
        let slack = 4.0 * se + 1e-12 - dev;
        if slack > max_slack {
            max_slack = slack;
        }
        if slack < -CHECK_TOL {
            failures.push(Failure {
                instance: format!(
                    "# expectation suite: arm {i}, density {density}, {draws} draws\nK {k}\n"
                ),
                detail: format!(
                    "arm {i}: mean {mean} vs closed form {target} (4 s.e. = {})",
                    4.0 * se
                ),
                slack,
            });
        }
    }
    Ok(CheckReport {
        suite: "er".into(),
        trials: draws,
        failures,
        max_slack,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::parse_graph_file;
    use crate::lp::solve_maxmin_coverage;

    fn fixed(kind: &GraphKind, k: usize) -> FeedbackGraph {
        generate(kind, k, &mut rng_from_seed(0)).unwrap()
    }

    fn cycle_edges(k: usize) -> Vec<(usize, usize)> {
        (0..k).map(|i| (i, (i + 1) % k)).collect()
    }

    #[test]
    fn domination_number_on_known_graphs() {
        assert_eq!(domination_number(&fixed(&GraphKind::Clique, 6)).unwrap(), 1);
        assert_eq!(domination_number(&fixed(&GraphKind::Empty, 6)).unwrap(), 6);
        assert_eq!(
            domination_number(&fixed(&GraphKind::TotalOrder, 6)).unwrap(),
            1
        );
        let star = GraphKind::Symmetric {
            edges: (1..6).map(|i| (0, i)).collect(),
        };
        assert_eq!(domination_number(&fixed(&star, 6)).unwrap(), 1);
        // Undirected 5-cycle: each pick covers three nodes, so two suffice.
        let cycle = GraphKind::Symmetric {
            edges: cycle_edges(5),
        };
        assert_eq!(domination_number(&fixed(&cycle, 5)).unwrap(), 2);
        // Directed 5-cycle: each pick covers only itself and its successor.
        let ring = GraphKind::Explicit {
            arcs: cycle_edges(5),
        };
        assert_eq!(domination_number(&fixed(&ring, 5)).unwrap(), 3);
        let too_big = fixed(&GraphKind::Empty, DOMINATION_EXACT_CAP + 1);
        assert!(matches!(
            domination_number(&too_big),
            Err(Error::CapacityExceeded { .. })
        ));
    }

    #[test]
    fn enumeration_matches_known_optima() {
        let cases: Vec<(GraphKind, usize, f64)> = vec![
            (GraphKind::Empty, 3, 1.0 / 3.0),
            (GraphKind::Clique, 4, 1.0),
            (GraphKind::TotalOrder, 4, 1.0),
            (
                GraphKind::Symmetric {
                    edges: (1..4).map(|i| (0, i)).collect(),
                },
                4,
                1.0,
            ),
            (
                GraphKind::Explicit {
                    arcs: cycle_edges(3),
                },
                3,
                2.0 / 3.0,
            ),
        ];
        for (kind, k, want) in cases {
            let g = fixed(&kind, k);
            let got = lp_value_by_enumeration(&g).unwrap();
            assert!((got - want).abs() < 1e-9, "{kind:?}: got {got}, want {want}");
        }
        let too_big = fixed(&GraphKind::Empty, LP_ENUMERATION_CAP + 1);
        assert!(matches!(
            lp_value_by_enumeration(&too_big),
            Err(Error::CapacityExceeded { .. })
        ));
    }

    #[test]
    fn enumeration_certifies_the_solver_and_the_sandwich() {
        let mut rng = rng_from_seed(99);
        for trial in 0..60 {
            let k = rng.gen_range(2..=6);
            let density = f64::from(rng.gen_range(1..=9u32)) / 10.0;
            let g = generate(&GraphKind::ErdosRenyi { density }, k, &mut rng).unwrap();
            let exact = lp_value_by_enumeration(&g).unwrap();
            let solved = solve_maxmin_coverage(&g, 1e-9).unwrap().value;
            assert!(
                (exact - solved).abs() <= 1e-6,
                "trial {trial}: enumeration {exact} vs solver {solved}\n{}",
                to_graph_file(&g)
            );
            let gamma = domination_number(&g).unwrap() as f64;
            let mas = mas_size(&g, MasMode::Exact).unwrap() as f64;
            assert!(1.0 / solved <= gamma + 1e-6, "trial {trial}");
            assert!(gamma <= mas, "trial {trial}");
        }
    }

    #[test]
    fn exposure_spot_values() {
        // Undirected 5-cycle under the uniform distribution: every arm is
        // observed with probability 3/5, so the exposure is 5/3, within
        // the acyclic-subgraph size of 2.
        let g = fixed(
            &GraphKind::Symmetric {
                edges: cycle_edges(5),
            },
            5,
        );
        let p = Distribution::uniform(5).unwrap();
        let q = exposure(&p, &g).unwrap();
        assert!((q - 5.0 / 3.0).abs() < 1e-12);
        assert_eq!(mas_size(&g, MasMode::Exact).unwrap(), 2);
    }

    #[test]
    fn indegree_spot_values() {
        let clique = fixed(&GraphKind::Clique, 8);
        let sum: f64 = (0..8)
            .map(|i| 1.0 / (1.0 + clique.in_neighbors(i).count() as f64))
            .sum();
        assert!((sum - 1.0).abs() < 1e-12);
        assert!(sum <= 2.0 * (9.0f64).ln());

        let empty = fixed(&GraphKind::Empty, 8);
        let sum: f64 = (0..8)
            .map(|i| 1.0 / (1.0 + empty.in_neighbors(i).count() as f64))
            .sum();
        assert!((sum - 8.0).abs() < 1e-12);
        assert!(sum <= 16.0 * (2.0f64).ln());
    }

    #[test]
    fn all_bound_suites_pass_at_small_scale() {
        let exposure = check_exposure_vs_mas(300, 8, 11, None).unwrap();
        assert!(exposure.passed(), "{:?}", exposure.failures.first());
        assert_eq!(exposure.trials, 300);
        assert!(exposure.max_slack.is_finite());

        let indegree = check_indegree_sum(300, 16, 12, None).unwrap();
        assert!(indegree.passed(), "{:?}", indegree.failures.first());

        let cover = check_greedy_cover(300, 16, 13, None).unwrap();
        assert!(cover.passed(), "{:?}", cover.failures.first());

        let weighted = check_weighted_bound(300, 12, 14, None).unwrap();
        assert!(weighted.passed(), "{:?}", weighted.failures.first());

        let elp = check_elp_inequalities(100, 12, 15, None).unwrap();
        assert!(elp.passed(), "{:?}", elp.failures.first());
    }

    #[test]
    fn er_expectation_suite_passes_and_validates() {
        let report = check_er_expectation(6, 0.5, 10_000, 21, None).unwrap();
        assert!(report.passed(), "{:?}", report.failures.first());
        assert_eq!(report.trials, 10_000);
        // Density 1 pins every observation probability to 1.
        let full = check_er_expectation(6, 1.0, 10_000, 22, None).unwrap();
        assert!(full.passed(), "{:?}", full.failures.first());

        assert!(check_er_expectation(1, 0.5, 10_000, 0, None).is_err());
        assert!(check_er_expectation(6, 0.0, 10_000, 0, None).is_err());
        assert!(check_er_expectation(6, 1.2, 10_000, 0, None).is_err());
        assert!(check_er_expectation(6, 0.5, 9_999, 0, None).is_err());
    }

    #[test]
    fn suites_reject_out_of_range_arguments() {
        assert!(check_exposure_vs_mas(0, 8, 0, None).is_err());
        assert!(check_exposure_vs_mas(10, 1, 0, None).is_err());
        assert!(check_exposure_vs_mas(10, 13, 0, None).is_err());
        assert!(check_indegree_sum(10, 17, 0, None).is_err());
        assert!(check_greedy_cover(10, 17, 0, None).is_err());
        assert!(check_weighted_bound(10, 13, 0, None).is_err());
        assert!(check_elp_inequalities(10, 13, 0, None).is_err());
    }

    #[test]
    fn suites_are_deterministic_and_thread_invariant() {
        let a = check_exposure_vs_mas(200, 8, 7, Some(1)).unwrap();
        let b = check_exposure_vs_mas(200, 8, 7, Some(4)).unwrap();
        let c = check_exposure_vs_mas(200, 8, 7, Some(1)).unwrap();
        assert_eq!(a, b);
        assert_eq!(a, c);
    }

    #[test]
    fn runner_classifies_and_serializes_failures() {
        let report = run_trials("fake", 3, None, 5, |t, rng| {
            let g = trial_graph(t, 4, rng)?;
            let slack = if t == 1 { -0.5 } else { 1.0 };
            Ok((g, vec![(format!("trial {t}"), slack)]))
        })
        .unwrap();
        assert!(!report.passed());
        assert_eq!(report.failures.len(), 1);
        assert_eq!(report.failures[0].detail, "trial 1");
        assert_eq!(report.failures[0].slack, -0.5);
        assert_eq!(report.max_slack, 1.0);
        // The failing instance replays through the graph file parser.
        let parsed = parse_graph_file(&report.failures[0].instance).unwrap();
        assert_eq!(parsed.k(), 4);
    }
}
