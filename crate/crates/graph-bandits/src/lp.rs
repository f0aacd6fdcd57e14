//! Max-min coverage over the probability simplex.
//!
//! The informed exploration policy needs a distribution `s` maximizing the
//! worst-case coverage `min_i sum of s_j over j that observe i` (the sum
//! includes `j = i`: playing an arm always observes it). This is a small
//! linear program; its optimal value lies in `[1/k, 1]`, and its reciprocal
//! is sandwiched between the domination number and the maximum acyclic
//! subgraph size of the graph.
//!
//! Solving the epigraph form directly is a trap: its natural starting
//! vertices sit on a huge degenerate plateau (the minimum coverage stays 0
//! until the support reaches a dominating set), which stalls any pivot
//! rule. The solver instead uses the classical fractional-covering scaling
//! `y = s / t`: maximizing `t` is equivalent to minimizing the total mass
//! of a fractional dominating assignment `y` with every arm covered at
//! least once, whose dual is the packing program `max sum z` subject to
//! `A' z <= 1`, `z >= 0`. Primal simplex on the packing form starts from
//! the all-slack basis — feasible and fully nondegenerate — pivots on the
//! most negative reduced cost, and switches permanently to Bland's
//! anti-cycling rule if a degenerate stall develops, so it is fast in the
//! common case and guaranteed to terminate. The covering solution is read
//! off the slack reduced costs at optimality and normalized into `s`.
//!
//! Exploration distributions feed directly into play probabilities, so the
//! solver favors exactness and bit-for-bit determinism over generality:
//! identical inputs produce identical outputs, with no dependence on
//! thread count or allocator state.

use crate::error::{Error, Result};
use crate::estimators::Distribution;
use crate::graph::FeedbackGraph;

/// Numerical zero for pivot selection and ratio tests.
const PIVOT_EPS: f64 = 1e-9;

/// Solution of the max-min coverage program.
#[derive(Clone, Debug)]
pub struct MaxMinSolution {
    /// The optimizing distribution over arms.
    pub s: Distribution,
    /// The optimal value: the coverage of the worst-covered arm under `s`.
    pub value: f64,
    /// Per-arm coverage under `s` (including the self term). The minimum
    /// entry equals `value` up to solver tolerance.
    pub certificate: Vec<f64>,
}

/// Solves `max over distributions s` of `min_i coverage_i(s)` where
/// `coverage_i(s) = s_i + sum of s_j over in-neighbors j of i`.
///
/// `tol` bounds the feasibility slack accepted in the returned solution and
/// must lie in `(0, 1e-3]`. The solver is deterministic; ties among optimal
/// vertices resolve by fixed lowest-index pivot preferences, so callers
/// must not rely on which optimizer is returned when several exist — only
/// the value is canonical. Non-convergence within the iteration budget
/// surfaces as [`Error::SolverFailure`] carrying the instance size.
pub fn solve_maxmin_coverage(g: &FeedbackGraph, tol: f64) -> Result<MaxMinSolution> {
    if !(tol > 0.0 && tol <= 1e-3) {
        return Err(Error::invalid(format!(
            "lp tolerance must lie in (0, 1e-3], got {tol}"
        )));
    }
    let k = g.k();

    // Packing form: maximize sum z subject to, for every arm j,
    //   sum_i [j observes i] z_i <= 1,   z >= 0.
    // Column layout: [z_0 .. z_{k-1} | w_0 .. w_{k-1} | rhs], one row and
    // one slack per arm. The all-slack basis is feasible with rhs 1
    // everywhere, so there is no phase-one and no degenerate start.
    let cols = 2 * k + 1;
    let rhs = 2 * k;
    let mut tab = vec![vec![0.0f64; cols]; k];
    for (j, row) in tab.iter_mut().enumerate() {
        for i in 0..k {
            row[i] = f64::from(u8::from(g.observes(j, i)));
        }
        row[k + j] = 1.0;
        row[rhs] = 1.0;
    }
    let mut basis: Vec<usize> = (k..2 * k).collect();

    // Minimize -sum z; reduced costs start at the raw costs because every
    // basic (slack) cost is zero.
    let mut obj = vec![0.0f64; cols];
    for c in obj.iter_mut().take(k) {
        *c = -1.0;
    }

    let budget = 10_000usize.max(100 * k);
    // Dantzig's rule makes short work of these instances; a long run of
    // degenerate pivots flips to Bland's rule for the rest of the solve,
    // which rules out cycling.
    let stall_limit = 64usize.max(2 * k);
    let mut bland = false;
    let mut stalled = 0usize;
    for _ in 0..budget {
        let entering = if bland {
            (0..cols - 1).find(|&j| obj[j] < -PIVOT_EPS)
        } else {
            let mut best: Option<usize> = None;
            for j in 0..cols - 1 {
                if obj[j] < -PIVOT_EPS && best.is_none_or(|b| obj[j] < obj[b]) {
                    best = Some(j);
                }
            }
            best
        };
        let Some(entering) = entering else {
            return extract_solution(g, k, &tab, &basis, &obj, rhs, tol);
        };
        // Leaving row: minimum ratio; ties to the lowest basic variable index.
        let mut leaving: Option<usize> = None;
        let mut best_ratio = f64::INFINITY;
        for (r, row) in tab.iter().enumerate() {
            if row[entering] > PIVOT_EPS {
                let ratio = row[rhs] / row[entering];
                let better = match leaving {
                    None => true,
                    Some(cur) => {
                        ratio < best_ratio - PIVOT_EPS
                            || (ratio < best_ratio + PIVOT_EPS && basis[r] < basis[cur])
                    }
                };
                if better {
                    best_ratio = ratio;
                    leaving = Some(r);
                }
            }
        }
        let Some(r) = leaving else {
            // Self-observation bounds every z_i by its own row, so an
            // unbounded ray means the tableau lost feasibility.
            return Err(Error::SolverFailure(format!(
                "max-min coverage lp unbounded on k = {k} instance"
            )));
        };
        if best_ratio <= PIVOT_EPS {
            stalled += 1;
            if stalled >= stall_limit {
                bland = true;
            }
        } else {
            stalled = 0;
        }
        // Pivot: normalize row r and eliminate `entering` everywhere else.
        let pivot = tab[r][entering];
        for x in tab[r].iter_mut() {
            *x /= pivot;
        }
        let pivot_row = tab[r].clone();
        for (rr, row) in tab.iter_mut().enumerate() {
            if rr != r && row[entering].abs() > 0.0 {
                let factor = row[entering];
                for (x, p) in row.iter_mut().zip(&pivot_row) {
                    *x -= factor * p;
                }
            }
        }
        if obj[entering].abs() > 0.0 {
            let factor = obj[entering];
            for (x, p) in obj.iter_mut().zip(&pivot_row) {
                *x -= factor * p;
            }
        }
        basis[r] = entering;
    }
    Err(Error::SolverFailure(format!(
        "max-min coverage lp exceeded {budget} pivots on k = {k} instance"
    )))
}

/// Reads the covering solution out of an optimal packing tableau, converts
/// it back to max-min coverage terms, and sanity-checks it.
fn extract_solution(
    g: &FeedbackGraph,
    k: usize,
    tab: &[Vec<f64>],
    basis: &[usize],
    obj: &[f64],
    rhs: usize,
    tol: f64,
) -> Result<MaxMinSolution> {
    // Dual of the packing program: the reduced costs on the slack columns
    // form the minimum-mass fractional dominating assignment y, and strong
    // duality matches its mass to the packing objective.
    let mut y: Vec<f64> = (0..k).map(|j| obj[k + j].max(0.0)).collect();
    let packing: f64 = basis
        .iter()
        .zip(tab)
        .filter(|(b, _)| **b < k)
        .map(|(_, row)| row[rhs])
        .sum();
    let mass: f64 = y.iter().sum();
    let scale = mass.max(1.0);
    if !(mass > 0.0) || (mass - packing).abs() > tol * scale {
        return Err(Error::SolverFailure(format!(
            "lp duality gap on k = {k} instance: covering mass {mass} vs packing {packing}"
        )));
    }
    let value = 1.0 / mass;
    for v in y.iter_mut() {
        *v /= mass;
    }
    let s = y;

    let certificate: Vec<f64> = (0..k)
        .map(|i| s[i] + g.in_neighbors(i).map(|j| s[j]).sum::<f64>())
        .collect();
    let min_cov = certificate.iter().copied().fold(f64::INFINITY, f64::min);
    if (min_cov - value).abs() > tol {
        return Err(Error::SolverFailure(format!(
            "lp value {value} disagrees with certificate minimum {min_cov} on k = {k} instance"
        )));
    }
    let s = Distribution::new(s)?;
    Ok(MaxMinSolution {
        s,
        value,
        certificate,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{generate, mas_size, GraphKind, MasMode};
    use crate::rng::rng_from_seed;

    fn fixed(kind: &GraphKind, k: usize) -> FeedbackGraph {
        let mut rng = rng_from_seed(0);
        generate(kind, k, &mut rng).unwrap()
    }

    fn solve(g: &FeedbackGraph) -> MaxMinSolution {
        solve_maxmin_coverage(g, 1e-9).unwrap()
    }

    #[test]
    fn empty_graph_forces_uniform() {
        let sol = solve(&fixed(&GraphKind::Empty, 5));
        assert!((sol.value - 0.2).abs() < 1e-9);
        for i in 0..5 {
            assert!((sol.s.get(i) - 0.2).abs() < 1e-9, "s = {:?}", sol.s);
        }
    }

    #[test]
    fn clique_attains_full_coverage() {
        let sol = solve(&fixed(&GraphKind::Clique, 5));
        assert!((sol.value - 1.0).abs() < 1e-9);
        for c in &sol.certificate {
            assert!((c - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn star_center_is_the_unique_optimum() {
        let star = fixed(
            &GraphKind::Explicit {
                arcs: vec![(0, 1), (0, 2), (0, 3)],
            },
            4,
        );
        let sol = solve(&star);
        assert!((sol.value - 1.0).abs() < 1e-9);
        assert!((sol.s.get(0) - 1.0).abs() < 1e-9);
        for i in 1..4 {
            assert!(sol.s.get(i).abs() < 1e-9);
        }
    }

    #[test]
    fn total_order_puts_all_mass_on_the_top() {
        // Only the highest-indexed arm covers everything; value 1 forces it.
        let sol = solve(&fixed(&GraphKind::TotalOrder, 6));
        assert!((sol.value - 1.0).abs() < 1e-9);
        assert!((sol.s.get(5) - 1.0).abs() < 1e-9);
    }

    #[test]
    fn directed_triangle_is_uniform_at_two_thirds() {
        let tri = fixed(
            &GraphKind::Explicit {
                arcs: vec![(0, 1), (1, 2), (2, 0)],
            },
            3,
        );
        let sol = solve(&tri);
        assert!((sol.value - 2.0 / 3.0).abs() < 1e-9);
        for i in 0..3 {
            assert!((sol.s.get(i) - 1.0 / 3.0).abs() < 1e-9);
        }
    }

    #[test]
    fn value_bounds_hold_on_random_instances() {
        let mut rng = rng_from_seed(42);
        for trial in 0..200 {
            let k = 2 + trial % 11;
            let density = 0.1 + 0.08 * (trial % 10) as f64;
            let g = generate(&GraphKind::ErdosRenyi { density }, k, &mut rng).unwrap();
            let sol = solve(&g);
            assert!(
                sol.value >= 1.0 / k as f64 - 1e-9 && sol.value <= 1.0 + 1e-9,
                "trial {trial}: value {}",
                sol.value
            );
            let min_cov = sol
                .certificate
                .iter()
                .copied()
                .fold(f64::INFINITY, f64::min);
            assert!((min_cov - sol.value).abs() <= 1e-9, "trial {trial}");
            let mas = mas_size(&g, MasMode::Exact).unwrap() as f64;
            assert!(
                1.0 / sol.value <= mas + 1e-6,
                "trial {trial}: 1/value {} vs mas {mas}",
                1.0 / sol.value
            );
        }
    }

    #[test]
    fn rejects_out_of_range_tolerance() {
        let g = fixed(&GraphKind::Clique, 3);
        assert!(solve_maxmin_coverage(&g, 0.0).is_err());
        assert!(solve_maxmin_coverage(&g, 1e-2).is_err());
        assert!(solve_maxmin_coverage(&g, -1.0).is_err());
    }

    #[test]
    fn single_arm_is_trivial() {
        let sol = solve(&fixed(&GraphKind::Empty, 1));
        assert!((sol.value - 1.0).abs() < 1e-12);
        assert!((sol.s.get(0) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn solves_a_large_instance_within_budget() {
        // The solver must stay reliable well past the sizes the test
        // ensembles use; 512 arms exercises the budget and numerics.
        let mut rng = rng_from_seed(7);
        let g = generate(&GraphKind::ErdosRenyi { density: 0.02 }, 512, &mut rng).unwrap();
        let sol = solve_maxmin_coverage(&g, 1e-6).unwrap();
        assert!(sol.value >= 1.0 / 512.0 - 1e-9 && sol.value <= 1.0 + 1e-9);
    }
}
