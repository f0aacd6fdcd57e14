//! Probability vectors, loss vectors, and importance-weighted estimation.
//!
//! The quantity that makes graph feedback work is the *observation
//! probability* `q_i = p_i + sum of p_j over in-neighbors j of i`: the
//! chance that round's play reveals arm `i`'s loss. Dividing an observed
//! loss by `q_i` gives an unbiased estimate of the true loss, and the
//! *exposure* `Q = sum_i p_i / q_i` bounds the variance the learner pays.
//! Exposure is 1 on the clique, `k` on the empty graph, and is bounded by
//! the size of a maximum acyclic induced subgraph in between — the bridge
//! between graph combinatorics and regret that the verification suites
//! exercise.

use rand::Rng;

use crate::error::{Error, Result};
use crate::graph::FeedbackGraph;
use crate::rng::SimRng;

/// Tolerance on the simplex constraint when validating distributions.
pub const SIMPLEX_TOL: f64 = 1e-9;

/// A probability distribution over `k` actions.
///
/// Entries are finite, nonnegative, and sum to 1 within [`SIMPLEX_TOL`].
#[derive(Clone, Debug, PartialEq)]
pub struct Distribution {
    probs: Vec<f64>,
}

impl Distribution {
    /// Validates and wraps a probability vector. Entries within
    /// `-SIMPLEX_TOL` of zero are clamped to exactly zero; anything more
    /// negative, non-finite, or a sum off by more than the tolerance is
    /// rejected.
    pub fn new(mut probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::invalid("distribution needs at least one entry"));
        }
        for p in &mut probs {
            if !p.is_finite() || *p < -SIMPLEX_TOL {
                return Err(Error::invalid(format!(
                    "distribution entry {p} is negative or non-finite"
                )));
            }
            if *p < 0.0 {
                *p = 0.0;
            }
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > SIMPLEX_TOL {
            return Err(Error::invalid(format!(
                "distribution sums to {sum}, expected 1"
            )));
        }
        Ok(Distribution { probs })
    }

    /// The uniform distribution on `k` actions.
    pub fn uniform(k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::invalid("distribution needs at least one entry"));
        }
        Ok(Distribution {
            probs: vec![1.0 / k as f64; k],
        })
    }

    /// A strictly positive random distribution: independent standard
    /// exponentials, normalized (symmetric Dirichlet). Used by the
    /// verification suites to probe inequalities at random interior points.
    pub fn random(k: usize, rng: &mut SimRng) -> Result<Self> {
        if k == 0 {
            return Err(Error::invalid("distribution needs at least one entry"));
        }
        let mut draws = Vec::with_capacity(k);
        for _ in 0..k {
            let u: f64 = rng.gen();
            let mut e = -(1.0 - u).ln();
            if !(e > 0.0) {
                e = 1e-12; // u drew exactly 0; keep the entry positive
            }
            draws.push(e);
        }
        let sum: f64 = draws.iter().sum();
        for d in &mut draws {
            *d /= sum;
        }
        Ok(Distribution { probs: draws })
    }

    /// Number of actions.
    pub fn k(&self) -> usize {
        self.probs.len()
    }

    /// Probability of action `i`.
    pub fn get(&self, i: usize) -> f64 {
        self.probs[i]
    }

    /// The probability vector.
    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    /// Samples an action index by inverse CDF with a single uniform draw.
    ///
    /// Exactly one `f64` is consumed from `rng` per call, so two policies
    /// that play identical distributions from identical RNG states produce
    /// identical action sequences.
    pub fn sample(&self, rng: &mut SimRng) -> usize {
        let u: f64 = rng.gen();
        let mut acc = 0.0;
        for (i, &p) in self.probs.iter().enumerate() {
            acc += p;
            if u < acc {
                return i;
            }
        }
        // Float dust can leave acc marginally below 1; charge the tail.
        self.probs.len() - 1
    }
}

/// Per-arm losses for one round, each in `[0, 1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct LossVector {
    losses: Vec<f64>,
}

impl LossVector {
    /// Validates and wraps a loss vector.
    pub fn new(losses: Vec<f64>) -> Result<Self> {
        if losses.is_empty() {
            return Err(Error::invalid("loss vector needs at least one entry"));
        }
        for l in &losses {
            if !l.is_finite() || !(0.0..=1.0).contains(l) {
                return Err(Error::invalid(format!("loss {l} outside [0, 1]")));
            }
        }
        Ok(LossVector { losses })
    }

    /// Number of arms.
    pub fn k(&self) -> usize {
        self.losses.len()
    }

    /// Loss of arm `i`.
    pub fn get(&self, i: usize) -> f64 {
        self.losses[i]
    }

    /// The loss vector.
    pub fn values(&self) -> &[f64] {
        &self.losses
    }
}

/// Observation probabilities `q_i = p_i + sum of p_j over arcs (j, i)`:
/// the probability that arm `i`'s loss is revealed when playing from `p`
/// under graph `g`. Always `p_i <= q_i <= 1` (up to float error).
pub fn observation_probs(p: &Distribution, g: &FeedbackGraph) -> Result<Vec<f64>> {
    if p.k() != g.k() {
        return Err(Error::invalid(format!(
            "distribution has {} entries but graph has {} nodes",
            p.k(),
            g.k()
        )));
    }
    let probs = p.probs();
    let q = (0..g.k())
        .map(|i| probs[i] + g.in_neighbors(i).map(|j| probs[j]).sum::<f64>())
        .collect();
    Ok(q)
}

/// The exposure `Q = sum_i p_i / q_i`.
///
/// Arms with `p_i = 0` contribute nothing even when `q_i = 0`. For strictly
/// positive `p` the value lies in `[1, k]`, equals 1 on the clique and `k`
/// on the empty graph, and is bounded above by the maximum acyclic subgraph
/// size (independence number in the symmetric case).
pub fn exposure(p: &Distribution, g: &FeedbackGraph) -> Result<f64> {
    let q = observation_probs(p, g)?;
    Ok(p.probs()
        .iter()
        .zip(&q)
        .map(|(&pi, &qi)| if pi > 0.0 { pi / qi } else { 0.0 })
        .sum())
}

/// Importance-weighted estimate `(value * observed + bias) / q`.
///
/// With `bias = 0` this is the unbiased estimator: averaging over the play
/// that produced `observed` returns `value` exactly, with second moment at
/// most `1 / q`. A positive `bias` gives the optimistic estimator used by
/// ELP.P. `q` must lie in `(0, 1]` (a hair of float headroom is allowed);
/// a nonpositive `q` is always a caller bug, so it errors loudly.
pub fn iw_estimate(value: f64, observed: bool, q: f64, bias: f64) -> Result<f64> {
    if !(q > 0.0 && q <= 1.0 + SIMPLEX_TOL) {
        return Err(Error::invalid(format!(
            "observation probability {q} outside (0, 1]"
        )));
    }
    if !value.is_finite() || !bias.is_finite() {
        return Err(Error::invalid("non-finite estimate input"));
    }
    Ok((value * f64::from(u8::from(observed)) + bias) / q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{generate, GraphKind};
    use crate::rng::rng_from_seed;
    use proptest::prelude::*;
    use rand::Rng;

    fn fixed(kind: &GraphKind, k: usize) -> FeedbackGraph {
        let mut rng = rng_from_seed(0);
        generate(kind, k, &mut rng).unwrap()
    }

    /// The distribution that witnesses exposure (k + 1) / 2 on the total
    /// order: halving masses with the tail doubled up.
    fn halving_distribution(k: usize) -> Distribution {
        let mut p: Vec<f64> = (0..k).map(|i| 0.5f64.powi(i as i32 + 1)).collect();
        p[k - 1] = 0.5f64.powi(k as i32 - 1);
        Distribution::new(p).unwrap()
    }

    #[test]
    fn observation_probs_on_total_order_are_suffix_sums() {
        let g = fixed(&GraphKind::TotalOrder, 4);
        let p = Distribution::uniform(4).unwrap();
        let q = observation_probs(&p, &g).unwrap();
        let expected = [1.0, 0.75, 0.5, 0.25];
        for (qi, ei) in q.iter().zip(expected) {
            assert!((qi - ei).abs() < 1e-15, "{q:?}");
        }
    }

    #[test]
    fn exposure_of_halving_distribution_is_half_k_plus_one() {
        for k in [2usize, 4, 8, 16] {
            let g = fixed(&GraphKind::TotalOrder, k);
            let p = halving_distribution(k);
            let q = exposure(&p, &g).unwrap();
            assert!(
                (q - (k as f64 + 1.0) / 2.0).abs() < 1e-12,
                "k = {k}: exposure {q}"
            );
        }
    }

    #[test]
    fn exposure_extremes_on_clique_and_empty() {
        let mut rng = rng_from_seed(9);
        for k in [1usize, 3, 7] {
            let p = Distribution::random(k, &mut rng).unwrap();
            let clique = fixed(&GraphKind::Clique, k);
            let empty = fixed(&GraphKind::Empty, k);
            assert!((exposure(&p, &clique).unwrap() - 1.0).abs() < 1e-12);
            assert!((exposure(&p, &empty).unwrap() - k as f64).abs() < 1e-12);
        }
    }

    #[test]
    fn exposure_on_symmetric_cycle_under_uniform_play() {
        let edges = (0..5).map(|i| (i, (i + 1) % 5)).collect();
        let g = fixed(&GraphKind::Symmetric { edges }, 5);
        let p = Distribution::uniform(5).unwrap();
        let q = observation_probs(&p, &g).unwrap();
        for qi in &q {
            assert!((qi - 0.6).abs() < 1e-15); // self plus two neighbors
        }
        assert!((exposure(&p, &g).unwrap() - 5.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn iw_estimate_known_values() {
        assert_eq!(iw_estimate(0.4, true, 0.5, 0.0).unwrap(), 0.8);
        assert_eq!(iw_estimate(0.7, false, 0.3, 0.0).unwrap(), 0.0);
        // Bias is added whether or not the arm was observed.
        assert!((iw_estimate(0.0, false, 0.5, 0.02).unwrap() - 0.04).abs() < 1e-15);
        assert!((iw_estimate(1.0, true, 0.5, 0.02).unwrap() - 2.04).abs() < 1e-15);
    }

    #[test]
    fn iw_estimate_rejects_degenerate_q() {
        assert!(iw_estimate(0.5, true, 0.0, 0.0).is_err());
        assert!(iw_estimate(0.5, true, -0.1, 0.0).is_err());
        assert!(iw_estimate(0.5, true, 1.5, 0.0).is_err());
    }

    #[test]
    fn iw_estimate_is_unbiased_with_bounded_second_moment() {
        // Average the estimator over the draw of the played arm and compare
        // against the true loss: sum_j p_j * est(i | played j) = loss_i.
        let mut rng = rng_from_seed(77);
        for trial in 0..100 {
            let k = 2 + trial % 9;
            let g = generate(
                &GraphKind::ErdosRenyi {
                    density: 0.1 + 0.08 * (trial % 10) as f64,
                },
                k,
                &mut rng,
            )
            .unwrap();
            let p = Distribution::random(k, &mut rng).unwrap();
            let losses: Vec<f64> = (0..k).map(|_| rng.gen()).collect();
            let q = observation_probs(&p, &g).unwrap();
            for i in 0..k {
                let mut mean = 0.0;
                let mut second = 0.0;
                for j in 0..k {
                    let est = iw_estimate(losses[i], g.observes(j, i), q[i], 0.0).unwrap();
                    mean += p.get(j) * est;
                    second += p.get(j) * est * est;
                }
                assert!((mean - losses[i]).abs() < 1e-12, "trial {trial} arm {i}");
                assert!(second <= 1.0 / q[i] + 1e-9, "trial {trial} arm {i}");
            }
        }
    }

    #[test]
    fn distribution_validation() {
        assert!(Distribution::new(vec![]).is_err());
        assert!(Distribution::new(vec![0.5, 0.6]).is_err());
        assert!(Distribution::new(vec![-0.1, 1.1]).is_err());
        assert!(Distribution::new(vec![f64::NAN, 1.0]).is_err());
        // Tiny negative dust from solvers is clamped, not rejected.
        let d = Distribution::new(vec![1.0, -1e-12]).unwrap();
        assert_eq!(d.get(1), 0.0);
        let u = Distribution::uniform(4).unwrap();
        assert!((u.probs().iter().sum::<f64>() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn loss_vector_validation() {
        assert!(LossVector::new(vec![0.0, 0.5, 1.0]).is_ok());
        assert!(LossVector::new(vec![1.2]).is_err());
        assert!(LossVector::new(vec![-0.01]).is_err());
        assert!(LossVector::new(vec![]).is_err());
    }

    #[test]
    fn sampling_is_deterministic_and_hits_point_masses() {
        let d = Distribution::new(vec![0.0, 1.0, 0.0]).unwrap();
        let mut rng = rng_from_seed(5);
        for _ in 0..20 {
            assert_eq!(d.sample(&mut rng), 1);
        }
        let d = Distribution::new(vec![0.25, 0.25, 0.5]).unwrap();
        let mut a = rng_from_seed(11);
        let mut b = rng_from_seed(11);
        let seq_a: Vec<usize> = (0..50).map(|_| d.sample(&mut a)).collect();
        let seq_b: Vec<usize> = (0..50).map(|_| d.sample(&mut b)).collect();
        assert_eq!(seq_a, seq_b);
    }

    #[test]
    fn sampling_frequencies_track_probabilities() {
        let d = Distribution::new(vec![0.2, 0.3, 0.5]).unwrap();
        let mut rng = rng_from_seed(123);
        let mut counts = [0usize; 3];
        let n = 200_000;
        for _ in 0..n {
            counts[d.sample(&mut rng)] += 1;
        }
        for (c, p) in counts.iter().zip(d.probs()) {
            let freq = *c as f64 / n as f64;
            assert!((freq - p).abs() < 0.01, "freq {freq} vs p {p}");
        }
    }

    #[test]
    fn mismatched_sizes_are_rejected() {
        let g = fixed(&GraphKind::Clique, 3);
        let p = Distribution::uniform(4).unwrap();
        assert!(observation_probs(&p, &g).is_err());
        assert!(exposure(&p, &g).is_err());
    }

    proptest! {
        #[test]
        fn observation_probs_bounds(seed in 0u64..300, k in 1usize..14, density in 0.0f64..1.0) {
            let mut rng = rng_from_seed(seed);
            let g = generate(&GraphKind::ErdosRenyi { density }, k, &mut rng).unwrap();
            let p = Distribution::random(k, &mut rng).unwrap();
            let q = observation_probs(&p, &g).unwrap();
            for i in 0..k {
                prop_assert!(q[i] >= p.get(i) - 1e-15);
                prop_assert!(q[i] <= 1.0 + 1e-9);
            }
            let ex = exposure(&p, &g).unwrap();
            prop_assert!(ex >= 1.0 - 1e-9 && ex <= k as f64 + 1e-9);
        }

        #[test]
        fn sample_stays_in_range(seed in 0u64..200, k in 1usize..10) {
            let mut rng = rng_from_seed(seed);
            let d = Distribution::random(k, &mut rng).unwrap();
            for _ in 0..50 {
                prop_assert!(d.sample(&mut rng) < k);
            }
        }
    }
}
