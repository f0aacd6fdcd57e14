//! Online learning under graph-structured feedback.
//!
//! In the classic multi-armed bandit protocol the learner sees only the loss
//! of the action it played; with full information it sees every loss. This
//! crate simulates the continuum between the two: each round carries a
//! directed *feedback graph* over the `k` actions, and playing action `i`
//! reveals the loss of `i` itself plus the loss of every out-neighbor of `i`.
//! A clique reproduces full information, an empty graph reproduces bandit
//! feedback, and everything in between interpolates.
//!
//! The crate provides:
//!
//! * [`graph`] — the feedback-graph type, generators for standard families,
//!   and the combinatorial quantities that drive regret guarantees
//!   (independence number, maximum acyclic subgraph, domination number,
//!   greedy dominating sets).
//! * [`estimators`] — probability simplex and loss-vector types, observation
//!   probabilities, importance-weighted estimates, and the exposure quantity
//!   `sum_i p_i / q_i` that controls estimator variance.
//! * [`lp`] — a deterministic simplex solver for the max-min coverage
//!   program used by graph-aware exploration.
//! * [`policies`] — the Exp3-SET, Exp3-DOM, and ELP.P algorithms plus Hedge
//!   and Exp3 baselines, all behind a common act/update interface.
//! * [`environments`] — loss/graph processes: stochastic gaps, a
//!   lower-bound adversary, per-round random graphs, and file replay.
//! * [`harness`] — reproducible experiment runs, repetition aggregation, and
//!   CSV traces.
//! * [`verify`] — randomized empirical checks of the combinatorial
//!   inequalities the regret analysis rests on, with counterexample
//!   serialization.
//!
//! Every run is deterministic given its seed: randomness flows from a single
//! 64-bit master seed through documented derivation functions (see [`rng`]),
//! and parallel execution (the `parallel` feature) yields byte-identical
//! output to the sequential path.

pub mod environments;
pub mod error;
pub mod estimators;
pub mod graph;
pub mod harness;
pub mod lp;
pub mod par;
pub mod policies;
pub mod rng;
pub mod verify;

pub use error::{Error, Result};
