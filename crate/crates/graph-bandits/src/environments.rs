//! Loss/graph generating processes the simulation loop plays against.
//!
//! A [`RoundSource`] produces one [`Round`] (feedback graph + full loss
//! vector) per time step; the [`Environment`] wrapper adds the protocol
//! the driver relies on: rounds are 1-indexed, requested in order, and
//! memoized so asking for the current round twice cannot advance any
//! random state. Sources receive the play history, so adaptive
//! adversaries fit the same interface; all built-in sources are oblivious
//! and ignore it.
//!
//! Determinism contract: a source constructed from a seed consumes its
//! random stream in a fixed documented order — any fixed graph or witness
//! draws at construction, then per round the graph (when per-round) before
//! the losses, each loss as one uniform draw per arm in index order. Equal
//! seeds therefore reproduce equal runs everywhere, including across
//! thread counts.

use std::path::Path;
use std::sync::Arc;

use rand::Rng;

use crate::error::{Error, Result};
use crate::estimators::LossVector;
use crate::graph::{generate, maximum_independent_set, FeedbackGraph, GraphKind};
use crate::rng::{rng_from_seed, SimRng};

/// One time step of the interaction: the feedback graph in force and the
/// adversary's full loss assignment (the player sees only its observation
/// set; the full vector exists for regret accounting).
#[derive(Clone, Debug)]
pub struct Round {
    /// The round's feedback graph.
    pub graph: Arc<FeedbackGraph>,
    /// Loss of every arm this round.
    pub losses: LossVector,
}

/// What the player did in one completed round; adaptive sources may
/// condition on it.
#[derive(Clone, Copy, Debug)]
pub struct PlayRecord {
    /// The arm that was played.
    pub action: usize,
    /// The loss it incurred.
    pub loss: f64,
}

/// A process generating rounds. Implementations may assume `next_round`
/// is called with consecutive `t = 1, 2, ...` and a history of length
/// `t - 1`; [`Environment`] enforces exactly that.
pub trait RoundSource {
    /// Number of arms.
    fn k(&self) -> usize;

    /// Last round the source can produce, or `None` when unbounded.
    fn horizon(&self) -> Option<u64> {
        None
    }

    /// Non-fatal conditions detected at construction, for surfacing to
    /// the user.
    fn warnings(&self) -> &[String] {
        &[]
    }

    /// Produces round `t`.
    fn next_round(&mut self, t: u64, history: &[PlayRecord]) -> Result<Round>;
}

/// Protocol-enforcing wrapper around a [`RoundSource`].
pub struct Environment {
    source: Box<dyn RoundSource>,
    memo: Option<(u64, Round)>,
}

impl Environment {
    /// Wraps a source.
    pub fn new(source: Box<dyn RoundSource>) -> Self {
        Environment { source, memo: None }
    }

    /// Number of arms.
    pub fn k(&self) -> usize {
        self.source.k()
    }

    /// Last available round, or `None` when unbounded.
    pub fn horizon(&self) -> Option<u64> {
        self.source.horizon()
    }

    /// Construction-time warnings from the underlying source.
    pub fn warnings(&self) -> &[String] {
        self.source.warnings()
    }

    /// Returns round `t` (1-indexed). Repeating the most recent `t` hits
    /// the memo and cannot advance random state; any other out-of-order
    /// request is a protocol violation, and requests past the horizon
    /// report end of stream.
    pub fn round(&mut self, t: u64, history: &[PlayRecord]) -> Result<&Round> {
        if t == 0 {
            return Err(Error::protocol("rounds are 1-indexed"));
        }
        if let Some((memo_t, _)) = self.memo {
            if memo_t == t {
                return Ok(&self.memo.as_ref().expect("just matched").1);
            }
        }
        if let Some(h) = self.source.horizon() {
            if t > h {
                return Err(Error::EndOfStream {
                    round: t,
                    available: h,
                });
            }
        }
        let emitted = self.memo.as_ref().map_or(0, |(memo_t, _)| *memo_t);
        if t != emitted + 1 {
            return Err(Error::protocol(format!(
                "round {t} requested but the next unseen round is {}",
                emitted + 1
            )));
        }
        if history.len() as u64 != t - 1 {
            return Err(Error::protocol(format!(
                "round {t} needs a history of length {}, got {}",
                t - 1,
                history.len()
            )));
        }
        let round = self.source.next_round(t, history)?;
        debug_assert_eq!(round.losses.k(), self.source.k());
        debug_assert_eq!(round.graph.k(), self.source.k());
        self.memo = Some((t, round));
        Ok(&self.memo.as_ref().expect("just stored").1)
    }
}

/// Rejects a malformed per-arm mean vector.
fn validate_means(k: usize, means: &[f64]) -> Result<()> {
    if means.len() != k {
        return Err(Error::invalid(format!(
            "expected {k} per-arm means, got {}",
            means.len()
        )));
    }
    for (i, &m) in means.iter().enumerate() {
        if !m.is_finite() || !(0.0..=1.0).contains(&m) {
            return Err(Error::invalid(format!(
                "mean of arm {i} must lie in [0, 1], got {m}"
            )));
        }
    }
    Ok(())
}

/// One Bernoulli loss per arm in index order, each from a single uniform
/// draw.
fn bernoulli_losses(means: &[f64], rng: &mut SimRng) -> LossVector {
    let losses = means
        .iter()
        .map(|&m| f64::from(rng.gen::<f64>() < m))
        .collect();
    LossVector::new(losses).expect("0/1 losses are valid")
}

/// Stochastic source: a graph drawn once at construction and kept fixed,
/// with independent Bernoulli losses per arm and round.
pub struct BernoulliGap {
    graph: Arc<FeedbackGraph>,
    means: Vec<f64>,
    rng: SimRng,
}

impl BernoulliGap {
    /// Draws the fixed graph from `kind` and stores the per-arm means.
    pub fn new(kind: &GraphKind, k: usize, means: Vec<f64>, seed: u64) -> Result<Self> {
        validate_means(k, &means)?;
        let mut rng = rng_from_seed(seed);
        let graph = Arc::new(generate(kind, k, &mut rng)?);
        Ok(BernoulliGap { graph, means, rng })
    }

    /// The fixed graph.
    pub fn graph(&self) -> &FeedbackGraph {
        &self.graph
    }
}

impl RoundSource for BernoulliGap {
    fn k(&self) -> usize {
        self.graph.k()
    }

    fn next_round(&mut self, _t: u64, _history: &[PlayRecord]) -> Result<Round> {
        Ok(Round {
            graph: Arc::clone(&self.graph),
            losses: bernoulli_losses(&self.means, &mut self.rng),
        })
    }
}

/// Horizons shorter than `0.0064 alpha^3` are outside the regime where the
/// adversary's regret floor applies, so construction warns below it.
const LOWER_BOUND_REGIME: f64 = 0.0064;

/// Adversarial source realizing the regret floor: losses are 1 everywhere
/// except on a maximum independent set, where they are fair coin flips,
/// and one secretly chosen set member pays slightly less than fair. No set
/// member observes another, so the player must explore the set to find the
/// special arm.
pub struct LowerBoundAdversary {
    graph: Arc<FeedbackGraph>,
    horizon: u64,
    epsilon: f64,
    witness: Vec<usize>,
    special: usize,
    means: Vec<f64>,
    rng: SimRng,
    warnings: Vec<String>,
}

impl LowerBoundAdversary {
    /// Draws the fixed graph, finds a maximum independent set, and picks
    /// the special arm uniformly from it. `epsilon` defaults to
    /// `1 / (8 sqrt(2 ln(4/3) T / alpha))` and must land in `(0, 1/2)`.
    ///
    /// The exact independent-set search imposes the 64-node capacity of
    /// [`maximum_independent_set`].
    pub fn new(
        kind: &GraphKind,
        k: usize,
        horizon: u64,
        epsilon: Option<f64>,
        seed: u64,
    ) -> Result<Self> {
        if horizon == 0 {
            return Err(Error::invalid("horizon must be at least 1"));
        }
        let mut rng = rng_from_seed(seed);
        let graph = Arc::new(generate(kind, k, &mut rng)?);
        let witness = maximum_independent_set(&graph, k)?;
        let alpha = witness.len() as f64;
        let epsilon = epsilon.unwrap_or_else(|| {
            1.0 / (8.0 * (2.0 * (4f64 / 3.0).ln() * horizon as f64 / alpha).sqrt())
        });
        if !(epsilon > 0.0 && epsilon < 0.5) || !epsilon.is_finite() {
            return Err(Error::invalid(format!(
                "gap epsilon must lie in (0, 1/2), got {epsilon}; \
                 pass one explicitly or raise the horizon"
            )));
        }
        let special = witness[rng.gen_range(0..witness.len())];
        let mut means = vec![1.0; k];
        for &i in &witness {
            means[i] = 0.5;
        }
        means[special] = 0.5 - epsilon;
        let mut warnings = Vec::new();
        if (horizon as f64) < LOWER_BOUND_REGIME * alpha.powi(3) {
            warnings.push(format!(
                "horizon {horizon} is below {LOWER_BOUND_REGIME} * alpha^3 = {:.1} \
                 for alpha = {alpha}; the regret floor does not apply this short",
                LOWER_BOUND_REGIME * alpha.powi(3),
            ));
        }
        Ok(LowerBoundAdversary {
            graph,
            horizon,
            epsilon,
            witness,
            special,
            means,
            rng,
            warnings,
        })
    }

    /// The fixed graph.
    pub fn graph(&self) -> &FeedbackGraph {
        &self.graph
    }

    /// The gap between the special arm and the rest of the set.
    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    /// The maximum independent set the adversary hides in.
    pub fn witness(&self) -> &[usize] {
        &self.witness
    }

    /// The secretly better arm.
    pub fn special_arm(&self) -> usize {
        self.special
    }
}

impl RoundSource for LowerBoundAdversary {
    fn k(&self) -> usize {
        self.graph.k()
    }

    fn horizon(&self) -> Option<u64> {
        Some(self.horizon)
    }

    fn warnings(&self) -> &[String] {
        &self.warnings
    }

    fn next_round(&mut self, _t: u64, _history: &[PlayRecord]) -> Result<Round> {
        Ok(Round {
            graph: Arc::clone(&self.graph),
            losses: bernoulli_losses(&self.means, &mut self.rng),
        })
    }
}

/// Stochastic source with a fresh random graph every round: each ordered
/// pair becomes an arc independently with the given density, then losses
/// draw as in [`BernoulliGap`].
pub struct ErdosRenyiProcess {
    k: usize,
    density: f64,
    means: Vec<f64>,
    rng: SimRng,
}

impl ErdosRenyiProcess {
    /// Stores the arc density (in `[0, 1]`) and per-arm means.
    pub fn new(k: usize, density: f64, means: Vec<f64>, seed: u64) -> Result<Self> {
        if k == 0 {
            return Err(Error::invalid("need at least one arm"));
        }
        if !(0.0..=1.0).contains(&density) || !density.is_finite() {
            return Err(Error::invalid(format!(
                "arc density must lie in [0, 1], got {density}"
            )));
        }
        validate_means(k, &means)?;
        Ok(ErdosRenyiProcess {
            k,
            density,
            means,
            rng: rng_from_seed(seed),
        })
    }
}

impl RoundSource for ErdosRenyiProcess {
    fn k(&self) -> usize {
        self.k
    }

    fn next_round(&mut self, _t: u64, _history: &[PlayRecord]) -> Result<Round> {
        let graph = generate(
            &GraphKind::ErdosRenyi {
                density: self.density,
            },
            self.k,
            &mut self.rng,
        )?;
        Ok(Round {
            graph: Arc::new(graph),
            losses: bernoulli_losses(&self.means, &mut self.rng),
        })
    }
}

/// Deterministic source replaying a recorded interaction from a text log:
///
/// ```text
/// # comment lines start with '#'
/// K 3
/// T 2
/// 0 1
/// 1 2
/// ---
/// 0.5 0.25 1.0
/// ---
/// 0.0 0.1 0.2
/// ```
///
/// After the `K`/`T` header, each round is a block of arc lines closed by
/// `---` followed by one line of `K` losses. Blank lines are skipped
/// anywhere.
#[derive(Clone, Debug)]
pub struct ReplayLog {
    k: usize,
    rounds: Vec<Round>,
}

impl ReplayLog {
    /// Parses a log from text. Errors carry 1-based line numbers.
    pub fn parse(text: &str) -> Result<Self> {
        enum Expect {
            HeaderK,
            HeaderT,
            Arcs,
            Losses,
        }
        let mut state = Expect::HeaderK;
        let mut k = 0usize;
        let mut total = 0u64;
        let mut arcs: Vec<(usize, usize)> = Vec::new();
        let mut rounds: Vec<Round> = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let parse_err = |message: String| Error::Parse {
                line: idx + 1,
                message,
            };
            let mut tokens = line.split_whitespace();
            match state {
                Expect::HeaderK => match (tokens.next(), tokens.next(), tokens.next()) {
                    (Some("K"), Some(v), None) => {
                        k = v
                            .parse()
                            .map_err(|_| parse_err(format!("bad node count {v:?}")))?;
                        if k == 0 {
                            return Err(parse_err("node count must be positive".into()));
                        }
                        state = Expect::HeaderT;
                    }
                    _ => {
                        return Err(parse_err(format!(
                            "expected header `K <count>`, got {line:?}"
                        )))
                    }
                },
                Expect::HeaderT => match (tokens.next(), tokens.next(), tokens.next()) {
                    (Some("T"), Some(v), None) => {
                        total = v
                            .parse()
                            .map_err(|_| parse_err(format!("bad round count {v:?}")))?;
                        state = Expect::Arcs;
                    }
                    _ => {
                        return Err(parse_err(format!(
                            "expected header `T <count>`, got {line:?}"
                        )))
                    }
                },
                Expect::Arcs => {
                    if rounds.len() as u64 == total {
                        return Err(parse_err(format!(
                            "unexpected content after round {total}: {line:?}"
                        )));
                    }
                    if line == "---" {
                        state = Expect::Losses;
                        continue;
                    }
                    let (a, b) = match (tokens.next(), tokens.next(), tokens.next()) {
                        (Some(a), Some(b), None) => (a, b),
                        _ => {
                            return Err(parse_err(format!(
                                "expected arc `i j` or `---`, got {line:?}"
                            )))
                        }
                    };
                    let i: usize = a
                        .parse()
                        .map_err(|_| parse_err(format!("bad arc endpoint {a:?}")))?;
                    let j: usize = b
                        .parse()
                        .map_err(|_| parse_err(format!("bad arc endpoint {b:?}")))?;
                    if i >= k || j >= k {
                        return Err(parse_err(format!(
                            "arc ({i}, {j}) out of range for k = {k}"
                        )));
                    }
                    arcs.push((i, j));
                }
                Expect::Losses => {
                    let mut losses = Vec::with_capacity(k);
                    for tok in line.split_whitespace() {
                        let v: f64 = tok
                            .parse()
                            .map_err(|_| parse_err(format!("bad loss {tok:?}")))?;
                        losses.push(v);
                    }
                    if losses.len() != k {
                        return Err(parse_err(format!(
                            "expected {k} losses, got {}",
                            losses.len()
                        )));
                    }
                    let graph = FeedbackGraph::from_arcs(k, std::mem::take(&mut arcs))
                        .map_err(|e| parse_err(e.to_string()))?;
                    let losses =
                        LossVector::new(losses).map_err(|e| parse_err(e.to_string()))?;
                    rounds.push(Round {
                        graph: Arc::new(graph),
                        losses,
                    });
                    state = Expect::Arcs;
                }
            }
        }
        let last_line = text.lines().count().max(1);
        match state {
            Expect::HeaderK => Err(Error::Parse {
                line: last_line,
                message: "missing `K <count>` header".into(),
            }),
            Expect::HeaderT => Err(Error::Parse {
                line: last_line,
                message: "missing `T <count>` header".into(),
            }),
            Expect::Losses => Err(Error::Parse {
                line: last_line,
                message: "round ends after `---` without its loss line".into(),
            }),
            Expect::Arcs if (rounds.len() as u64) < total => Err(Error::Parse {
                line: last_line,
                message: format!("expected {total} rounds, found {}", rounds.len()),
            }),
            Expect::Arcs => Ok(ReplayLog { k, rounds }),
        }
    }

    /// Reads and parses a log file.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text)
    }
}

impl RoundSource for ReplayLog {
    fn k(&self) -> usize {
        self.k
    }

    fn horizon(&self) -> Option<u64> {
        Some(self.rounds.len() as u64)
    }

    fn next_round(&mut self, t: u64, _history: &[PlayRecord]) -> Result<Round> {
        self.rounds
            .get(t as usize - 1)
            .cloned()
            .ok_or(Error::EndOfStream {
                round: t,
                available: self.rounds.len() as u64,
            })
    }
}
