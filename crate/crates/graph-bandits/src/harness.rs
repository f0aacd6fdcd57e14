//! Experiment orchestration: configuration, the simulation loop, parallel
//! repetitions, aggregation, and CSV output.
//!
//! Reproducibility contract: every repetition `r` derives its own seed
//! from the master seed, then splits it into an environment substream
//! (index 0) and a policy substream (index 1). Repetitions are therefore
//! statistically independent yet individually replayable, results are
//! identical whatever the thread count, and re-running a configuration
//! reproduces its output byte for byte (CSV floats print in shortest
//! round-trip form).
//!
//! Regret accounting is counterfactual: the environment exposes the full
//! loss vector each round, the trace records the player's cumulative loss
//! minus the best single arm's cumulative loss over the same prefix, and
//! points land at every `stride` multiple.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::environments::{
    BernoulliGap, Environment, ErdosRenyiProcess, LowerBoundAdversary, PlayRecord, ReplayLog,
    RoundSource,
};
use crate::error::{Error, Result};
use crate::graph::GraphKind;
use crate::par::indexed_map;
use crate::policies::{
    elpp_tuned_eta, exp3_baseline, exp3set_tuned_eta, hedge_baseline, DomTuning, ElpP, Exp3Dom,
    Exp3Set, Policy, RoundFeedback,
};
use crate::rng::{derive_seed, rng_from_seed, SimRng};

/// Which algorithm to run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum PolicyName {
    /// Uninformed exponential weights with graph-based importance weights.
    #[serde(rename = "exp3set")]
    Exp3Set,
    /// Informed band policy exploring a greedy dominating set.
    #[serde(rename = "exp3dom")]
    Exp3Dom,
    /// Informed high-probability policy exploring along the coverage LP.
    #[serde(rename = "elpp")]
    ElpP,
    /// Full-information baseline.
    #[serde(rename = "hedge")]
    Hedge,
    /// Bandit baseline without explicit exploration.
    #[serde(rename = "exp3")]
    Exp3,
}

impl PolicyName {
    fn as_str(self) -> &'static str {
        match self {
            PolicyName::Exp3Set => "exp3set",
            PolicyName::Exp3Dom => "exp3dom",
            PolicyName::ElpP => "elpp",
            PolicyName::Hedge => "hedge",
            PolicyName::Exp3 => "exp3",
        }
    }
}

/// Policy choice plus parameters. Exactly the parameters the named policy
/// uses may be present; `eta` and `eta_bound_sum` are mutually exclusive
/// ways to set the learning rate (directly, or tuned from a bound on the
/// summed per-round graph sizes over the horizon).
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolicySpec {
    /// Algorithm to run.
    pub name: PolicyName,
    /// Learning rate, set directly.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eta: Option<f64>,
    /// Tunes the learning rate from this bound instead of setting it.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eta_bound_sum: Option<f64>,
    /// Confidence level of the high-probability policy.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    /// Fixed per-band exploration rates for the band policy.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gammas: Option<Vec<f64>>,
    /// Self-tuning doubling mode for the band policy.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub doubling: Option<bool>,
}

impl PolicySpec {
    /// A spec with only the name set; fill parameters as needed.
    pub fn named(name: PolicyName) -> Self {
        PolicySpec {
            name,
            eta: None,
            eta_bound_sum: None,
            delta: None,
            gammas: None,
            doubling: None,
        }
    }

    fn reject_unused(&self, field: &str, present: bool) -> Result<()> {
        if present {
            return Err(Error::config(format!(
                "policy {:?} does not use `{field}`",
                self.name.as_str()
            )));
        }
        Ok(())
    }

    fn resolve_eta(&self, k: usize) -> Result<f64> {
        match (self.eta, self.eta_bound_sum) {
            (Some(eta), None) => Ok(eta),
            (None, Some(bound)) => exp3set_tuned_eta(k, bound),
            (Some(_), Some(_)) => Err(Error::config(
                "set `eta` or `eta_bound_sum`, not both",
            )),
            (None, None) => Err(Error::config(
                "policy needs `eta` or `eta_bound_sum`",
            )),
        }
    }

    /// Builds the policy for `k` arms, validating parameter coherence.
    pub fn build(&self, k: usize) -> Result<Box<dyn Policy>> {
        match self.name {
            PolicyName::Exp3Set | PolicyName::Hedge | PolicyName::Exp3 => {
                self.reject_unused("delta", self.delta.is_some())?;
                self.reject_unused("gammas", self.gammas.is_some())?;
                self.reject_unused("doubling", self.doubling.is_some())?;
                let eta = self.resolve_eta(k)?;
                Ok(match self.name {
                    PolicyName::Exp3Set => Box::new(Exp3Set::new(k, eta)?),
                    PolicyName::Hedge => Box::new(hedge_baseline(k, eta)?),
                    _ => Box::new(exp3_baseline(k, eta)?),
                })
            }
            PolicyName::Exp3Dom => {
                self.reject_unused("eta", self.eta.is_some())?;
                self.reject_unused("eta_bound_sum", self.eta_bound_sum.is_some())?;
                self.reject_unused("delta", self.delta.is_some())?;
                let doubling = self.doubling.unwrap_or(false);
                let tuning = match (&self.gammas, doubling) {
                    (Some(_), true) => {
                        return Err(Error::config(
                            "set `gammas` or `doubling = true`, not both",
                        ))
                    }
                    (Some(gammas), false) => DomTuning::Fixed(gammas.clone()),
                    (None, true) => DomTuning::Doubling,
                    (None, false) => {
                        return Err(Error::config(
                            "policy needs `gammas` or `doubling = true`",
                        ))
                    }
                };
                Ok(Box::new(Exp3Dom::new(k, tuning)?))
            }
            PolicyName::ElpP => {
                self.reject_unused("gammas", self.gammas.is_some())?;
                self.reject_unused("doubling", self.doubling.is_some())?;
                let delta = self
                    .delta
                    .ok_or_else(|| Error::config("policy needs `delta`"))?;
                let eta = match (self.eta, self.eta_bound_sum) {
                    (Some(eta), None) => eta,
                    (None, Some(bound)) => elpp_tuned_eta(k, delta, bound)?,
                    (Some(_), Some(_)) => {
                        return Err(Error::config("set `eta` or `eta_bound_sum`, not both"))
                    }
                    (None, None) => {
                        return Err(Error::config("policy needs `eta` or `eta_bound_sum`"))
                    }
                };
                Ok(Box::new(ElpP::new(k, delta, eta)?))
            }
        }
    }
}

/// Which graph family to draw.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GraphName {
    /// Every ordered pair is an arc.
    Clique,
    /// No arcs at all.
    Empty,
    /// Arc from every higher index to every lower index.
    TotalOrder,
    /// Each ordered pair independently with the given density.
    ErdosRenyi,
    /// Undirected edge list (each edge becomes two arcs).
    Symmetric,
    /// Explicit arc list.
    Explicit,
}

/// Graph family plus its parameters.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphSpec {
    /// Family to draw from.
    pub kind: GraphName,
    /// Arc probability (Erdos-Renyi only).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub density: Option<f64>,
    /// Edge list (symmetric only).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub edges: Option<Vec<(usize, usize)>>,
    /// Arc list (explicit only).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub arcs: Option<Vec<(usize, usize)>>,
}

impl GraphSpec {
    /// A spec with only the kind set.
    pub fn kind(kind: GraphName) -> Self {
        GraphSpec {
            kind,
            density: None,
            edges: None,
            arcs: None,
        }
    }

    /// Converts to the generator input, validating parameter coherence.
    pub fn to_kind(&self) -> Result<GraphKind> {
        let reject = |field: &str, present: bool| -> Result<()> {
            if present {
                return Err(Error::config(format!(
                    "graph kind {:?} does not use `{field}`",
                    self.kind
                )));
            }
            Ok(())
        };
        let plain = |kind: GraphKind| -> Result<GraphKind> {
            reject("density", self.density.is_some())?;
            reject("edges", self.edges.is_some())?;
            reject("arcs", self.arcs.is_some())?;
            Ok(kind)
        };
        match self.kind {
            GraphName::Clique => plain(GraphKind::Clique),
            GraphName::Empty => plain(GraphKind::Empty),
            GraphName::TotalOrder => plain(GraphKind::TotalOrder),
            GraphName::ErdosRenyi => {
                reject("edges", self.edges.is_some())?;
                reject("arcs", self.arcs.is_some())?;
                let density = self
                    .density
                    .ok_or_else(|| Error::config("erdos_renyi graph needs `density`"))?;
                if !(0.0..=1.0).contains(&density) || !density.is_finite() {
                    return Err(Error::config(format!(
                        "arc density must lie in [0, 1], got {density}"
                    )));
                }
                Ok(GraphKind::ErdosRenyi { density })
            }
            GraphName::Symmetric => {
                reject("density", self.density.is_some())?;
                reject("arcs", self.arcs.is_some())?;
                let edges = self
                    .edges
                    .clone()
                    .ok_or_else(|| Error::config("symmetric graph needs `edges`"))?;
                Ok(GraphKind::Symmetric { edges })
            }
            GraphName::Explicit => {
                reject("density", self.density.is_some())?;
                reject("edges", self.edges.is_some())?;
                let arcs = self
                    .arcs
                    .clone()
                    .ok_or_else(|| Error::config("explicit graph needs `arcs`"))?;
                Ok(GraphKind::Explicit { arcs })
            }
        }
    }
}

/// Which loss/graph process to play against.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EnvName {
    /// Fixed graph, independent Bernoulli losses per arm.
    BernoulliGap,
    /// The regret-floor adversary hiding a better arm in an independent set.
    LowerBound,
    /// Fresh random graph every round, Bernoulli losses.
    ErProcess,
    /// Replays a recorded log file.
    Replay,
}

/// Environment choice plus parameters; exactly the parameters the named
/// kind uses may be present.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnvSpec {
    /// Process to run.
    pub kind: EnvName,
    /// Graph to draw once at setup (fixed-graph kinds).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub graph: Option<GraphSpec>,
    /// Per-arm Bernoulli means.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub means: Option<Vec<f64>>,
    /// Gap handed to the regret-floor adversary (defaults from the horizon).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    /// Arc density of the per-round random graph process.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub density: Option<f64>,
    /// Log file to replay.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
}

impl EnvSpec {
    /// A spec with only the kind set.
    pub fn kind(kind: EnvName) -> Self {
        EnvSpec {
            kind,
            graph: None,
            means: None,
            epsilon: None,
            density: None,
            path: None,
        }
    }

    fn reject_unused(&self, field: &str, present: bool) -> Result<()> {
        if present {
            return Err(Error::config(format!(
                "environment kind {:?} does not use `{field}`",
                self.kind
            )));
        }
        Ok(())
    }

    /// Builds the round source for one repetition.
    pub fn build_source(&self, k: usize, horizon: u64, seed: u64) -> Result<Box<dyn RoundSource>> {
        match self.kind {
            EnvName::BernoulliGap => {
                self.reject_unused("epsilon", self.epsilon.is_some())?;
                self.reject_unused("density", self.density.is_some())?;
                self.reject_unused("path", self.path.is_some())?;
                let graph = self
                    .graph
                    .as_ref()
                    .ok_or_else(|| Error::config("bernoulli_gap needs `graph`"))?
                    .to_kind()?;
                let means = self
                    .means
                    .clone()
                    .ok_or_else(|| Error::config("bernoulli_gap needs `means`"))?;
                Ok(Box::new(BernoulliGap::new(&graph, k, means, seed)?))
            }
            EnvName::LowerBound => {
                self.reject_unused("means", self.means.is_some())?;
                self.reject_unused("density", self.density.is_some())?;
                self.reject_unused("path", self.path.is_some())?;
                let graph = self
                    .graph
                    .as_ref()
                    .ok_or_else(|| Error::config("lower_bound needs `graph`"))?
                    .to_kind()?;
                Ok(Box::new(LowerBoundAdversary::new(
                    &graph,
                    k,
                    horizon,
                    self.epsilon,
                    seed,
                )?))
            }
            EnvName::ErProcess => {
                self.reject_unused("graph", self.graph.is_some())?;
                self.reject_unused("epsilon", self.epsilon.is_some())?;
                self.reject_unused("path", self.path.is_some())?;
                let density = self
                    .density
                    .ok_or_else(|| Error::config("er_process needs `density`"))?;
                let means = self
                    .means
                    .clone()
                    .ok_or_else(|| Error::config("er_process needs `means`"))?;
                Ok(Box::new(ErdosRenyiProcess::new(k, density, means, seed)?))
            }
            EnvName::Replay => {
                self.reject_unused("graph", self.graph.is_some())?;
                self.reject_unused("means", self.means.is_some())?;
                self.reject_unused("epsilon", self.epsilon.is_some())?;
                self.reject_unused("density", self.density.is_some())?;
                let path = self
                    .path
                    .as_ref()
                    .ok_or_else(|| Error::config("replay needs `path`"))?;
                let log = ReplayLog::load(path)?;
                if log.k() != k {
                    return Err(Error::config(format!(
                        "replay log has {} arms but the experiment declares {k}",
                        log.k()
                    )));
                }
                if log.horizon() < Some(horizon) {
                    return Err(Error::config(format!(
                        "replay log holds {} rounds but the experiment needs {horizon}",
                        log.horizon().unwrap_or(0)
                    )));
                }
                Ok(Box::new(log))
            }
        }
    }
}

/// A full experiment: policy, environment, horizon, repetitions, seeding,
/// and trace resolution.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Number of arms.
    pub k: usize,
    /// Rounds per repetition.
    pub horizon: u64,
    /// Independent repetitions to aggregate.
    pub repetitions: u32,
    /// Master seed; everything derives from it.
    pub seed: u64,
    /// Trace resolution: record at every multiple of this. Must divide the
    /// horizon.
    pub stride: u64,
    /// Where the CSV goes (the CLI writes to stdout when absent).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    /// Algorithm under test.
    pub policy: PolicySpec,
    /// Process it plays against.
    pub environment: EnvSpec,
}

impl ExperimentConfig {
    /// Validates the run-shape fields. Policy and environment parameters
    /// are validated by their builders at repetition setup.
    pub fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(Error::config("k must be at least 1"));
        }
        if self.horizon == 0 {
            return Err(Error::config("horizon must be at least 1"));
        }
        if self.repetitions == 0 {
            return Err(Error::config("repetitions must be at least 1"));
        }
        if self.stride == 0 || self.horizon % self.stride != 0 {
            return Err(Error::config(format!(
                "stride {} must be positive and divide the horizon {}",
                self.stride, self.horizon
            )));
        }
        Ok(())
    }
}

/// One recorded trace point of a single repetition.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TracePoint {
    /// Round the point was recorded at.
    pub round: u64,
    /// Player's cumulative loss minus the best arm's cumulative loss.
    pub regret: f64,
    /// Player's cumulative loss.
    pub player_loss: f64,
    /// Best single arm's cumulative loss over the same prefix.
    pub best_arm_loss: f64,
}

/// Regret trajectory of one repetition, one point per stride multiple.
#[derive(Clone, Debug, PartialEq)]
pub struct RegretTrace {
    /// Points in round order.
    pub points: Vec<TracePoint>,
}

impl RegretTrace {
    /// Regret at the horizon.
    pub fn final_regret(&self) -> f64 {
        self.points.last().map_or(0.0, |p| p.regret)
    }
}

/// One aggregated trace point across repetitions.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AggregatePoint {
    /// Round the point was recorded at.
    pub round: u64,
    /// Mean regret across repetitions.
    pub mean_regret: f64,
    /// Sample standard deviation of the regret (0 for one repetition).
    pub std_regret: f64,
    /// Mean cumulative player loss.
    pub mean_player_loss: f64,
    /// Mean cumulative loss of each repetition's best arm.
    pub best_arm_loss: f64,
}

/// Aggregated regret trajectory.
#[derive(Clone, Debug, PartialEq)]
pub struct AggregateTrace {
    /// Points in round order.
    pub points: Vec<AggregatePoint>,
}

impl AggregateTrace {
    /// Mean regret at the horizon.
    pub fn final_mean_regret(&self) -> f64 {
        self.points.last().map_or(0.0, |p| p.mean_regret)
    }
}

/// Everything a simulation returns.
#[derive(Clone, Debug)]
pub struct SimulationResult {
    /// The aggregated trace.
    pub aggregate: AggregateTrace,
    /// Per-repetition traces in repetition order.
    pub traces: Vec<RegretTrace>,
    /// Deduplicated environment warnings across repetitions.
    pub warnings: Vec<String>,
}

/// Plays one policy against one environment for `horizon` rounds,
/// recording a trace point at every `stride` multiple.
pub fn run_one(
    policy: &mut dyn Policy,
    env: &mut Environment,
    rng: &mut SimRng,
    horizon: u64,
    stride: u64,
) -> Result<RegretTrace> {
    if policy.k() != env.k() {
        return Err(Error::invalid(format!(
            "policy has {} arms but the environment has {}",
            policy.k(),
            env.k()
        )));
    }
    if stride == 0 || horizon % stride != 0 {
        return Err(Error::invalid(format!(
            "stride {stride} must be positive and divide the horizon {horizon}"
        )));
    }
    let k = policy.k();
    let informed = policy.informed();
    let mut history: Vec<PlayRecord> = Vec::with_capacity(horizon as usize);
    let mut player_cum = 0.0f64;
    let mut arm_cum = vec![0.0f64; k];
    let mut points = Vec::with_capacity((horizon / stride) as usize);
    for t in 1..=horizon {
        let round = env.round(t, &history)?.clone();
        let graph = round.graph.as_ref();
        let outcome = policy.act(informed.then_some(graph), rng)?;
        let action = outcome.action;
        let observed: Vec<(usize, f64)> = graph
            .observation_set(action)
            .into_iter()
            .map(|i| (i, round.losses.get(i)))
            .collect();
        policy.update(&RoundFeedback {
            graph,
            chosen: action,
            observed: &observed,
        })?;
        let loss = round.losses.get(action);
        player_cum += loss;
        for (cum, &l) in arm_cum.iter_mut().zip(round.losses.values()) {
            *cum += l;
        }
        history.push(PlayRecord { action, loss });
        if t % stride == 0 {
            let best = arm_cum.iter().copied().fold(f64::INFINITY, f64::min);
            let regret = player_cum - best;
            debug_assert!(
                regret.abs() <= t as f64 + 1e-9,
                "round {t}: regret {regret} outside [-t, t]"
            );
            points.push(TracePoint {
                round: t,
                regret,
                player_loss: player_cum,
                best_arm_loss: best,
            });
        }
    }
    Ok(RegretTrace { points })
}

/// Aggregates repetition traces point-wise: mean and sample standard
/// deviation (n - 1; zero for a single repetition), accumulated in
/// repetition order so results do not depend on scheduling.
pub fn aggregate_traces(traces: &[RegretTrace]) -> Result<AggregateTrace> {
    let Some(first) = traces.first() else {
        return Err(Error::invalid("nothing to aggregate"));
    };
    let len = first.points.len();
    for (r, trace) in traces.iter().enumerate() {
        if trace.points.len() != len {
            return Err(Error::invalid(format!(
                "trace {r} has {} points, expected {len}",
                trace.points.len()
            )));
        }
    }
    let n = traces.len() as f64;
    let mut points = Vec::with_capacity(len);
    for i in 0..len {
        let round = first.points[i].round;
        let mut mean_regret = 0.0;
        let mut mean_player = 0.0;
        let mut mean_best = 0.0;
        for trace in traces {
            let p = &trace.points[i];
            debug_assert_eq!(p.round, round);
            mean_regret += p.regret;
            mean_player += p.player_loss;
            mean_best += p.best_arm_loss;
        }
        mean_regret /= n;
        mean_player /= n;
        mean_best /= n;
        let std_regret = if traces.len() > 1 {
            let ss: f64 = traces
                .iter()
                .map(|t| (t.points[i].regret - mean_regret).powi(2))
                .sum();
            (ss / (n - 1.0)).sqrt()
        } else {
            0.0
        };
        points.push(AggregatePoint {
            round,
            mean_regret,
            std_regret,
            mean_player_loss: mean_player,
            best_arm_loss: mean_best,
        });
    }
    Ok(AggregateTrace { points })
}

/// Runs every repetition of a configuration and aggregates.
///
/// `threads` follows [`indexed_map`]: `None` uses the global thread pool,
/// `Some(n)` forces a pool of exactly `n`. Output is identical either way.
pub fn run_many(config: &ExperimentConfig, threads: Option<usize>) -> Result<SimulationResult> {
    config.validate()?;
    let reps = config.repetitions as usize;
    let outcomes = indexed_map(reps, threads, |rep| -> Result<(RegretTrace, Vec<String>)> {
        let rep_seed = derive_seed(config.seed, rep as u64);
        let env_seed = derive_seed(rep_seed, 0);
        let policy_seed = derive_seed(rep_seed, 1);
        let source = config
            .environment
            .build_source(config.k, config.horizon, env_seed)?;
        let mut env = Environment::new(source);
        let mut policy = config.policy.build(config.k)?;
        let mut rng = rng_from_seed(policy_seed);
        let warnings = env.warnings().to_vec();
        let trace = run_one(
            policy.as_mut(),
            &mut env,
            &mut rng,
            config.horizon,
            config.stride,
        )?;
        Ok((trace, warnings))
    });
    let mut traces = Vec::with_capacity(reps);
    let mut warnings: Vec<String> = Vec::new();
    for outcome in outcomes {
        let (trace, rep_warnings) = outcome?;
        for w in rep_warnings {
            if !warnings.contains(&w) {
                warnings.push(w);
            }
        }
        traces.push(trace);
    }
    let aggregate = aggregate_traces(&traces)?;
    Ok(SimulationResult {
        aggregate,
        traces,
        warnings,
    })
}

/// The exact CSV header emitted and required.
pub const CSV_HEADER: &str = "round,mean_regret,std_regret,mean_player_loss,best_arm_loss";

/// Renders an aggregated trace as CSV. Floats print in shortest
/// round-trip form, so equal traces render to equal bytes.
pub fn csv_string(trace: &AggregateTrace) -> String {
    let mut out = String::with_capacity(32 * (trace.points.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for p in &trace.points {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            p.round, p.mean_regret, p.std_regret, p.mean_player_loss, p.best_arm_loss
        ));
    }
    out
}

/// Parses CSV produced by [`csv_string`]. Errors carry 1-based line
/// numbers.
pub fn parse_csv(text: &str) -> Result<AggregateTrace> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, header)) if header.trim_end() == CSV_HEADER => {}
        Some((_, header)) => {
            return Err(Error::Parse {
                line: 1,
                message: format!("expected header {CSV_HEADER:?}, got {header:?}"),
            })
        }
        None => {
            return Err(Error::Parse {
                line: 1,
                message: "empty csv".into(),
            })
        }
    }
    let mut points = Vec::new();
    for (idx, raw) in lines {
        let line = raw.trim_end();
        if line.is_empty() {
            continue;
        }
        let parse_err = |message: String| Error::Parse {
            line: idx + 1,
            message,
        };
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 5 {
            return Err(parse_err(format!(
                "expected 5 fields, got {}",
                fields.len()
            )));
        }
        let round: u64 = fields[0]
            .parse()
            .map_err(|_| parse_err(format!("bad round {:?}", fields[0])))?;
        let mut nums = [0.0f64; 4];
        for (slot, field) in nums.iter_mut().zip(&fields[1..]) {
            *slot = field
                .parse()
                .map_err(|_| parse_err(format!("bad value {field:?}")))?;
        }
        points.push(AggregatePoint {
            round,
            mean_regret: nums[0],
            std_regret: nums[1],
            mean_player_loss: nums[2],
            best_arm_loss: nums[3],
        });
    }
    Ok(AggregateTrace { points })
}
