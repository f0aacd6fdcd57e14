//! Feedback graphs and their combinatorics.
//!
//! A [`FeedbackGraph`] is a directed graph over `k` actions with no
//! self-arcs and no duplicate arcs. Playing action `i` always reveals the
//! loss of `i` itself plus the loss of every out-neighbor of `i`; the
//! self-observation is implicit rather than stored, so the empty graph is
//! exactly bandit feedback and the clique is full information.
//!
//! Besides construction and generation of the standard families
//! ([`GraphKind`]), this module computes the combinatorial quantities the
//! regret analysis is phrased in:
//!
//! * [`independence_number`] — the independence number `alpha` of the
//!   undirected skeleton (exact branch-and-bound, capped),
//! * [`mas_size`] — the size `mas` of a maximum acyclic induced subgraph
//!   (exact subset DP, capped, or a fast peeling lower bound),
//! * [`domination_number`] — the exact domination number `gamma` (capped),
//! * [`greedy_dominating_set`] — the greedy cover used by the informed
//!   policies every round.
//!
//! Storage is a dense per-node bitmask for `k <= 64` and sorted arc lists
//! above; both expose identical semantics.

use std::fmt::Write as _;

use rand::Rng;

use crate::error::{Error, Result};
use crate::rng::SimRng;

/// Largest `k` for which exact independence numbers are computed by default.
pub const ALPHA_EXACT_CAP: usize = 64;
/// Largest `k` for which the exact maximum-acyclic-subgraph DP runs.
pub const MAS_EXACT_CAP: usize = 20;
/// Largest `k` for which the exact domination number is computed.
pub const GAMMA_EXACT_CAP: usize = 20;

/// Directed feedback graph over `k` actions.
///
/// Invariants: no self-arcs, no duplicate arcs, all endpoints in `0..k`.
/// Self-observation is implicit: [`FeedbackGraph::observes`]`(i, i)` is
/// always true even though `(i, i)` is never stored.
#[derive(Clone, Debug)]
pub struct FeedbackGraph {
    k: usize,
    store: Store,
}

#[derive(Clone, Debug)]
enum Store {
    /// `out[i]` has bit `j` set iff arc `(i, j)` exists; `inn` mirrors it.
    Dense { out: Vec<u64>, inn: Vec<u64> },
    /// Sorted out- and in-neighbor lists for `k > 64`.
    Sparse { out: Vec<Vec<u32>>, inn: Vec<Vec<u32>> },
}

/// Iterator over a node's neighbors in either storage mode.
pub struct Neighbors<'a> {
    inner: NeighborsInner<'a>,
}

enum NeighborsInner<'a> {
    Dense(u64),
    Sparse(std::slice::Iter<'a, u32>),
}

impl Iterator for Neighbors<'_> {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        match &mut self.inner {
            NeighborsInner::Dense(mask) => {
                if *mask == 0 {
                    None
                } else {
                    let b = mask.trailing_zeros() as usize;
                    *mask &= *mask - 1;
                    Some(b)
                }
            }
            NeighborsInner::Sparse(it) => it.next().map(|&j| j as usize),
        }
    }
}

impl FeedbackGraph {
    /// Builds a graph from an arc list.
    ///
    /// Duplicate arcs collapse to one; self-arcs are dropped (self-
    /// observation is already implicit). Endpoints outside `0..k` and
    /// `k = 0` are rejected.
    pub fn from_arcs<I>(k: usize, arcs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        if k == 0 {
            return Err(Error::invalid("graph needs at least one node"));
        }
        let mut store = Store::empty(k);
        for (i, j) in arcs {
            if i >= k || j >= k {
                return Err(Error::invalid(format!(
                    "arc ({i}, {j}) out of range for k = {k}"
                )));
            }
            if i != j {
                store.insert(i, j);
            }
        }
        store.finish();
        Ok(FeedbackGraph { k, store })
    }

    /// The graph on `k` nodes with no arcs (bandit feedback).
    pub fn empty(k: usize) -> Result<Self> {
        Self::from_arcs(k, std::iter::empty())
    }

    /// Number of actions.
    pub fn k(&self) -> usize {
        self.k
    }

    /// Number of stored arcs.
    pub fn arc_count(&self) -> usize {
        match &self.store {
            Store::Dense { out, .. } => out.iter().map(|m| m.count_ones() as usize).sum(),
            Store::Sparse { out, .. } => out.iter().map(Vec::len).sum(),
        }
    }

    /// Whether arc `(i, j)` is stored. Self-arcs are never stored, so
    /// `has_arc(i, i)` is false; use [`FeedbackGraph::observes`] for the
    /// observation relation.
    pub fn has_arc(&self, i: usize, j: usize) -> bool {
        debug_assert!(i < self.k && j < self.k);
        match &self.store {
            Store::Dense { out, .. } => out[i] >> j & 1 == 1,
            Store::Sparse { out, .. } => out[i].binary_search(&(j as u32)).is_ok(),
        }
    }

    /// Whether playing `i` reveals the loss of `j` (true when `i = j`).
    pub fn observes(&self, i: usize, j: usize) -> bool {
        i == j || self.has_arc(i, j)
    }

    /// Out-neighbors of `i` in ascending order (excludes `i`).
    pub fn out_neighbors(&self, i: usize) -> Neighbors<'_> {
        match &self.store {
            Store::Dense { out, .. } => Neighbors {
                inner: NeighborsInner::Dense(out[i]),
            },
            Store::Sparse { out, .. } => Neighbors {
                inner: NeighborsInner::Sparse(out[i].iter()),
            },
        }
    }

    /// In-neighbors of `i` in ascending order (excludes `i`).
    pub fn in_neighbors(&self, i: usize) -> Neighbors<'_> {
        match &self.store {
            Store::Dense { inn, .. } => Neighbors {
                inner: NeighborsInner::Dense(inn[i]),
            },
            Store::Sparse { inn, .. } => Neighbors {
                inner: NeighborsInner::Sparse(inn[i].iter()),
            },
        }
    }

    /// Out-degree of `i` (self excluded).
    pub fn out_degree(&self, i: usize) -> usize {
        match &self.store {
            Store::Dense { out, .. } => out[i].count_ones() as usize,
            Store::Sparse { out, .. } => out[i].len(),
        }
    }

    /// In-degree of `i` (self excluded).
    pub fn in_degree(&self, i: usize) -> usize {
        match &self.store {
            Store::Dense { inn, .. } => inn[i].count_ones() as usize,
            Store::Sparse { inn, .. } => inn[i].len(),
        }
    }

    /// All arcs in ascending `(i, j)` order.
    pub fn arcs(&self) -> Vec<(usize, usize)> {
        let mut v = Vec::with_capacity(self.arc_count());
        for i in 0..self.k {
            for j in self.out_neighbors(i) {
                v.push((i, j));
            }
        }
        v
    }

    /// The set of actions whose loss is revealed by playing `i`:
    /// `i` itself plus its out-neighbors, in ascending order.
    pub fn observation_set(&self, i: usize) -> Vec<usize> {
        let mut s: Vec<usize> = self.out_neighbors(i).collect();
        let pos = s.partition_point(|&j| j < i);
        s.insert(pos, i);
        s
    }

    /// True when every arc has its reverse.
    pub fn is_symmetric(&self) -> bool {
        (0..self.k).all(|i| self.out_neighbors(i).all(|j| self.has_arc(j, i)))
    }

    /// Dense out/in masks, available only for `k <= 64`.
    fn dense_masks(&self) -> Option<(&[u64], &[u64])> {
        match &self.store {
            Store::Dense { out, inn } => Some((out, inn)),
            Store::Sparse { .. } => None,
        }
    }

    /// Undirected-skeleton neighbor masks (`out | in`), for `k <= 64`.
    fn skeleton_masks(&self) -> Option<Vec<u64>> {
        let (out, inn) = self.dense_masks()?;
        Some(out.iter().zip(inn).map(|(o, i)| o | i).collect())
    }
}

impl PartialEq for FeedbackGraph {
    fn eq(&self, other: &Self) -> bool {
        self.k == other.k && self.arcs() == other.arcs()
    }
}

impl Eq for FeedbackGraph {}

impl Store {
    fn empty(k: usize) -> Self {
        if k <= 64 {
            Store::Dense {
                out: vec![0; k],
                inn: vec![0; k],
            }
        } else {
            Store::Sparse {
                out: vec![Vec::new(); k],
                inn: vec![Vec::new(); k],
            }
        }
    }

    fn insert(&mut self, i: usize, j: usize) {
        match self {
            Store::Dense { out, inn } => {
                out[i] |= 1 << j;
                inn[j] |= 1 << i;
            }
            Store::Sparse { out, inn } => {
                out[i].push(j as u32);
                inn[j].push(i as u32);
            }
        }
    }

    fn finish(&mut self) {
        if let Store::Sparse { out, inn } = self {
            for list in out.iter_mut().chain(inn.iter_mut()) {
                list.sort_unstable();
                list.dedup();
            }
        }
    }
}

/// Standard graph families plus explicit constructions.
#[derive(Clone, Debug, PartialEq)]
pub enum GraphKind {
    /// All arcs present: full information.
    Clique,
    /// No arcs: bandit feedback.
    Empty,
    /// Arc `(j, i)` for every `j > i`: each action also observes all
    /// lower-indexed actions. A DAG, so `mas = k` while `gamma = 1`.
    TotalOrder,
    /// Every ordered pair `(i, j)`, `i != j`, drawn independently with
    /// probability `density`.
    ErdosRenyi {
        /// Per-arc inclusion probability in `[0, 1]`.
        density: f64,
    },
    /// Undirected edge list; each edge contributes both arcs.
    Symmetric {
        /// Edges as unordered pairs.
        edges: Vec<(usize, usize)>,
    },
    /// Exact arc list.
    Explicit {
        /// Directed arcs.
        arcs: Vec<(usize, usize)>,
    },
}

/// Builds a graph of the given kind on `k` nodes.
///
/// Only `ErdosRenyi` consumes randomness: it draws one uniform variate per
/// ordered pair in row-major order, so the result is a pure function of
/// `(kind, k, rng state)`.
pub fn generate(kind: &GraphKind, k: usize, rng: &mut SimRng) -> Result<FeedbackGraph> {
    if k == 0 {
        return Err(Error::invalid("graph needs at least one node"));
    }
    match kind {
        GraphKind::Clique => {
            let arcs = (0..k).flat_map(|i| (0..k).filter(move |&j| j != i).map(move |j| (i, j)));
            FeedbackGraph::from_arcs(k, arcs)
        }
        GraphKind::Empty => FeedbackGraph::empty(k),
        GraphKind::TotalOrder => {
            let arcs = (0..k).flat_map(|j| (0..j).map(move |i| (j, i)));
            FeedbackGraph::from_arcs(k, arcs)
        }
        GraphKind::ErdosRenyi { density } => {
            if !(0.0..=1.0).contains(density) {
                return Err(Error::invalid(format!(
                    "erdos-renyi density must lie in [0, 1], got {density}"
                )));
            }
            let mut arcs = Vec::new();
            for i in 0..k {
                for j in 0..k {
                    if i != j && rng.gen::<f64>() < *density {
                        arcs.push((i, j));
                    }
                }
            }
            FeedbackGraph::from_arcs(k, arcs)
        }
        GraphKind::Symmetric { edges } => {
            let arcs = edges.iter().flat_map(|&(i, j)| [(i, j), (j, i)]);
            FeedbackGraph::from_arcs(k, arcs)
        }
        GraphKind::Explicit { arcs } => FeedbackGraph::from_arcs(k, arcs.iter().copied()),
    }
}

/// Greedy dominating set: repeatedly selects the action whose observation
/// set covers the most still-uncovered actions (ties to the lowest index)
/// until everything is covered. Returns actions in selection order.
///
/// The result always dominates the graph; its size is within the standard
/// greedy set-cover factors of the optimum, which the verification suites
/// check empirically.
pub fn greedy_dominating_set(g: &FeedbackGraph) -> Vec<usize> {
    let k = g.k();
    let mut covered = vec![false; k];
    let mut remaining = k;
    let mut picked = Vec::new();
    while remaining > 0 {
        let mut best = 0usize;
        let mut best_gain = 0usize;
        for i in 0..k {
            let mut gain = usize::from(!covered[i]);
            for j in g.out_neighbors(i) {
                gain += usize::from(!covered[j]);
            }
            if gain > best_gain {
                best_gain = gain;
                best = i;
            }
        }
        debug_assert!(best_gain > 0, "uncovered node must produce gain");
        picked.push(best);
        if !covered[best] {
            covered[best] = true;
            remaining -= 1;
        }
        for j in g.out_neighbors(best) {
            if !covered[j] {
                covered[j] = true;
                remaining -= 1;
            }
        }
    }
    picked
}

/// True when `set` dominates `g`: every action is in `set` or is an
/// out-neighbor of some member of `set`.
pub fn is_dominating_set(g: &FeedbackGraph, set: &[usize]) -> bool {
    let mut covered = vec![false; g.k()];
    for &i in set {
        covered[i] = true;
        for j in g.out_neighbors(i) {
            covered[j] = true;
        }
    }
    covered.iter().all(|&c| c)
}

/// A maximum independent set of the undirected skeleton, found by exact
/// branch-and-bound. Deterministic: ties resolve toward lower indices.
///
/// Errors with `CapacityExceeded` when `k` exceeds `cap` or the 64-node
/// representation limit of the exact search.
pub fn maximum_independent_set(g: &FeedbackGraph, cap: usize) -> Result<Vec<usize>> {
    let k = g.k();
    let cap = cap.min(ALPHA_EXACT_CAP);
    if k > cap {
        return Err(Error::CapacityExceeded {
            what: "exact independence number",
            k,
            cap,
        });
    }
    let nbr = g.skeleton_masks().expect("k <= 64 is stored densely");
    let full: u64 = if k == 64 { !0 } else { (1u64 << k) - 1 };
    let mut best_mask = 0u64;
    let mut best_size = 0usize;
    branch_mis(full, 0, 0, &nbr, &mut best_mask, &mut best_size);
    let mut set: Vec<usize> = (0..k).filter(|&i| best_mask >> i & 1 == 1).collect();
    set.sort_unstable();
    Ok(set)
}

/// Branch-and-bound core for [`maximum_independent_set`]: `cand` holds the
/// still-eligible vertices, `cur`/`size` the current independent set.
fn branch_mis(cand: u64, cur: u64, size: usize, nbr: &[u64], best_mask: &mut u64, best: &mut usize) {
    if size + cand.count_ones() as usize <= *best {
        return; // even taking every candidate cannot beat the incumbent
    }
    if cand == 0 {
        if size > *best {
            *best = size;
            *best_mask = cur;
        }
        return;
    }
    // Pivot on the candidate with the most candidate-neighbors: including it
    // removes the most vertices, excluding it prunes a dense branch early.
    let mut pivot = cand.trailing_zeros() as usize;
    let mut pivot_deg = 0u32;
    let mut scan = cand;
    while scan != 0 {
        let v = scan.trailing_zeros() as usize;
        scan &= scan - 1;
        let deg = (nbr[v] & cand).count_ones();
        if deg > pivot_deg {
            pivot_deg = deg;
            pivot = v;
        }
    }
    let bit = 1u64 << pivot;
    branch_mis(cand & !bit & !nbr[pivot], cur | bit, size + 1, nbr, best_mask, best);
    branch_mis(cand & !bit, cur, size, nbr, best_mask, best);
}

/// Exact independence number of the undirected skeleton, capped at `cap`
/// (and at the 64-node search limit). See [`maximum_independent_set`].
pub fn independence_number(g: &FeedbackGraph, cap: usize) -> Result<usize> {
    Ok(maximum_independent_set(g, cap)?.len())
}

/// Independence number if it fits under [`ALPHA_EXACT_CAP`], otherwise a
/// greedy clique-cover upper bound. The flag is true when the value is
/// exact. Tuning code that consumes this accepts the upper bound.
pub fn independence_estimate(g: &FeedbackGraph) -> (usize, bool) {
    if g.k() <= ALPHA_EXACT_CAP {
        let alpha = independence_number(g, ALPHA_EXACT_CAP).expect("within cap");
        return (alpha, true);
    }
    // Cover the skeleton greedily by cliques; an independent set meets each
    // clique at most once, so the number of cliques bounds alpha from above.
    let k = g.k();
    let mutual = |a: usize, b: usize| g.has_arc(a, b) && g.has_arc(b, a);
    let mut assigned = vec![false; k];
    let mut cliques = 0usize;
    for v in 0..k {
        if assigned[v] {
            continue;
        }
        cliques += 1;
        assigned[v] = true;
        let mut members = vec![v];
        for u in v + 1..k {
            if !assigned[u] && members.iter().all(|&m| mutual(m, u)) {
                assigned[u] = true;
                members.push(u);
            }
        }
    }
    (cliques, false)
}

/// How [`mas_size`] should compute its answer.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MasMode {
    /// Exact subset DP, available for `k <=` [`MAS_EXACT_CAP`].
    Exact,
    /// Peeling heuristic: a fast lower bound on the exact value.
    Peel,
}

/// Size of a maximum acyclic induced subgraph.
///
/// `Exact` runs a DP over vertex subsets (a subset is acyclic iff it can be
/// emptied by repeatedly removing a vertex with no in-arcs from the rest)
/// and errors with `CapacityExceeded` past [`MAS_EXACT_CAP`]. `Peel`
/// repeatedly takes the vertex with minimum in-degree (ties to the lowest
/// index), deletes it together with all its in-neighbors, and counts the
/// picks; the picked set always induces an acyclic subgraph, so the count
/// is a lower bound on the exact value.
pub fn mas_size(g: &FeedbackGraph, mode: MasMode) -> Result<usize> {
    match mode {
        MasMode::Exact => mas_exact(g),
        MasMode::Peel => Ok(mas_peel(g)),
    }
}

fn mas_exact(g: &FeedbackGraph) -> Result<usize> {
    let k = g.k();
    if k > MAS_EXACT_CAP {
        return Err(Error::CapacityExceeded {
            what: "exact maximum acyclic subgraph",
            k,
            cap: MAS_EXACT_CAP,
        });
    }
    let (_, inn) = g.dense_masks().expect("k <= 20 is stored densely");
    // acyclic[s] = the induced subgraph on subset s has a topological order.
    // Removing a source reduces s to a smaller subset, so a forward sweep
    // over subsets in numeric order sees every predecessor first.
    let n = 1usize << k;
    let mut acyclic = vec![false; n];
    acyclic[0] = true;
    let mut best = 0usize;
    for s in 1..n {
        let mut scan = s as u64;
        while scan != 0 {
            let v = scan.trailing_zeros() as usize;
            scan &= scan - 1;
            let rest = s & !(1usize << v);
            if inn[v] & rest as u64 == 0 && acyclic[rest] {
                acyclic[s] = true;
                break;
            }
        }
        if acyclic[s] {
            best = best.max(s.count_ones() as usize);
        }
    }
    Ok(best)
}

fn mas_peel(g: &FeedbackGraph) -> usize {
    let k = g.k();
    let mut alive = vec![true; k];
    let mut count = 0usize;
    loop {
        // Minimum in-degree among surviving vertices, ties to lowest index.
        let mut pick = None;
        let mut pick_deg = usize::MAX;
        for i in 0..k {
            if !alive[i] {
                continue;
            }
            let deg = g.in_neighbors(i).filter(|&j| alive[j]).count();
            if deg < pick_deg {
                pick_deg = deg;
                pick = Some(i);
            }
        }
        let Some(i) = pick else { break };
        count += 1;
        alive[i] = false;
        for j in g.in_neighbors(i) {
            alive[j] = false;
        }
    }
    count
}

/// Exact domination number: the smallest number of actions whose
/// observation sets cover everything. Errors with `CapacityExceeded` past
/// [`GAMMA_EXACT_CAP`].
pub fn domination_number(g: &FeedbackGraph, cap: usize) -> Result<usize> {
    let k = g.k();
    let cap = cap.min(GAMMA_EXACT_CAP);
    if k > cap {
        return Err(Error::CapacityExceeded {
            what: "exact domination number",
            k,
            cap,
        });
    }
    let (out, _) = g.dense_masks().expect("k <= 20 is stored densely");
    let cover: Vec<u64> = (0..k).map(|i| out[i] | 1 << i).collect();
    let full: u64 = if k == 64 { !0 } else { (1u64 << k) - 1 };
    for size in 1..=k {
        // Gosper's hack: enumerate all k-bit masks with `size` bits set.
        let mut mask: u64 = (1u64 << size) - 1;
        while mask < 1u64 << k {
            let mut union = 0u64;
            let mut scan = mask;
            while scan != 0 {
                let v = scan.trailing_zeros() as usize;
                scan &= scan - 1;
                union |= cover[v];
            }
            if union == full {
                return Ok(size);
            }
            let c = mask & mask.wrapping_neg();
            let r = mask + c;
            mask = (((r ^ mask) >> 2) / c) | r;
        }
    }
    unreachable!("the full vertex set always dominates")
}

/// Parses the plain-text graph format:
///
/// ```text
/// # comment lines start with '#'
/// K 4
/// 0 1
/// 2 0
/// ```
///
/// The first significant line declares the node count; every following line
/// is one arc `i j`. Blank lines are skipped, duplicate arcs collapse, and
/// self-arcs are ignored (self-observation is implicit).
pub fn parse_graph_file(text: &str) -> Result<FeedbackGraph> {
    let mut k: Option<usize> = None;
    let mut arcs: Vec<(usize, usize)> = Vec::new();
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
        match k {
            None => {
                let tag = tokens.next();
                let value = tokens.next();
                match (tag, value, tokens.next()) {
                    (Some("K"), Some(v), None) => {
                        let parsed: usize = v
                            .parse()
                            .map_err(|_| parse_err(format!("bad node count {v:?}")))?;
                        if parsed == 0 {
                            return Err(parse_err("node count must be positive".into()));
                        }
                        k = Some(parsed);
                    }
                    _ => {
                        return Err(parse_err(format!(
                            "expected header `K <count>`, got {line:?}"
                        )))
                    }
                }
            }
            Some(kk) => {
                let (a, b) = match (tokens.next(), tokens.next(), tokens.next()) {
                    (Some(a), Some(b), None) => (a, b),
                    _ => return Err(parse_err(format!("expected arc `i j`, got {line:?}"))),
                };
                let i: usize = a
                    .parse()
                    .map_err(|_| parse_err(format!("bad arc endpoint {a:?}")))?;
                let j: usize = b
                    .parse()
                    .map_err(|_| parse_err(format!("bad arc endpoint {b:?}")))?;
                if i >= kk || j >= kk {
                    return Err(parse_err(format!(
                        "arc ({i}, {j}) out of range for k = {kk}"
                    )));
                }
                arcs.push((i, j));
            }
        }
    }
    match k {
        Some(k) => FeedbackGraph::from_arcs(k, arcs),
        None => Err(Error::Parse {
            line: text.lines().count().max(1),
            message: "missing `K <count>` header".into(),
        }),
    }
}

/// Serializes a graph in the format accepted by [`parse_graph_file`];
/// lossless up to arc order.
pub fn to_graph_file(g: &FeedbackGraph) -> String {
    let mut s = format!("K {}\n", g.k());
    for (i, j) in g.arcs() {
        let _ = writeln!(s, "{i} {j}");
    }
    s
}
