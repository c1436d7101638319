//! Sequential arm-selection policies as explicit select/update state
//! machines: the UCB1 baseline and the correlated variant (C-UCB) that
//! filters out empirically non-competitive arms before applying UCB1.
//!
//! Policies hold no internal randomness, so replaying a fixed reward
//! sequence reproduces every decision bit for bit.

use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::model::LatentModel;
use crate::pseudo::{PseudoError, PseudoRewardTable};

/// Empirical state shared by both policies: pull counts, reward sums, and
/// the pseudo-reward sample sums `pseudo_sum[l][k]` built from the rewards
/// observed on each source arm `k`.
///
/// Sums are stored instead of running means: the mean is one correctly
/// rounded division, so it is a pure function of the observed multiset,
/// and shifting every reward by a constant shifts every comparison
/// operand exactly. The empirical-competitiveness test compares the sums
/// directly (same denominator), avoiding division rounding entirely.
#[derive(Debug, Clone, PartialEq)]
pub struct PolicyState {
    t: u64,
    n: Vec<u64>,
    reward_sum: Vec<f64>,
    pseudo_sum: Vec<Vec<f64>>,
    b: f64,
}

/// One selection decision: the arm pulled, the most-pulled reference arm,
/// the arms filtered out this round, and the UCB indices as evaluated
/// (unpulled arms carry the `+inf` sentinel).
#[derive(Debug, Clone, PartialEq)]
pub struct SelectionReport {
    pub chosen: usize,
    pub k_max: usize,
    pub removed: Vec<usize>,
    pub indices: Vec<f64>,
}

/// `mu_hat + B sqrt(2 ln t / n)` for a pulled arm.
pub fn ucb_index_value(mu_hat: f64, b: f64, t: f64, n: u64) -> f64 {
    if n == 0 {
        return f64::INFINITY;
    }
    mu_hat + b * (2.0 * t.max(1.0).ln() / n as f64).sqrt()
}

impl PolicyState {
    pub fn new(num_arms: usize, reward_span: f64) -> Self {
        Self {
            t: 0,
            n: vec![0; num_arms],
            reward_sum: vec![0.0; num_arms],
            pseudo_sum: vec![vec![0.0; num_arms]; num_arms],
            b: reward_span,
        }
    }

    pub fn for_model(model: &LatentModel) -> Self {
        Self::new(model.num_arms(), model.reward_span())
    }

    pub fn round(&self) -> u64 {
        self.t
    }

    pub fn num_arms(&self) -> usize {
        self.n.len()
    }

    pub fn pulls(&self, k: usize) -> u64 {
        self.n[k]
    }

    pub fn pull_counts(&self) -> &[u64] {
        &self.n
    }

    /// Mean of the rewards observed on arm `k`; meaningless until the arm
    /// has been pulled once.
    pub fn mean_reward(&self, k: usize) -> f64 {
        if self.n[k] == 0 {
            0.0
        } else {
            self.reward_sum[k] / self.n[k] as f64
        }
    }

    /// Mean of the pseudo-reward samples `s_{l,k}` collected on pulls of
    /// arm `k`; meaningless until arm `k` has been pulled once.
    pub fn mean_pseudo_reward(&self, l: usize, k: usize) -> f64 {
        if self.n[k] == 0 {
            0.0
        } else {
            self.pseudo_sum[l][k] / self.n[k] as f64
        }
    }

    pub fn reward_span(&self) -> f64 {
        self.b
    }

    /// UCB index of arm `k` at the current round; `+inf` while unpulled.
    pub fn ucb_index(&self, k: usize) -> f64 {
        ucb_index_value(self.mean_reward(k), self.b, self.t as f64, self.n[k])
    }

    pub fn indices(&self) -> Vec<f64> {
        (0..self.num_arms()).map(|k| self.ucb_index(k)).collect()
    }

    /// Most-pulled arm, ties to the lowest index.
    pub fn k_max(&self) -> usize {
        argmax_by(self.n.len(), |k| self.n[k] as f64)
    }

    /// Fold a plain reward observation into the state (no pseudo-reward
    /// bookkeeping; this is the UCB1 update).
    pub fn record(&mut self, chosen: usize, reward: f64) {
        self.n[chosen] += 1;
        self.reward_sum[chosen] += reward;
        self.t += 1;
    }
}

fn argmax_by(len: usize, score: impl Fn(usize) -> f64) -> usize {
    let mut best = 0;
    for k in 1..len {
        if score(k) > score(best) {
            best = k;
        }
    }
    best
}

/// UCB1 selection: argmax of the indices, ties to the lowest arm index.
/// Unpulled arms carry an infinite index, so they are taken round-robin
/// first.
pub fn ucb1_select(state: &PolicyState) -> usize {
    let indices = state.indices();
    argmax_by(indices.len(), |k| indices[k])
}

/// C-UCB selection. While some arm is unpulled the lowest such arm is
/// chosen (initialization round-robin). Afterwards the most-pulled arm
/// `k_max` is the reference: every other arm whose running pseudo-reward
/// mean falls strictly below `k_max`'s reward mean is removed for this
/// round, and UCB1 runs on the survivors. Equality retains the arm, and
/// `k_max` itself is never removed.
pub fn cucb_select(state: &PolicyState) -> SelectionReport {
    let indices = state.indices();
    if let Some(first) = (0..state.num_arms()).find(|&k| state.n[k] == 0) {
        return SelectionReport {
            chosen: first,
            k_max: state.k_max(),
            removed: Vec::new(),
            indices,
        };
    }
    let k_max = state.k_max();
    let mut removed = Vec::new();
    let mut chosen = k_max;
    let mut best = f64::NEG_INFINITY;
    for (k, &index) in indices.iter().enumerate() {
        // mean_reward(k_max) > mean_pseudo_reward(k, k_max), compared as
        // sums over the same n(k_max) pulls.
        if k != k_max && state.reward_sum[k_max] > state.pseudo_sum[k][k_max] {
            removed.push(k);
            continue;
        }
        if index > best {
            best = index;
            chosen = k;
        }
    }
    SelectionReport { chosen, k_max, removed, indices }
}

/// C-UCB update: fold the observed reward into arm `chosen`'s mean and
/// fold the pseudo-reward sample `s_{l,chosen}(r)` into `phi_hat[l][chosen]`
/// for every other arm `l`.
pub fn update(
    state: &mut PolicyState,
    chosen: usize,
    reward: f64,
    table: &PseudoRewardTable,
) -> Result<(), PseudoError> {
    let pseudo = table.pseudo_values(chosen, reward)?.to_vec();
    state.record(chosen, reward);
    for (l, &sample) in pseudo.iter().enumerate() {
        if l == chosen {
            continue;
        }
        state.pseudo_sum[l][chosen] += sample;
    }
    Ok(())
}

/// Policy identifiers accepted by the simulator and the CLI.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PolicyKind {
    Ucb1,
    Cucb,
}

impl PolicyKind {
    pub fn name(self) -> &'static str {
        match self {
            PolicyKind::Ucb1 => "ucb1",
            PolicyKind::Cucb => "cucb",
        }
    }
}

impl std::fmt::Display for PolicyKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PolicyKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "ucb1" | "ucb" => Ok(PolicyKind::Ucb1),
            "cucb" | "c-ucb" => Ok(PolicyKind::Cucb),
            other => Err(format!("unknown policy `{other}` (expected ucb1 or cucb)")),
        }
    }
}

/// A policy the episode runner can drive: deterministic select, then an
/// update with the observed reward.
pub trait BanditPolicy {
    fn select(&self) -> SelectionReport;
    fn observe(&mut self, chosen: usize, reward: f64) -> Result<(), PseudoError>;
    fn state(&self) -> &PolicyState;
}

#[derive(Debug, Clone)]
pub struct Ucb1Policy {
    state: PolicyState,
}

impl Ucb1Policy {
    pub fn new(model: &LatentModel) -> Self {
        Self { state: PolicyState::for_model(model) }
    }
}

impl BanditPolicy for Ucb1Policy {
    fn select(&self) -> SelectionReport {
        let chosen = ucb1_select(&self.state);
        SelectionReport {
            chosen,
            k_max: self.state.k_max(),
            removed: Vec::new(),
            indices: self.state.indices(),
        }
    }

    fn observe(&mut self, chosen: usize, reward: f64) -> Result<(), PseudoError> {
        self.state.record(chosen, reward);
        Ok(())
    }

    fn state(&self) -> &PolicyState {
        &self.state
    }
}

#[derive(Debug, Clone)]
pub struct CucbPolicy {
    state: PolicyState,
    table: Arc<PseudoRewardTable>,
}

impl CucbPolicy {
    pub fn new(model: &LatentModel, table: Arc<PseudoRewardTable>) -> Self {
        Self { state: PolicyState::for_model(model), table }
    }
}

impl BanditPolicy for CucbPolicy {
    fn select(&self) -> SelectionReport {
        cucb_select(&self.state)
    }

    fn observe(&mut self, chosen: usize, reward: f64) -> Result<(), PseudoError> {
        update(&mut self.state, chosen, reward, &self.table)
    }

    fn state(&self) -> &PolicyState {
        &self.state
    }
}

/// Build a fresh policy of the given kind for one episode.
pub fn build_policy(
    kind: PolicyKind,
    model: &LatentModel,
    table: &Arc<PseudoRewardTable>,
) -> Box<dyn BanditPolicy + Send> {
    match kind {
        PolicyKind::Ucb1 => Box::new(Ucb1Policy::new(model)),
        PolicyKind::Cucb => Box::new(CucbPolicy::new(model, Arc::clone(table))),
    }
}
