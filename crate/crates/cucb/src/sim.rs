//! Monte-Carlo episode runner and experiment orchestrator.
//!
//! Regret is accounted against the hidden realization: the simulator draws
//! the latent outcome, pays the policy only its own arm's reward, and
//! charges `g_{k*}(x_t) - g_{k_t}(x_t)` to the trace. Policies never see
//! the outcome or the oracle arm.
//!
//! Comparisons use common random numbers: each run pre-generates one
//! outcome buffer from its derived seed and replays it through every
//! policy, so the compared policies face identical reward realizations.

use std::io::Write;
use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::model::LatentModel;
use crate::policy::{build_policy, BanditPolicy, PolicyKind};
use crate::pseudo::{PseudoError, PseudoRewardTable};

#[derive(Debug, Error)]
pub enum SimError {
    #[error("invalid experiment config: {0}")]
    Config(String),
    #[error(transparent)]
    Policy(#[from] PseudoError),
    #[error("io failure: {0}")]
    Io(#[from] std::io::Error),
}

/// Experiment shape: horizon, number of runs, base seed, the policies to
/// compare, and the recording stride (which must divide the horizon).
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub horizon: u64,
    pub runs: u32,
    pub base_seed: u64,
    pub policies: Vec<PolicyKind>,
    pub record_stride: u64,
    /// Keep each run's consumed outcome sequence in the result (test and
    /// diagnostic use; memory grows with `runs * horizon`).
    pub log_outcomes: bool,
}

impl ExperimentConfig {
    pub fn new(horizon: u64, runs: u32, base_seed: u64, policies: Vec<PolicyKind>) -> Self {
        Self {
            horizon,
            runs,
            base_seed,
            policies,
            record_stride: default_stride(horizon),
            log_outcomes: false,
        }
    }

    pub fn with_stride(mut self, stride: u64) -> Self {
        self.record_stride = stride;
        self
    }

    pub fn validate(&self) -> Result<(), SimError> {
        if self.horizon == 0 {
            return Err(SimError::Config("horizon must be at least 1".into()));
        }
        if self.runs == 0 {
            return Err(SimError::Config("runs must be at least 1".into()));
        }
        if self.policies.is_empty() {
            return Err(SimError::Config("at least one policy is required".into()));
        }
        if self.record_stride == 0 || !self.horizon.is_multiple_of(self.record_stride) {
            return Err(SimError::Config(format!(
                "record_stride {} must divide the horizon {}",
                self.record_stride, self.horizon
            )));
        }
        Ok(())
    }
}

/// Largest stride at most `horizon / 1000` that divides the horizon
/// (falling back to 1), so traces stay bounded at any horizon.
pub fn default_stride(horizon: u64) -> u64 {
    let mut s = (horizon / 1000).max(1);
    while !horizon.is_multiple_of(s) {
        s -= 1;
    }
    s
}

/// SplitMix64 avalanche; decorrelates per-run seeds from the base seed.
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn derive_seed(base_seed: u64, run: u32) -> u64 {
    splitmix64(base_seed ^ 0x9E37_79B9_7F4A_7C15u64.wrapping_mul(run as u64 + 1))
}

/// Pre-generate the latent outcome sequence for one run: exactly one
/// uniform draw per round through the model's inverse CDF.
pub fn outcome_buffer(model: &LatentModel, seed: u64, horizon: u64) -> Vec<u32> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..horizon).map(|_| model.sample(&mut rng) as u32).collect()
}

/// One run of one policy: cumulative regret and pull counts at each
/// recorded round.
#[derive(Debug, Clone, PartialEq)]
pub struct RunTrace {
    pub grid: Vec<u64>,
    pub regret: Vec<f64>,
    pub pulls: Vec<Vec<u64>>,
    pub outcomes: Option<Vec<u32>>,
}

impl RunTrace {
    pub fn final_regret(&self) -> f64 {
        *self.regret.last().unwrap()
    }
}

/// Drive a policy through a fixed outcome sequence. The oracle best arm is
/// used only for regret accounting; the policy sees nothing but its own
/// reward.
pub fn run_on_outcomes(
    model: &LatentModel,
    policy: &mut dyn BanditPolicy,
    outcomes: &[u32],
    record_stride: u64,
    log_outcomes: bool,
) -> Result<RunTrace, SimError> {
    let horizon = outcomes.len() as u64;
    if record_stride == 0 || !horizon.is_multiple_of(record_stride) {
        return Err(SimError::Config(format!(
            "record_stride {record_stride} must divide the horizon {horizon}"
        )));
    }
    let k_star = model.optimal_arm().k_star;
    let points = (horizon / record_stride) as usize;
    let mut grid = Vec::with_capacity(points);
    let mut regret = Vec::with_capacity(points);
    let mut pulls = Vec::with_capacity(points);
    let mut cumulative = 0.0;
    for (i, &j) in outcomes.iter().enumerate() {
        let j = j as usize;
        let chosen = policy.select().chosen;
        let reward = model.reward(chosen, j);
        policy.observe(chosen, reward)?;
        cumulative += model.reward(k_star, j) - reward;
        let t = i as u64 + 1;
        if t.is_multiple_of(record_stride) {
            grid.push(t);
            regret.push(cumulative);
            pulls.push(policy.state().pull_counts().to_vec());
        }
    }
    Ok(RunTrace {
        grid,
        regret,
        pulls,
        outcomes: log_outcomes.then(|| outcomes.to_vec()),
    })
}

/// One seeded episode: generate the outcome buffer for `seed` and replay.
pub fn run_episode(
    model: &LatentModel,
    policy: &mut dyn BanditPolicy,
    horizon: u64,
    record_stride: u64,
    seed: u64,
) -> Result<RunTrace, SimError> {
    let outcomes = outcome_buffer(model, seed, horizon);
    run_on_outcomes(model, policy, &outcomes, record_stride, false)
}

/// Mean cumulative regret (with the standard error across runs) and mean
/// pull counts at each recorded round, for one policy.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegretTrace {
    pub policy: String,
    pub grid: Vec<u64>,
    pub mean_regret: Vec<f64>,
    pub stderr_regret: Vec<f64>,
    pub mean_pulls: Vec<Vec<f64>>,
}

/// Result of a full experiment: one aggregated trace per policy, plus the
/// per-policy, per-run outcome logs when requested.
#[derive(Debug, Clone)]
pub struct ExperimentOutcome {
    pub traces: Vec<RegretTrace>,
    pub outcome_logs: Option<Vec<Vec<Vec<u32>>>>,
}

/// Run every configured policy over `runs` independent outcome buffers
/// (common across policies within a run) and aggregate. Runs execute in
/// parallel; the reduction is ordered by run index, so results do not
/// depend on worker scheduling.
pub fn run_experiment(
    model: &LatentModel,
    table: &Arc<PseudoRewardTable>,
    config: &ExperimentConfig,
) -> Result<ExperimentOutcome, SimError> {
    config.validate()?;
    let per_run: Vec<Vec<RunTrace>> = (0..config.runs)
        .into_par_iter()
        .map(|run| {
            let seed = derive_seed(config.base_seed, run);
            let outcomes = outcome_buffer(model, seed, config.horizon);
            config
                .policies
                .iter()
                .map(|&kind| {
                    let mut policy = build_policy(kind, model, table);
                    run_on_outcomes(
                        model,
                        policy.as_mut(),
                        &outcomes,
                        config.record_stride,
                        config.log_outcomes,
                    )
                })
                .collect::<Result<Vec<_>, _>>()
        })
        .collect::<Result<Vec<_>, _>>()?;

    let points = (config.horizon / config.record_stride) as usize;
    let k_arms = model.num_arms();
    let runs = config.runs as f64;
    let grid: Vec<u64> = (1..=points as u64).map(|i| i * config.record_stride).collect();

    let mut traces = Vec::with_capacity(config.policies.len());
    for (p, &kind) in config.policies.iter().enumerate() {
        let mut sum = vec![0.0; points];
        let mut sumsq = vec![0.0; points];
        let mut pull_sum = vec![vec![0.0; k_arms]; points];
        for run_traces in &per_run {
            let trace = &run_traces[p];
            for g in 0..points {
                sum[g] += trace.regret[g];
                sumsq[g] += trace.regret[g] * trace.regret[g];
                for (acc, &n) in pull_sum[g].iter_mut().zip(trace.pulls[g].iter()) {
                    *acc += n as f64;
                }
            }
        }
        let mean_regret: Vec<f64> = sum.iter().map(|s| s / runs).collect();
        let stderr_regret: Vec<f64> = sum
            .iter()
            .zip(sumsq.iter())
            .map(|(&s, &sq)| {
                if config.runs < 2 {
                    0.0
                } else {
                    let var = ((sq - s * s / runs) / (runs - 1.0)).max(0.0);
                    (var / runs).sqrt()
                }
            })
            .collect();
        let mean_pulls: Vec<Vec<f64>> = pull_sum
            .into_iter()
            .map(|row| row.into_iter().map(|v| v / runs).collect())
            .collect();
        traces.push(RegretTrace {
            policy: kind.name().to_string(),
            grid: grid.clone(),
            mean_regret,
            stderr_regret,
            mean_pulls,
        });
    }

    let outcome_logs = config.log_outcomes.then(|| {
        (0..config.policies.len())
            .map(|p| {
                per_run
                    .iter()
                    .map(|run_traces| run_traces[p].outcomes.clone().unwrap())
                    .collect()
            })
            .collect()
    });

    Ok(ExperimentOutcome { traces, outcome_logs })
}

/// Format with 12 significant digits: plain decimal for moderate
/// exponents, scientific otherwise, trailing zeros trimmed.
pub fn fmt_sig12(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{x:.11e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent in {:.11e} output");
    let exp: i32 = exp.parse().expect("numeric exponent");
    if (-4..12).contains(&exp) {
        let precision = (11 - exp).max(0) as usize;
        trim_trailing_zeros(format!("{x:.precision$}"))
    } else {
        format!("{}e{exp}", trim_trailing_zeros(mantissa.to_string()))
    }
}

fn trim_trailing_zeros(mut s: String) -> String {
    if s.contains('.') {
        while s.ends_with('0') {
            s.pop();
        }
        if s.ends_with('.') {
            s.pop();
        }
    }
    s
}

/// CSV schema: `policy,t,mean_regret,stderr_regret,n_0,...,n_{K-1}`, rows
/// sorted by (policy, t), floats at 12 significant digits.
pub fn export_csv(traces: &[RegretTrace], out: &mut dyn Write) -> Result<(), SimError> {
    if traces.is_empty() {
        return Err(SimError::Config("no traces to export".into()));
    }
    let k_arms = traces[0].mean_pulls.first().map_or(0, |row| row.len());
    let mut header = String::from("policy,t,mean_regret,stderr_regret");
    for k in 0..k_arms {
        header.push_str(&format!(",n_{k}"));
    }
    writeln!(out, "{header}")?;
    let mut order: Vec<&RegretTrace> = traces.iter().collect();
    order.sort_by(|a, b| a.policy.cmp(&b.policy));
    for trace in order {
        for (g, &t) in trace.grid.iter().enumerate() {
            let mut line = format!(
                "{},{t},{},{}",
                trace.policy,
                fmt_sig12(trace.mean_regret[g]),
                fmt_sig12(trace.stderr_regret[g]),
            );
            for k in 0..k_arms {
                line.push(',');
                line.push_str(&fmt_sig12(trace.mean_pulls[g][k]));
            }
            writeln!(out, "{line}")?;
        }
    }
    Ok(())
}

pub fn export_json(traces: &[RegretTrace], out: &mut dyn Write) -> Result<(), SimError> {
    serde_json::to_writer_pretty(&mut *out, traces)
        .map_err(|e| SimError::Io(std::io::Error::other(e)))?;
    writeln!(out)?;
    Ok(())
}
