//! Command-line front end: `inspect` (classification and bounds),
//! `simulate` (Monte-Carlo regret experiments), `trace` (per-round
//! decision log), and `scenarios` (built-in model listing).
//!
//! Exit codes: 0 success, 2 configuration error, 3 model error, 4 IO
//! error. Output files are materialized in memory first, so a failing
//! computation never leaves a partial file behind.

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::analysis::{
    auto_t0, bound_competitive, bound_noncompetitive, bound_total, bound_worst_case,
    check_hypotheses, lower_bound, AnalysisError, BoundParams, HypothesisCheck,
};
use crate::model::{model_from_json, LatentModel, ModelError};
use crate::policy::{build_policy, PolicyKind};
use crate::pseudo::{build_table, classify, Classification, PseudoError, DEFAULT_QUANTUM};
use crate::scenarios::{self, ScenarioError};
use crate::sim::{
    default_stride, export_csv, export_json, outcome_buffer, ExperimentConfig, RegretTrace,
    SimError,
};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Model(String),
    #[error("{0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Model(_) => 3,
            CliError::Io(_) => 4,
        }
    }
}

impl From<ModelError> for CliError {
    fn from(e: ModelError) -> Self {
        CliError::Model(e.to_string())
    }
}

impl From<PseudoError> for CliError {
    fn from(e: PseudoError) -> Self {
        CliError::Model(e.to_string())
    }
}

impl From<AnalysisError> for CliError {
    fn from(e: AnalysisError) -> Self {
        CliError::Model(e.to_string())
    }
}

impl From<ScenarioError> for CliError {
    fn from(e: ScenarioError) -> Self {
        match e {
            ScenarioError::Model(inner) => CliError::Model(inner.to_string()),
            other => CliError::Config(other.to_string()),
        }
    }
}

impl From<SimError> for CliError {
    fn from(e: SimError) -> Self {
        match e {
            SimError::Config(msg) => CliError::Config(msg),
            SimError::Policy(inner) => CliError::Model(inner.to_string()),
            SimError::Io(inner) => CliError::Io(inner),
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "cucb",
    version,
    about = "Correlated-bandit toolkit: classify arms, evaluate regret bounds, run seeded regret experiments"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print a model's means, gaps, classification, regret bounds, and
    /// lower-bound rate.
    Inspect(InspectArgs),
    /// Run a seeded Monte-Carlo regret experiment and export the traces.
    Simulate(SimulateArgs),
    /// Replay one episode and emit a per-round decision log (JSON lines).
    Trace(TraceArgs),
    /// List the built-in scenarios.
    Scenarios,
}

#[derive(Debug, Args, Clone)]
pub struct ModelSource {
    /// Path to a JSON model file.
    #[arg(long, value_name = "PATH")]
    pub model: Option<PathBuf>,
    /// Name of a built-in scenario (see the scenarios subcommand).
    #[arg(long, value_name = "NAME")]
    pub scenario: Option<String>,
    /// Grid size for continuous models and scenarios.
    #[arg(long, value_name = "N")]
    pub grid: Option<usize>,
}

impl ModelSource {
    fn resolve(&self) -> Result<LatentModel, CliError> {
        match (&self.model, &self.scenario) {
            (Some(path), None) => {
                let text = fs::read_to_string(path)
                    .map_err(|e| CliError::Model(format!("cannot read {}: {e}", path.display())))?;
                Ok(model_from_json(&text, self.grid)?)
            }
            (None, Some(name)) => Ok(scenarios::build(name, self.grid)?),
            (None, None) => Err(CliError::Config(
                "exactly one model source is required: pass --model or --scenario".into(),
            )),
            (Some(_), Some(_)) => Err(CliError::Config(
                "pass either --model or --scenario, not both".into(),
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DataFormat {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum InspectFormat {
    Text,
    Csv,
    Json,
}

#[derive(Debug, Args)]
pub struct InspectArgs {
    #[command(flatten)]
    pub source: ModelSource,
    /// Horizons at which to evaluate the regret bounds.
    #[arg(long, value_delimiter = ',', default_value = "1000,10000,100000")]
    pub bounds_at: Vec<u64>,
    /// Threshold round for the instance-dependent bounds (default: the
    /// smallest round satisfying their hypotheses).
    #[arg(long)]
    pub t0: Option<f64>,
    /// Proof constant for the worst-case bound.
    #[arg(long, default_value_t = 1.0)]
    pub beta: f64,
    /// Reward-equality tolerance for preimage grouping.
    #[arg(long, default_value_t = DEFAULT_QUANTUM)]
    pub quantum: f64,
    #[arg(long, value_enum, default_value_t = InspectFormat::Text)]
    pub format: InspectFormat,
    /// Output path (defaults to stdout).
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub source: ModelSource,
    /// Experiment config file (JSON); explicit flags override its fields.
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Horizon (rounds per run).
    #[arg(long = "T", visible_alias = "horizon")]
    pub horizon: Option<u64>,
    /// Independent runs to average over.
    #[arg(long)]
    pub runs: Option<u32>,
    /// Base seed; per-run seeds are derived from it.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Comma-separated policies to compare (ucb1, cucb).
    #[arg(long, value_delimiter = ',')]
    pub policies: Option<Vec<String>>,
    /// Rounds between recorded trace points (must divide T).
    #[arg(long)]
    pub stride: Option<u64>,
    /// Reward-equality tolerance for preimage grouping.
    #[arg(long)]
    pub quantum: Option<f64>,
    #[arg(long, value_enum)]
    pub format: Option<DataFormat>,
    /// Output path (defaults to stdout).
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct TraceArgs {
    #[command(flatten)]
    pub source: ModelSource,
    /// Rounds to replay.
    #[arg(long = "T", visible_alias = "horizon", default_value_t = 100)]
    pub horizon: u64,
    /// Seed for the latent outcome stream.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Policy to trace (ucb1 or cucb).
    #[arg(long, default_value = "cucb")]
    pub policy: String,
    #[arg(long, default_value_t = DEFAULT_QUANTUM)]
    pub quantum: f64,
    /// Output path (defaults to stdout).
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

/// Experiment config file schema; any field may be omitted. Flags win
/// over file values.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    model: Option<PathBuf>,
    scenario: Option<String>,
    grid: Option<usize>,
    #[serde(rename = "T")]
    horizon: Option<u64>,
    runs: Option<u32>,
    seed: Option<u64>,
    policies: Option<Vec<String>>,
    stride: Option<u64>,
    format: Option<String>,
    out: Option<PathBuf>,
    quantum: Option<f64>,
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Inspect(args) => cmd_inspect(args),
        Command::Simulate(args) => cmd_simulate(args),
        Command::Trace(args) => cmd_trace(args),
        Command::Scenarios => cmd_scenarios(),
    }
}

// ---------------------------------------------------------------------------
// inspect
// ---------------------------------------------------------------------------

#[derive(Debug, Serialize)]
struct BoundsAtHorizon {
    horizon: u64,
    noncompetitive_pull_bound: f64,
    competitive_regret: f64,
    noncompetitive_regret: f64,
    total_upper: f64,
    worst_case: f64,
}

#[derive(Debug, Serialize)]
struct InspectReport {
    arms: usize,
    outcomes: usize,
    reward_span: f64,
    #[serde(flatten)]
    classification: Classification,
    t0: f64,
    hypothesis: HypothesisCheck,
    beta: f64,
    bounds: Vec<BoundsAtHorizon>,
    lower_bound_rate: f64,
}

fn cmd_inspect(args: InspectArgs) -> Result<(), CliError> {
    if let Some(t0) = args.t0 {
        if !t0.is_finite() || t0 <= 0.0 {
            return Err(CliError::Config(format!("--t0 must be positive and finite, got {t0}")));
        }
    }
    let model = args.source.resolve()?;
    let table = build_table(&model, args.quantum);
    let classification = classify(&model, &table)?;
    let rate = lower_bound(&model, &table)?;

    let probe = BoundParams::from_classification(&classification, 1.0, 1);
    let t0 = args.t0.unwrap_or_else(|| auto_t0(&probe));
    let hypothesis = check_hypotheses(&BoundParams { t0, ..probe.clone() });

    let mut bounds = Vec::new();
    for &horizon in &args.bounds_at {
        let params = BoundParams { t0, horizon, ..probe.clone() };
        let mut competitive_regret = 0.0;
        for &k in &classification.competitive {
            competitive_regret += params.delta[k] * bound_competitive(&params, k)?;
        }
        let noncompetitive_pull_bound = bound_noncompetitive(&params);
        let noncompetitive_regret: f64 = classification
            .non_competitive
            .iter()
            .map(|&k| params.delta[k] * noncompetitive_pull_bound)
            .sum();
        bounds.push(BoundsAtHorizon {
            horizon,
            noncompetitive_pull_bound,
            competitive_regret,
            noncompetitive_regret,
            total_upper: bound_total(&classification, &params)?,
            worst_case: bound_worst_case(model.num_arms(), horizon as f64, args.beta),
        });
    }

    let report = InspectReport {
        arms: model.num_arms(),
        outcomes: model.num_outcomes(),
        reward_span: model.reward_span(),
        classification,
        t0,
        hypothesis,
        beta: args.beta,
        bounds,
        lower_bound_rate: rate,
    };

    let rendered = match args.format {
        InspectFormat::Json => {
            let mut s = serde_json::to_string_pretty(&report)
                .map_err(|e| CliError::Model(e.to_string()))?;
            s.push('\n');
            s
        }
        InspectFormat::Csv => render_inspect_csv(&report),
        InspectFormat::Text => render_inspect_text(&report),
    };
    write_output(args.out.as_deref(), rendered.as_bytes())
}

fn render_inspect_csv(report: &InspectReport) -> String {
    let mut s = String::from(
        "T,total_upper,competitive_regret,noncompetitive_regret,noncompetitive_pull_bound,worst_case,lower_bound_rate\n",
    );
    for b in &report.bounds {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{}",
            b.horizon,
            crate::sim::fmt_sig12(b.total_upper),
            crate::sim::fmt_sig12(b.competitive_regret),
            crate::sim::fmt_sig12(b.noncompetitive_regret),
            crate::sim::fmt_sig12(b.noncompetitive_pull_bound),
            crate::sim::fmt_sig12(b.worst_case),
            crate::sim::fmt_sig12(report.lower_bound_rate),
        );
    }
    s
}

fn render_inspect_text(report: &InspectReport) -> String {
    let c = &report.classification;
    let mut s = String::new();
    let _ = writeln!(
        s,
        "model: {} arms over {} outcomes, reward span B = {}",
        report.arms, report.outcomes, report.reward_span
    );
    let _ = writeln!(s, "means: {:?}", c.mu);
    let _ = writeln!(s, "optimal arm: {}", c.k_star);
    let _ = writeln!(s, "gaps: {:?}", c.delta);
    let _ = writeln!(s, "pseudo-gaps vs optimal (arm: gap):");
    for l in 0..c.mu.len() {
        if l == c.k_star {
            continue;
        }
        let _ = writeln!(s, "  {l}: {}", c.pseudo_gaps[l][c.k_star]);
    }
    let _ = writeln!(s, "competitive: {:?}", c.competitive);
    let _ = writeln!(s, "non-competitive: {:?}", c.non_competitive);
    if !c.boundary.is_empty() {
        let _ = writeln!(s, "boundary (zero pseudo-gap, kept competitive): {:?}", c.boundary);
    }
    let h = &report.hypothesis;
    let _ = writeln!(
        s,
        "t0 = {} (pseudo-gap hypothesis {}, gap hypothesis {})",
        report.t0,
        if h.pseudo_gap_ok { "satisfied" } else { "violated" },
        if h.delta_ok { "satisfied" } else { "violated" },
    );
    let _ = writeln!(s, "upper bounds (beta = {}):", report.beta);
    for b in &report.bounds {
        let _ = writeln!(
            s,
            "  T = {}: total <= {:.6} (competitive {:.6}, non-competitive {:.6}), worst-case {:.6}",
            b.horizon, b.total_upper, b.competitive_regret, b.noncompetitive_regret, b.worst_case
        );
    }
    let _ = writeln!(s, "lower bound: {} per log(T)", report.lower_bound_rate);
    s
}

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------

fn parse_policies(names: &[String]) -> Result<Vec<PolicyKind>, CliError> {
    names
        .iter()
        .map(|n| n.parse::<PolicyKind>().map_err(CliError::Config))
        .collect()
}

fn cmd_simulate(args: SimulateArgs) -> Result<(), CliError> {
    let file: FileConfig = match &args.config {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| {
                CliError::Config(format!("cannot read config {}: {e}", path.display()))
            })?;
            serde_json::from_str(&text)
                .map_err(|e| CliError::Config(format!("config {}: {e}", path.display())))?
        }
        None => FileConfig::default(),
    };

    let source = ModelSource {
        model: args.source.model.clone().or(file.model),
        scenario: args.source.scenario.clone().or(file.scenario),
        grid: args.source.grid.or(file.grid),
    };
    let horizon = args.horizon.or(file.horizon).unwrap_or(50_000);
    let runs = args.runs.or(file.runs).unwrap_or(500);
    let seed = args.seed.or(file.seed).unwrap_or(0);
    let policy_names = args
        .policies
        .clone()
        .or(file.policies)
        .unwrap_or_else(|| vec!["ucb1".into(), "cucb".into()]);
    let stride = args.stride.or(file.stride).unwrap_or_else(|| default_stride(horizon));
    let format = match args.format {
        Some(f) => f,
        None => match file.format.as_deref() {
            None | Some("csv") => DataFormat::Csv,
            Some("json") => DataFormat::Json,
            Some(other) => {
                return Err(CliError::Config(format!(
                    "unknown format `{other}` (expected csv or json)"
                )))
            }
        },
    };
    let out = args.out.clone().or(file.out);
    let quantum = args.quantum.or(file.quantum).unwrap_or(DEFAULT_QUANTUM);

    let model = source.resolve()?;
    let table = Arc::new(build_table(&model, quantum));
    let policies = parse_policies(&policy_names)?;
    let config = ExperimentConfig {
        horizon,
        runs,
        base_seed: seed,
        policies,
        record_stride: stride,
        log_outcomes: false,
    };
    let outcome = crate::sim::run_experiment(&model, &table, &config)?;

    let mut buf = Vec::new();
    match format {
        DataFormat::Csv => export_csv(&outcome.traces, &mut buf)?,
        DataFormat::Json => export_json(&outcome.traces, &mut buf)?,
    }
    write_output(out.as_deref(), &buf)?;
    eprintln!("{}", summary_table(&outcome.traces, horizon));
    Ok(())
}

fn summary_table(traces: &[RegretTrace], horizon: u64) -> String {
    let mut s = format!("final mean regret at T = {horizon} ({} policies):", traces.len());
    for t in traces {
        let last = t.mean_regret.len() - 1;
        let _ = write!(
            s,
            "\n  {:>5}: {:.4} +/- {:.4}",
            t.policy, t.mean_regret[last], t.stderr_regret[last]
        );
    }
    s
}

// ---------------------------------------------------------------------------
// trace
// ---------------------------------------------------------------------------

#[derive(Debug, Serialize)]
struct TraceRecord {
    round: u64,
    k_max: usize,
    removed: Vec<usize>,
    /// UCB indices at selection time; `null` for unpulled arms (infinite
    /// sentinel).
    indices: Vec<Option<f64>>,
    chosen: usize,
    reward: f64,
}

fn cmd_trace(args: TraceArgs) -> Result<(), CliError> {
    let model = args.source.resolve()?;
    let table = Arc::new(build_table(&model, args.quantum));
    let kind: PolicyKind = args.policy.parse().map_err(CliError::Config)?;
    let mut policy = build_policy(kind, &model, &table);
    let outcomes = outcome_buffer(&model, args.seed, args.horizon);

    let mut buf = Vec::new();
    for (i, &j) in outcomes.iter().enumerate() {
        let report = policy.select();
        let reward = model.reward(report.chosen, j as usize);
        policy
            .observe(report.chosen, reward)
            .map_err(|e| CliError::Model(e.to_string()))?;
        let record = TraceRecord {
            round: i as u64 + 1,
            k_max: report.k_max,
            removed: report.removed,
            indices: report
                .indices
                .iter()
                .map(|&v| v.is_finite().then_some(v))
                .collect(),
            chosen: report.chosen,
            reward,
        };
        serde_json::to_writer(&mut buf, &record).map_err(|e| CliError::Model(e.to_string()))?;
        buf.push(b'\n');
    }
    write_output(args.out.as_deref(), &buf)
}

// ---------------------------------------------------------------------------
// scenarios
// ---------------------------------------------------------------------------

fn cmd_scenarios() -> Result<(), CliError> {
    let mut s = String::new();
    for (name, desc) in scenarios::describe_all() {
        let _ = writeln!(s, "{name}\n    {desc}");
    }
    print!("{s}");
    Ok(())
}

fn write_output(path: Option<&Path>, bytes: &[u8]) -> Result<(), CliError> {
    match path {
        Some(p) => fs::write(p, bytes).map_err(CliError::Io),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(bytes)?;
            stdout.flush()?;
            Ok(())
        }
    }
}

/// Entry point used by the binary; kept here so the whole dispatch path is
/// unit-testable.
pub fn main_with(cli: Cli) -> i32 {
    match run(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
