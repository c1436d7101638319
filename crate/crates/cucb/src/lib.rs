//! Correlated multi-armed bandits with a latent random source.
//!
//! Every arm's reward is a known function of one hidden random variable
//! (or vector): pulling any arm narrows down where the realization could
//! have been, which lets a policy manufacture *pseudo-rewards* — upper
//! bounds on what every other arm would have paid — from its own
//! observations. The C-UCB policy uses those to skip arms that are
//! *non-competitive* against the current front-runner, pulling them only
//! O(1) times instead of UCB1's O(log T).
//!
//! The crate provides:
//!
//! - [`model`]: finite latent models, midpoint discretization of
//!   continuous sources, JSON model files.
//! - [`pseudo`]: preimage/pseudo-reward tables, expected pseudo-rewards,
//!   pseudo-gaps, and the competitive/non-competitive classification.
//! - [`policy`]: UCB1 and C-UCB select/update state machines.
//! - [`sim`]: the seeded Monte-Carlo regret simulator with
//!   common-random-number replay across policies, and CSV/JSON export.
//! - [`analysis`]: closed-form regret-bound evaluators and the
//!   alternate-instance lower-bound construction.
//! - [`scenarios`]: built-in model presets used by the CLI and tests.

pub mod analysis;
pub mod cli;
pub mod model;
pub mod policy;
pub mod pseudo;
pub mod scenarios;
pub mod sim;

pub use model::{build_discrete, discretize, LatentModel, ModelError, OutcomeSpace};
pub use policy::{BanditPolicy, CucbPolicy, PolicyKind, PolicyState, Ucb1Policy};
pub use pseudo::{build_table, classify, Classification, PseudoRewardTable, DEFAULT_QUANTUM};
pub use sim::{run_episode, run_experiment, ExperimentConfig, RegretTrace};
