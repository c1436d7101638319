//! Built-in model presets used by the CLI and the test suites: the
//! three-outcome two-arm table, three continuous beta-distributed sources
//! sharing one set of reward curves, and two latent-vector sources on
//! `{-1,0,1}^2`.

use thiserror::Error;

use crate::model::{
    build_discrete, discretize, ContinuousSpec, Density, LatentModel, ModelError, OutcomeSpace,
    RewardForm,
};

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("unknown scenario `{0}` (run the scenarios subcommand for the list)")]
    Unknown(String),
    #[error("scenario `{name}`: {reason}")]
    BadArgs { name: String, reason: String },
    #[error("scenario `fig3-cases` ships no reward values: its reference reward curves exist \
             only as plots. Supply them as a discrete model file (--model) with five outcomes, \
             your transcribed rewards, and one of the documented pmfs: {DISCRETE_PMF_1:?}, \
             {DISCRETE_PMF_2:?}, or {DISCRETE_PMF_3:?}")]
    RequiresUserTable,
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Gaussian-bump reward curve shared by the continuous cases. The scale is
/// calibrated so the three beta cases split exactly into the intended
/// no-competitive / one-competitive / all-competitive classifications.
pub const GAUSSIAN_ARM: RewardForm = RewardForm::GaussianPdf { mu: 0.5, sigma: 0.2, scale: 0.65 };
/// Saturating ramp `1 - exp(-5 * lambda * x)` with `lambda = 0.5`.
pub const RAMP_ARM: RewardForm = RewardForm::OneMinusExp { rate: 2.5 };
pub const CONSTANT_ARM: RewardForm = RewardForm::Constant { c: 0.5 };

pub const DEFAULT_GRID: usize = 1000;

/// Pmfs printed alongside the discrete-source experiments; their reward
/// table is user-supplied (see `ScenarioError::RequiresUserTable`).
pub const DISCRETE_PMF_1: [f64; 5] = [0.1, 0.2, 0.25, 0.25, 0.2];
pub const DISCRETE_PMF_2: [f64; 5] = [0.25, 0.17, 0.25, 0.17, 0.16];
pub const DISCRETE_PMF_3: [f64; 5] = [0.05, 0.3, 0.3, 0.05, 0.3];

/// Names and one-line parameter summaries for every built-in scenario.
pub fn describe_all() -> Vec<(&'static str, String)> {
    vec![
        (
            "example2",
            "two arms over three outcomes, rewards (1, 2, 2) and (1.5, 0, 1.5); \
             pmf defaults to (0.3, 0.35, 0.35), override as example2(p1,p2,p3)"
                .to_string(),
        ),
        (
            "continuous-case1",
            format!("X ~ beta(4,4) on [0,1]; {}", continuous_arms_summary()),
        ),
        (
            "continuous-case2",
            format!("X ~ beta(2,5) on [0,1]; {}", continuous_arms_summary()),
        ),
        (
            "continuous-case3",
            format!("X ~ beta(1,5) on [0,1]; {}", continuous_arms_summary()),
        ),
        (
            "vector-case1",
            "X = (X1, X2) on {-1,0,1}^2, product law with P_X1 = (0.3, 0.4, 0.3) and \
             P_X2 = (0.38, 0.22, 0.4); arms X1+X2 and X1-X2"
                .to_string(),
        ),
        (
            "vector-case2",
            "X = (X1, X2) on {-1,0,1}^2 with P(1,-1) = 0.48, P(1,1) = 0.5 and the residual \
             0.02 spread evenly over the other seven cells (0.02/7 each, approx 0.0028); \
             arms X1+X2 and X1-X2"
                .to_string(),
        ),
        (
            "fig3-cases",
            format!(
                "five-outcome discrete source; pmfs {DISCRETE_PMF_1:?}, {DISCRETE_PMF_2:?}, \
                 {DISCRETE_PMF_3:?}; reward table user-supplied via --model (the reference \
                 curves exist only as plots)"
            ),
        ),
    ]
}

fn continuous_arms_summary() -> String {
    "arms gaussian_pdf(mu=0.5, sigma=0.2, scale=0.65), one_minus_exp(rate=2.5, lambda=0.5), \
     constant(0.5); midpoint grid (default 1000, --grid to change)"
        .to_string()
}

/// Build a built-in scenario by name. Names accept a call-style argument
/// list where documented (`example2(1,0,0)`); `grid` overrides the
/// discretization resolution of the continuous scenarios.
pub fn build(name: &str, grid: Option<usize>) -> Result<LatentModel, ScenarioError> {
    let (base, args) = split_call(name)?;
    let expect_no_args = |args: &[f64]| -> Result<(), ScenarioError> {
        if args.is_empty() {
            Ok(())
        } else {
            Err(ScenarioError::BadArgs {
                name: base.clone(),
                reason: "this scenario takes no arguments".into(),
            })
        }
    };
    match base.as_str() {
        "example2" => {
            let pmf = if args.is_empty() {
                vec![0.3, 0.35, 0.35]
            } else if args.len() == 3 {
                args
            } else {
                return Err(ScenarioError::BadArgs {
                    name: base,
                    reason: format!("expected 3 pmf entries, got {}", args.len()),
                });
            };
            Ok(example2(pmf)?)
        }
        "continuous-case1" => {
            expect_no_args(&args)?;
            Ok(continuous_case(Density::Beta { a: 4.0, b: 4.0 }, grid)?)
        }
        "continuous-case2" => {
            expect_no_args(&args)?;
            Ok(continuous_case(Density::Beta { a: 2.0, b: 5.0 }, grid)?)
        }
        "continuous-case3" => {
            expect_no_args(&args)?;
            Ok(continuous_case(Density::Beta { a: 1.0, b: 5.0 }, grid)?)
        }
        "vector-case1" => {
            expect_no_args(&args)?;
            Ok(vector_case1()?)
        }
        "vector-case2" => {
            expect_no_args(&args)?;
            Ok(vector_case2()?)
        }
        "fig3-cases" => Err(ScenarioError::RequiresUserTable),
        _ => Err(ScenarioError::Unknown(name.to_string())),
    }
}

fn split_call(name: &str) -> Result<(String, Vec<f64>), ScenarioError> {
    let name = name.trim();
    match name.find('(') {
        None => Ok((name.to_string(), Vec::new())),
        Some(open) if name.ends_with(')') => {
            let base = name[..open].to_string();
            let inner = &name[open + 1..name.len() - 1];
            let mut args = Vec::new();
            for piece in inner.split(',') {
                args.push(piece.trim().parse::<f64>().map_err(|_| ScenarioError::BadArgs {
                    name: base.clone(),
                    reason: format!("`{piece}` is not a number"),
                })?);
            }
            Ok((base, args))
        }
        Some(_) => Err(ScenarioError::Unknown(name.to_string())),
    }
}

/// The three-outcome, two-arm table: arm 0 pays (1, 2, 2), arm 1 pays
/// (1.5, 0, 1.5). Observing 2 from arm 0 leaves the realization ambiguous
/// between the last two outcomes, which is what makes the pseudo-reward
/// machinery non-trivial.
pub fn example2(pmf: Vec<f64>) -> Result<LatentModel, ModelError> {
    let space = OutcomeSpace::new(
        vec![vec![0.0], vec![1.0], vec![2.0]],
        Some(vec!["x1".into(), "x2".into(), "x3".into()]),
    )?;
    build_discrete(space, pmf, vec![vec![1.0, 2.0, 2.0], vec![1.5, 0.0, 1.5]])
}

fn continuous_case(density: Density, grid: Option<usize>) -> Result<LatentModel, ModelError> {
    discretize(&ContinuousSpec {
        density: density.to_fn(),
        reward_fns: vec![GAUSSIAN_ARM.to_fn(), RAMP_ARM.to_fn(), CONSTANT_ARM.to_fn()],
        domain: [0.0, 1.0],
        grid_size: grid.unwrap_or(DEFAULT_GRID),
    })
}

const VECTOR_SUPPORT: [f64; 3] = [-1.0, 0.0, 1.0];

/// Flatten `{-1,0,1}^2` lexicographically and evaluate the two arms
/// `X1 + X2` and `X1 - X2` on each cell.
fn vector_model(cell_mass: impl Fn(f64, f64) -> f64) -> Result<LatentModel, ModelError> {
    let mut outcomes = Vec::new();
    let mut pmf = Vec::new();
    for &x1 in &VECTOR_SUPPORT {
        for &x2 in &VECTOR_SUPPORT {
            outcomes.push(vec![x1, x2]);
            pmf.push(cell_mass(x1, x2));
        }
    }
    let rewards = vec![
        outcomes.iter().map(|p| p[0] + p[1]).collect(),
        outcomes.iter().map(|p| p[0] - p[1]).collect(),
    ];
    build_discrete(OutcomeSpace::new(outcomes, None)?, pmf, rewards)
}

/// Product law `P_X1 = (0.3, 0.4, 0.3)`, `P_X2 = (0.38, 0.22, 0.4)`.
pub fn vector_case1() -> Result<LatentModel, ModelError> {
    let p1 = |x: f64| match x as i64 {
        -1 => 0.3,
        0 => 0.4,
        _ => 0.3,
    };
    let p2 = |x: f64| match x as i64 {
        -1 => 0.38,
        0 => 0.22,
        _ => 0.4,
    };
    vector_model(|x1, x2| p1(x1) * p2(x2))
}

/// Mass 0.48 on (1,-1) and 0.5 on (1,1); the residual 0.02 is spread
/// evenly over the remaining seven cells (0.02/7 each, which prints as
/// 0.0028 at four decimals), so the cells sum to exactly one.
pub fn vector_case2() -> Result<LatentModel, ModelError> {
    vector_model(|x1, x2| {
        if x1 == 1.0 && x2 == -1.0 {
            0.48
        } else if x1 == 1.0 && x2 == 1.0 {
            0.5
        } else {
            0.02 / 7.0
        }
    })
}
