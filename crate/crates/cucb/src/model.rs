//! Latent-source model: a finite outcome space, a probability mass vector,
//! and one known reward function per arm, stored as a dense table.
//!
//! Continuous sources are handled by midpoint discretization onto a finite
//! grid, after which the whole pipeline (preimages, pseudo-rewards, bounds)
//! is exact on the finite support.

use rand::Rng;
use serde::Deserialize;
use thiserror::Error;

/// Errors raised while constructing or loading a model.
#[derive(Debug, Error)]
pub enum ModelError {
    #[error("outcome space is empty")]
    EmptySpace,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("pmf[{index}] is negative ({value})")]
    NegativeProbability { index: usize, value: f64 },
    #[error("probability mass sums to zero on the support")]
    ZeroMass,
    #[error("{field} contains a non-finite value")]
    NonFinite { field: String },
    #[error("outcomes {a} and {b} are identical points")]
    DuplicateOutcome { a: usize, b: usize },
    #[error("grid_size must be at least 2 (got {got})")]
    InvalidGrid { got: usize },
    #[error("domain [{a}, {b}] is empty or inverted")]
    InvalidDomain { a: f64, b: f64 },
    #[error("reward_span {given} is below the largest per-arm range {required}")]
    InvalidSpan { given: f64, required: f64 },
    #[error("unrecognized function form `{0}`")]
    UnknownForm(String),
    #[error("model file: {0}")]
    Json(#[from] serde_json::Error),
}

/// Finite sample space of the latent source. Each outcome is a point in
/// `R^m` (`m = 1` for a scalar source); points must be pairwise distinct.
#[derive(Debug, Clone)]
pub struct OutcomeSpace {
    outcomes: Vec<Vec<f64>>,
    labels: Option<Vec<String>>,
}

impl OutcomeSpace {
    pub fn new(outcomes: Vec<Vec<f64>>, labels: Option<Vec<String>>) -> Result<Self, ModelError> {
        if outcomes.is_empty() {
            return Err(ModelError::EmptySpace);
        }
        let dim = outcomes[0].len();
        if dim == 0 {
            return Err(ModelError::DimensionMismatch(
                "outcome points must have at least one coordinate".into(),
            ));
        }
        for (j, point) in outcomes.iter().enumerate() {
            if point.len() != dim {
                return Err(ModelError::DimensionMismatch(format!(
                    "outcomes[{j}] has dimension {}, expected {dim}",
                    point.len()
                )));
            }
            if point.iter().any(|v| !v.is_finite()) {
                return Err(ModelError::NonFinite {
                    field: format!("outcomes[{j}]"),
                });
            }
        }
        if let Some(ls) = &labels {
            if ls.len() != outcomes.len() {
                return Err(ModelError::DimensionMismatch(format!(
                    "labels has length {}, expected {}",
                    ls.len(),
                    outcomes.len()
                )));
            }
        }
        // Distinctness via a sorted pass instead of the quadratic scan.
        let mut order: Vec<usize> = (0..outcomes.len()).collect();
        order.sort_by(|&a, &b| cmp_points(&outcomes[a], &outcomes[b]));
        for w in order.windows(2) {
            if cmp_points(&outcomes[w[0]], &outcomes[w[1]]) == std::cmp::Ordering::Equal {
                return Err(ModelError::DuplicateOutcome {
                    a: w[0].min(w[1]),
                    b: w[0].max(w[1]),
                });
            }
        }
        Ok(Self { outcomes, labels })
    }

    /// Scalar space with outcomes at the given coordinates.
    pub fn scalar(points: &[f64]) -> Result<Self, ModelError> {
        Self::new(points.iter().map(|&x| vec![x]).collect(), None)
    }

    pub fn len(&self) -> usize {
        self.outcomes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.outcomes.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.outcomes[0].len()
    }

    pub fn outcome(&self, j: usize) -> &[f64] {
        &self.outcomes[j]
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }
}

fn cmp_points(a: &[f64], b: &[f64]) -> std::cmp::Ordering {
    for (x, y) in a.iter().zip(b.iter()) {
        let c = x.total_cmp(y);
        if c != std::cmp::Ordering::Equal {
            return c;
        }
    }
    std::cmp::Ordering::Equal
}

/// The argmax of the mean rewards, the per-arm sub-optimality gaps, and a
/// flag for a non-unique maximum (the analysis assumes a unique best arm;
/// ties break to the lowest index but remain visible through the flag).
#[derive(Debug, Clone, PartialEq)]
pub struct OptimalArm {
    pub k_star: usize,
    pub delta: Vec<f64>,
    pub tie: bool,
}

/// A latent random source with known per-arm reward tables.
///
/// `rewards[k][j]` is the reward of arm `k` when the source realizes
/// outcome `j`. The pmf is normalized at construction; `reward_span` is the
/// width bound `B` used by the UCB index (largest per-arm reward range
/// unless overridden to something wider).
#[derive(Debug, Clone)]
pub struct LatentModel {
    space: OutcomeSpace,
    pmf: Vec<f64>,
    rewards: Vec<Vec<f64>>,
    reward_span: f64,
    cdf: Vec<f64>,
}

/// Construct a model over a finite space. The pmf is normalized to sum to
/// one (dividing by its total); the reward span defaults to the largest
/// per-arm range.
pub fn build_discrete(
    space: OutcomeSpace,
    pmf: Vec<f64>,
    rewards: Vec<Vec<f64>>,
) -> Result<LatentModel, ModelError> {
    let j_count = space.len();
    if pmf.len() != j_count {
        return Err(ModelError::DimensionMismatch(format!(
            "pmf has length {}, expected {j_count}",
            pmf.len()
        )));
    }
    if rewards.is_empty() {
        return Err(ModelError::DimensionMismatch(
            "rewards must have at least one row (one arm)".into(),
        ));
    }
    for (k, row) in rewards.iter().enumerate() {
        if row.len() != j_count {
            return Err(ModelError::DimensionMismatch(format!(
                "rewards[{k}] has length {}, expected {j_count}",
                row.len()
            )));
        }
        if row.iter().any(|v| !v.is_finite()) {
            return Err(ModelError::NonFinite {
                field: format!("rewards[{k}]"),
            });
        }
    }
    for (j, &p) in pmf.iter().enumerate() {
        if !p.is_finite() {
            return Err(ModelError::NonFinite { field: format!("pmf[{j}]") });
        }
        if p < 0.0 {
            return Err(ModelError::NegativeProbability { index: j, value: p });
        }
    }
    let total: f64 = pmf.iter().sum();
    if total <= 0.0 {
        return Err(ModelError::ZeroMass);
    }
    let pmf: Vec<f64> = pmf.into_iter().map(|p| p / total).collect();
    let mut cdf = Vec::with_capacity(j_count);
    let mut acc = 0.0;
    for &p in &pmf {
        acc += p;
        cdf.push(acc);
    }
    let reward_span = rewards
        .iter()
        .map(|row| {
            let max = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let min = row.iter().copied().fold(f64::INFINITY, f64::min);
            max - min
        })
        .fold(0.0f64, f64::max);
    Ok(LatentModel { space, pmf, rewards, reward_span, cdf })
}

impl LatentModel {
    /// Widen the span bound `B`. The override must cover every arm's range.
    pub fn with_reward_span(mut self, span: f64) -> Result<Self, ModelError> {
        let required = self.reward_span;
        if !span.is_finite() || span < required {
            return Err(ModelError::InvalidSpan { given: span, required });
        }
        self.reward_span = span;
        Ok(self)
    }

    pub fn num_arms(&self) -> usize {
        self.rewards.len()
    }

    pub fn num_outcomes(&self) -> usize {
        self.pmf.len()
    }

    pub fn space(&self) -> &OutcomeSpace {
        &self.space
    }

    pub fn pmf(&self) -> &[f64] {
        &self.pmf
    }

    pub fn rewards_of(&self, k: usize) -> &[f64] {
        &self.rewards[k]
    }

    pub fn reward(&self, k: usize, j: usize) -> f64 {
        self.rewards[k][j]
    }

    pub fn reward_span(&self) -> f64 {
        self.reward_span
    }

    /// Mean reward of arm `k` under the source distribution.
    pub fn expected_reward(&self, k: usize) -> f64 {
        self.pmf
            .iter()
            .zip(self.rewards[k].iter())
            .map(|(p, r)| p * r)
            .sum()
    }

    pub fn means(&self) -> Vec<f64> {
        (0..self.num_arms()).map(|k| self.expected_reward(k)).collect()
    }

    /// Best arm by mean reward, with per-arm gaps. Exact mean ties break to
    /// the lowest index and set the `tie` flag.
    pub fn optimal_arm(&self) -> OptimalArm {
        let means = self.means();
        let mut k_star = 0;
        for (k, &m) in means.iter().enumerate().skip(1) {
            if m > means[k_star] {
                k_star = k;
            }
        }
        let tie = means
            .iter()
            .enumerate()
            .any(|(k, &m)| k != k_star && m == means[k_star]);
        let delta = means.iter().map(|&m| means[k_star] - m).collect();
        OptimalArm { k_star, delta, tie }
    }

    /// Inverse-CDF lookup: the outcome index for a uniform draw `u` in
    /// `[0, 1)`. Exactly one draw per sampled outcome keeps common-random-
    /// number replay well defined.
    pub fn sample_index(&self, u: f64) -> usize {
        let j = self.cdf.partition_point(|&c| c <= u);
        j.min(self.num_outcomes() - 1)
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        self.sample_index(rng.random::<f64>())
    }
}

/// A continuous source on an interval, given as function handles, to be
/// discretized onto a midpoint grid.
pub struct ContinuousSpec {
    pub density: RealFn,
    pub reward_fns: Vec<RealFn>,
    pub domain: [f64; 2],
    pub grid_size: usize,
}

pub type RealFn = Box<dyn Fn(f64) -> f64 + Send + Sync>;

/// Discretize onto `grid_size` equal-width cells: outcomes are the cell
/// midpoints, the pmf is proportional to the density at each midpoint, and
/// each arm's table is its reward function evaluated at the midpoints.
pub fn discretize(spec: &ContinuousSpec) -> Result<LatentModel, ModelError> {
    let n = spec.grid_size;
    if n < 2 {
        return Err(ModelError::InvalidGrid { got: n });
    }
    let [a, b] = spec.domain;
    if !a.is_finite() || !b.is_finite() || a >= b {
        return Err(ModelError::InvalidDomain { a, b });
    }
    let width = (b - a) / n as f64;
    let midpoints: Vec<f64> = (0..n).map(|j| a + (j as f64 + 0.5) * width).collect();
    let mut weights = Vec::with_capacity(n);
    for (j, &x) in midpoints.iter().enumerate() {
        let w = (spec.density)(x);
        if !w.is_finite() {
            return Err(ModelError::NonFinite { field: format!("density at grid point {j}") });
        }
        if w < 0.0 {
            return Err(ModelError::NegativeProbability { index: j, value: w });
        }
        weights.push(w);
    }
    if weights.iter().sum::<f64>() <= 0.0 {
        return Err(ModelError::ZeroMass);
    }
    let rewards: Vec<Vec<f64>> = spec
        .reward_fns
        .iter()
        .map(|g| midpoints.iter().map(|&x| g(x)).collect())
        .collect();
    build_discrete(OutcomeSpace::scalar(&midpoints)?, weights, rewards)
}

// ---------------------------------------------------------------------------
// Named function forms and the model file schema
// ---------------------------------------------------------------------------

/// Built-in density forms for continuous model files.
#[derive(Debug, Clone, PartialEq)]
pub enum Density {
    Uniform,
    Beta { a: f64, b: f64 },
}

impl Density {
    pub fn parse(text: &str) -> Result<Self, ModelError> {
        let (name, args) = parse_call(text)?;
        match (name.as_str(), args.as_slice()) {
            ("uniform", []) => Ok(Density::Uniform),
            ("beta", [a, b]) if *a > 0.0 && *b > 0.0 => Ok(Density::Beta { a: *a, b: *b }),
            _ => Err(ModelError::UnknownForm(text.into())),
        }
    }

    pub fn to_fn(&self) -> RealFn {
        match *self {
            Density::Uniform => Box::new(|_| 1.0),
            // Unnormalized: discretization renormalizes on the grid.
            Density::Beta { a, b } => {
                Box::new(move |x: f64| {
                    if (0.0..=1.0).contains(&x) {
                        x.powf(a - 1.0) * (1.0 - x).powf(b - 1.0)
                    } else {
                        0.0
                    }
                })
            }
        }
    }
}

/// Built-in reward function forms for continuous model files.
#[derive(Debug, Clone, PartialEq)]
pub enum RewardForm {
    /// `scale * exp(-(x-mu)^2 / (2 sigma^2)) / (sigma sqrt(2 pi))`
    GaussianPdf { mu: f64, sigma: f64, scale: f64 },
    /// `1 - exp(-rate * x)`
    OneMinusExp { rate: f64 },
    Constant { c: f64 },
}

impl RewardForm {
    pub fn parse(text: &str) -> Result<Self, ModelError> {
        let (name, args) = parse_call(text)?;
        match (name.as_str(), args.as_slice()) {
            ("gaussian_pdf", [mu, sigma, scale]) if *sigma > 0.0 => Ok(RewardForm::GaussianPdf {
                mu: *mu,
                sigma: *sigma,
                scale: *scale,
            }),
            ("one_minus_exp", [rate]) => Ok(RewardForm::OneMinusExp { rate: *rate }),
            ("constant", [c]) => Ok(RewardForm::Constant { c: *c }),
            _ => Err(ModelError::UnknownForm(text.into())),
        }
    }

    pub fn to_fn(&self) -> RealFn {
        match *self {
            RewardForm::GaussianPdf { mu, sigma, scale } => {
                let norm = scale / (sigma * (2.0 * std::f64::consts::PI).sqrt());
                Box::new(move |x: f64| norm * (-(x - mu).powi(2) / (2.0 * sigma * sigma)).exp())
            }
            RewardForm::OneMinusExp { rate } => Box::new(move |x: f64| 1.0 - (-rate * x).exp()),
            RewardForm::Constant { c } => Box::new(move |_| c),
        }
    }
}

/// Parse `name(arg1,arg2,...)` or a bare `name`.
fn parse_call(text: &str) -> Result<(String, Vec<f64>), ModelError> {
    let text = text.trim();
    let bad = || ModelError::UnknownForm(text.into());
    match text.find('(') {
        None => {
            if text.is_empty() || !text.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-') {
                return Err(bad());
            }
            Ok((text.to_string(), Vec::new()))
        }
        Some(open) => {
            if !text.ends_with(')') {
                return Err(bad());
            }
            let name = text[..open].trim();
            if name.is_empty() {
                return Err(bad());
            }
            let inner = &text[open + 1..text.len() - 1];
            let mut args = Vec::new();
            if !inner.trim().is_empty() {
                for piece in inner.split(',') {
                    let v: f64 = piece.trim().parse().map_err(|_| bad())?;
                    if !v.is_finite() {
                        return Err(bad());
                    }
                    args.push(v);
                }
            }
            Ok((name.to_string(), args))
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct DiscreteFile {
    outcomes: Vec<Vec<f64>>,
    pmf: Vec<f64>,
    rewards: Vec<Vec<f64>>,
    #[serde(default)]
    labels: Option<Vec<String>>,
    #[serde(default)]
    reward_span: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ContinuousFile {
    continuous: ContinuousBody,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ContinuousBody {
    density: String,
    rewards: Vec<RewardEntry>,
    #[serde(default = "default_domain")]
    domain: [f64; 2],
    #[serde(default = "default_grid")]
    grid: usize,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum RewardEntry {
    Form(String),
    Table(Vec<f64>),
}

fn default_domain() -> [f64; 2] {
    [0.0, 1.0]
}

fn default_grid() -> usize {
    1000
}

/// Load a model from its JSON document form. Discrete documents list the
/// outcome points, pmf, and reward table directly; continuous documents
/// name a built-in density and reward forms under a `continuous` key and
/// are discretized on load. `grid_override` replaces the document's grid
/// size when given.
pub fn model_from_json(text: &str, grid_override: Option<usize>) -> Result<LatentModel, ModelError> {
    let value: serde_json::Value = serde_json::from_str(text)?;
    if value.get("continuous").is_some() {
        let file: ContinuousFile = serde_json::from_value(value)?;
        let body = file.continuous;
        let grid = grid_override.unwrap_or(body.grid);
        let density = Density::parse(&body.density)?.to_fn();
        let mut reward_fns: Vec<RealFn> = Vec::new();
        for entry in &body.rewards {
            match entry {
                RewardEntry::Form(s) => reward_fns.push(RewardForm::parse(s)?.to_fn()),
                RewardEntry::Table(values) => {
                    if values.len() != grid {
                        return Err(ModelError::DimensionMismatch(format!(
                            "reward table has {} entries, expected grid size {grid}",
                            values.len()
                        )));
                    }
                    let values = values.clone();
                    let [a, b] = body.domain;
                    let width = (b - a) / grid as f64;
                    reward_fns.push(Box::new(move |x: f64| {
                        let j = (((x - a) / width - 0.5).round() as isize)
                            .clamp(0, values.len() as isize - 1);
                        values[j as usize]
                    }));
                }
            }
        }
        discretize(&ContinuousSpec {
            density,
            reward_fns,
            domain: body.domain,
            grid_size: grid,
        })
    } else {
        let file: DiscreteFile = serde_json::from_value(value)?;
        let space = OutcomeSpace::new(file.outcomes, file.labels)?;
        let model = build_discrete(space, file.pmf, file.rewards)?;
        match file.reward_span {
            Some(span) => model.with_reward_span(span),
            None => Ok(model),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    /// Three-outcome model from the two-arm worked example: arm 0 pays
    /// (1, 2, 2), arm 1 pays (1.5, 0, 1.5).
    pub(crate) fn two_arm_model(pmf: [f64; 3]) -> LatentModel {
        build_discrete(
            OutcomeSpace::scalar(&[0.0, 1.0, 2.0]).unwrap(),
            pmf.to_vec(),
            vec![vec![1.0, 2.0, 2.0], vec![1.5, 0.0, 1.5]],
        )
        .unwrap()
    }

    #[test]
    fn build_computes_span_from_widest_arm() {
        let m = two_arm_model([0.3, 0.35, 0.35]);
        assert_eq!(m.reward_span(), 1.5);
    }

    #[test]
    fn single_outcome_model_has_zero_span() {
        let m = build_discrete(
            OutcomeSpace::scalar(&[0.0]).unwrap(),
            vec![1.0],
            vec![vec![7.0]],
        )
        .unwrap();
        assert_eq!(m.reward_span(), 0.0);
        assert_eq!(m.expected_reward(0), 7.0);
    }

    #[test]
    fn pmf_normalizes_by_total() {
        let m = build_discrete(
            OutcomeSpace::scalar(&[0.0, 1.0]).unwrap(),
            vec![0.2, 0.2],
            vec![vec![0.0, 1.0], vec![1.0, 0.0]],
        )
        .unwrap();
        assert_eq!(m.pmf(), &[0.5, 0.5]);
    }

    #[test]
    fn construction_rejects_bad_inputs() {
        assert!(matches!(
            OutcomeSpace::new(vec![], None),
            Err(ModelError::EmptySpace)
        ));
        assert!(matches!(
            OutcomeSpace::new(vec![vec![1.0], vec![1.0]], None),
            Err(ModelError::DuplicateOutcome { a: 0, b: 1 })
        ));
        let space = OutcomeSpace::scalar(&[0.0, 1.0]).unwrap();
        assert!(matches!(
            build_discrete(space.clone(), vec![0.5, -0.1], vec![vec![0.0, 1.0]]),
            Err(ModelError::NegativeProbability { index: 1, .. })
        ));
        assert!(matches!(
            build_discrete(space.clone(), vec![0.0, 0.0], vec![vec![0.0, 1.0]]),
            Err(ModelError::ZeroMass)
        ));
        assert!(matches!(
            build_discrete(space.clone(), vec![0.5], vec![vec![0.0, 1.0]]),
            Err(ModelError::DimensionMismatch(_))
        ));
        assert!(matches!(
            build_discrete(space, vec![0.5, 0.5], vec![]),
            Err(ModelError::DimensionMismatch(_))
        ));
    }

    #[test]
    fn expected_reward_matches_hand_arithmetic() {
        let m = two_arm_model([0.3, 0.35, 0.35]);
        assert!((m.expected_reward(0) - 1.7).abs() < 1e-15);
        assert!((m.expected_reward(1) - 0.975).abs() < 1e-15);
    }

    #[test]
    fn constant_arm_has_its_constant_mean() {
        let m = build_discrete(
            OutcomeSpace::scalar(&[0.0, 1.0, 2.0]).unwrap(),
            vec![0.2, 0.5, 0.3],
            vec![vec![0.5, 0.5, 0.5]],
        )
        .unwrap();
        assert_eq!(m.expected_reward(0), 0.5);
    }

    #[test]
    fn optimal_arm_on_degenerate_mass() {
        let m = two_arm_model([1.0, 0.0, 0.0]);
        let opt = m.optimal_arm();
        assert_eq!(opt.k_star, 1);
        assert!(!opt.tie);
        assert!((opt.delta[0] - 0.5).abs() < 1e-15);
        assert_eq!(opt.delta[1], 0.0);
    }

    #[test]
    fn identical_arms_raise_tie_flag() {
        let m = build_discrete(
            OutcomeSpace::scalar(&[0.0, 1.0]).unwrap(),
            vec![0.5, 0.5],
            vec![vec![1.0, 2.0], vec![1.0, 2.0]],
        )
        .unwrap();
        let opt = m.optimal_arm();
        assert_eq!(opt.k_star, 0);
        assert!(opt.tie);
    }

    #[test]
    fn sample_index_is_inverse_cdf() {
        let m = build_discrete(
            OutcomeSpace::scalar(&[0.0]).unwrap(),
            vec![1.0],
            vec![vec![0.0]],
        )
        .unwrap();
        assert_eq!(m.sample_index(0.0), 0);
        assert_eq!(m.sample_index(0.999999), 0);

        let m = build_discrete(
            OutcomeSpace::scalar(&[0.0, 1.0]).unwrap(),
            vec![0.3, 0.7],
            vec![vec![0.0, 1.0]],
        )
        .unwrap();
        assert_eq!(m.sample_index(0.25), 0);
        assert_eq!(m.sample_index(0.95), 1);
    }

    #[test]
    fn sample_frequencies_follow_pmf() {
        let pmf = [0.1, 0.2, 0.25, 0.25, 0.2];
        let m = build_discrete(
            OutcomeSpace::scalar(&[0.0, 1.0, 2.0, 3.0, 4.0]).unwrap(),
            pmf.to_vec(),
            vec![vec![0.0; 5]],
        )
        .unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut counts = [0u64; 5];
        let draws = 1_000_000;
        for _ in 0..draws {
            counts[m.sample(&mut rng)] += 1;
        }
        for (j, &c) in counts.iter().enumerate() {
            let freq = c as f64 / draws as f64;
            assert!(
                (freq - pmf[j]).abs() < 0.005,
                "outcome {j}: freq {freq} vs pmf {}",
                pmf[j]
            );
        }
    }

    #[test]
    fn discretize_uniform_constant() {
        let m = discretize(&ContinuousSpec {
            density: Box::new(|_| 1.0),
            reward_fns: vec![Box::new(|_| 0.5)],
            domain: [0.0, 1.0],
            grid_size: 4,
        })
        .unwrap();
        assert_eq!(m.pmf(), &[0.25, 0.25, 0.25, 0.25]);
        assert!(m.rewards_of(0).iter().all(|&r| r == 0.5));
        assert_eq!(m.space().outcome(0), &[0.125]);
    }

    #[test]
    fn discretize_rejects_degenerate_specs() {
        let spec = ContinuousSpec {
            density: Box::new(|_| 0.0),
            reward_fns: vec![Box::new(|_| 0.5)],
            domain: [0.0, 1.0],
            grid_size: 8,
        };
        assert!(matches!(discretize(&spec), Err(ModelError::ZeroMass)));
        let spec = ContinuousSpec {
            density: Box::new(|_| 1.0),
            reward_fns: vec![Box::new(|_| 0.5)],
            domain: [0.0, 1.0],
            grid_size: 1,
        };
        assert!(matches!(discretize(&spec), Err(ModelError::InvalidGrid { got: 1 })));
    }

    #[test]
    fn parse_call_accepts_bare_and_parenthesized_forms() {
        assert_eq!(parse_call("uniform").unwrap(), ("uniform".into(), vec![]));
        assert_eq!(
            parse_call("beta(4, 4)").unwrap(),
            ("beta".into(), vec![4.0, 4.0])
        );
        assert!(parse_call("beta(4,").is_err());
        assert!(parse_call("beta(x)").is_err());
        assert!(parse_call("").is_err());
    }

    #[test]
    fn json_roundtrip_discrete() {
        let text = r#"{
            "outcomes": [[0.0], [1.0], [2.0]],
            "pmf": [0.3, 0.35, 0.35],
            "rewards": [[1, 2, 2], [1.5, 0, 1.5]],
            "labels": ["x1", "x2", "x3"]
        }"#;
        let m = model_from_json(text, None).unwrap();
        assert_eq!(m.num_arms(), 2);
        assert!((m.expected_reward(0) - 1.7).abs() < 1e-15);
        assert_eq!(m.space().labels().unwrap()[2], "x3");
    }

    #[test]
    fn json_unknown_field_is_named_in_error() {
        let text = r#"{"outcomes": [[0.0]], "pmf": [1.0], "rewards": [[1.0]], "bogus": 3}"#;
        let err = model_from_json(text, None).unwrap_err();
        assert!(err.to_string().contains("bogus"), "{err}");
    }

    #[test]
    fn json_continuous_with_named_forms() {
        let text = r#"{
            "continuous": {
                "density": "beta(1,5)",
                "rewards": ["gaussian_pdf(0.5,0.2,0.65)", "one_minus_exp(2.5)", "constant(0.5)"],
                "grid": 200
            }
        }"#;
        let m = model_from_json(text, None).unwrap();
        assert_eq!(m.num_arms(), 3);
        assert_eq!(m.num_outcomes(), 200);
        assert!((m.expected_reward(2) - 0.5).abs() < 1e-12);
        let m = model_from_json(text, Some(50)).unwrap();
        assert_eq!(m.num_outcomes(), 50);
    }

    #[test]
    fn span_override_must_cover_ranges() {
        let m = two_arm_model([0.3, 0.35, 0.35]);
        assert!(m.clone().with_reward_span(2.0).is_ok());
        assert!(matches!(
            two_arm_model([0.3, 0.35, 0.35]).with_reward_span(1.0),
            Err(ModelError::InvalidSpan { .. })
        ));
    }
}
