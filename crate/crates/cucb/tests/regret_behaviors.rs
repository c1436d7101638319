//! Regret-curve behaviors on the built-in scenarios, beyond what the
//! acceptance criteria pin down.

use std::sync::Arc;

use cucb::policy::PolicyKind;
use cucb::pseudo::{build_table, classify, DEFAULT_QUANTUM};
use cucb::scenarios;
use cucb::sim::{run_experiment, ExperimentConfig};

/// The latent-vector instance whose sub-optimal arm can be ruled out from
/// the optimal arm's own samples: the filtered policy must land strictly
/// below plain UCB1 even though the pseudo-gap is small (about 0.011).
#[test]
fn vector_case2_filtered_policy_beats_ucb1() {
    let model = scenarios::vector_case2().unwrap();
    let table = Arc::new(build_table(&model, DEFAULT_QUANTUM));
    let c = classify(&model, &table).unwrap();
    assert!(c.competitive.is_empty());

    let config = ExperimentConfig::new(
        50_000,
        100,
        2024,
        vec![PolicyKind::Ucb1, PolicyKind::Cucb],
    )
    .with_stride(10_000);
    let out = run_experiment(&model, &table, &config).unwrap();
    let ucb1 = *out.traces[0].mean_regret.last().unwrap();
    let cucb = *out.traces[1].mean_regret.last().unwrap();
    let se = (out.traces[0].stderr_regret.last().unwrap().powi(2)
        + out.traces[1].stderr_regret.last().unwrap().powi(2))
    .sqrt();
    assert!(
        cucb < ucb1,
        "cucb {cucb} is not below ucb1 {ucb1} (combined se {se})"
    );
    assert!(
        ucb1 - cucb > 3.0 * se,
        "ordering margin {} too thin vs se {se}",
        ucb1 - cucb
    );
}
