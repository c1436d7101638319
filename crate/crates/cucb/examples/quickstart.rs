//! Classify a built-in scenario and compare UCB1 with C-UCB on it.
//!
//! Run with: cargo run --release --example quickstart

use std::sync::Arc;

use cucb::policy::PolicyKind;
use cucb::pseudo::{build_table, classify, DEFAULT_QUANTUM};
use cucb::scenarios;
use cucb::sim::{run_experiment, ExperimentConfig};

fn main() {
    let model = scenarios::build("continuous-case2", None).expect("built-in scenario");
    let table = Arc::new(build_table(&model, DEFAULT_QUANTUM));

    let c = classify(&model, &table).expect("unique optimal arm");
    println!("optimal arm: {}", c.k_star);
    println!("competitive arms: {:?}", c.competitive);
    println!("non-competitive arms: {:?}", c.non_competitive);

    let config = ExperimentConfig::new(20_000, 50, 1, vec![PolicyKind::Ucb1, PolicyKind::Cucb]);
    let outcome = run_experiment(&model, &table, &config).expect("experiment");
    for trace in &outcome.traces {
        println!(
            "{}: mean regret at T={} is {:.2} +/- {:.2}",
            trace.policy,
            trace.grid.last().unwrap(),
            trace.mean_regret.last().unwrap(),
            trace.stderr_regret.last().unwrap(),
        );
    }
}
