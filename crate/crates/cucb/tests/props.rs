//! Property tests: table lookups against brute-force enumeration,
//! permutation and translation invariances, replay determinism, and the
//! bookkeeping identities of the policy state.

use proptest::prelude::*;

use cucb::model::{build_discrete, discretize, ContinuousSpec, LatentModel, OutcomeSpace};
use cucb::policy::{cucb_select, update, PolicyState};
use cucb::pseudo::{build_table, classify, expected_pseudo_reward, DEFAULT_QUANTUM};
use cucb::scenarios;

/// Independent oracle: max of arm `l`'s rewards over every outcome whose
/// arm-`k` reward sits within the quantum of `r`.
fn brute_pseudo(model: &LatentModel, l: usize, k: usize, r: f64, quantum: f64) -> Option<f64> {
    let mut best: Option<f64> = None;
    for j in 0..model.num_outcomes() {
        if (model.reward(k, j) - r).abs() <= quantum {
            let v = model.reward(l, j);
            best = Some(best.map_or(v, |b| b.max(v)));
        }
    }
    best
}

fn quarter_grid_model(max_arms: usize, max_outcomes: usize) -> impl Strategy<Value = LatentModel> {
    (2..=max_arms, 1..=max_outcomes).prop_flat_map(|(k, j)| {
        let pmf = prop::collection::vec(0.001f64..1.0, j);
        // Quarter-grid rewards force exact value collisions (non-invertible
        // arms) while keeping distinct values far beyond the quantum.
        let rewards = prop::collection::vec(prop::collection::vec(-8i32..=8i32, j), k);
        (pmf, rewards).prop_map(move |(pmf, rows)| {
            let points: Vec<f64> = (0..j).map(|x| x as f64).collect();
            let rewards = rows
                .into_iter()
                .map(|row| row.into_iter().map(|v| v as f64 * 0.25).collect())
                .collect();
            build_discrete(OutcomeSpace::scalar(&points).unwrap(), pmf, rewards).unwrap()
        })
    })
}

fn continuous_valued_model(max_arms: usize, max_outcomes: usize) -> impl Strategy<Value = LatentModel> {
    (2..=max_arms, 1..=max_outcomes).prop_flat_map(|(k, j)| {
        let pmf = prop::collection::vec(0.001f64..1.0, j);
        let rewards = prop::collection::vec(prop::collection::vec(-1.0f64..1.0, j), k);
        (pmf, rewards).prop_map(move |(pmf, rewards)| {
            let points: Vec<f64> = (0..j).map(|x| x as f64).collect();
            build_discrete(OutcomeSpace::scalar(&points).unwrap(), pmf, rewards).unwrap()
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    /// Table lookups equal brute-force recomputation on every (l, k, key),
    /// the pseudo-reward dominates every preimage member, and the expected
    /// pseudo-reward dominates the arm's own mean.
    #[test]
    fn table_matches_brute_force(model in quarter_grid_model(6, 50)) {
        let table = build_table(&model, DEFAULT_QUANTUM);
        for k in 0..model.num_arms() {
            for (idx, &key) in table.keys(k).iter().enumerate() {
                for l in 0..model.num_arms() {
                    let looked_up = table.pseudo_reward(l, k, key).unwrap();
                    let brute = brute_pseudo(&model, l, k, key, DEFAULT_QUANTUM).unwrap();
                    prop_assert_eq!(looked_up, brute);
                    for &j in table.preimage(k, idx) {
                        prop_assert!(looked_up >= model.reward(l, j));
                    }
                }
            }
            for l in 0..model.num_arms() {
                let phi = expected_pseudo_reward(&model, &table, l, k);
                prop_assert!(phi >= model.expected_reward(l) - 1e-12);
            }
        }
    }

    #[test]
    fn table_matches_brute_force_on_continuous_values(model in continuous_valued_model(5, 30)) {
        let table = build_table(&model, DEFAULT_QUANTUM);
        for k in 0..model.num_arms() {
            for &key in table.keys(k) {
                for l in 0..model.num_arms() {
                    prop_assert_eq!(
                        table.pseudo_reward(l, k, key).unwrap(),
                        brute_pseudo(&model, l, k, key, DEFAULT_QUANTUM).unwrap()
                    );
                }
            }
        }
    }

    /// Classification does not depend on the order outcomes are listed in.
    #[test]
    fn classify_is_permutation_invariant(
        model in quarter_grid_model(5, 20),
        salt in any::<u64>(),
    ) {
        let j = model.num_outcomes();
        let mut perm: Vec<usize> = (0..j).collect();
        // Deterministic shuffle from the salt.
        for i in (1..j).rev() {
            let pick = (salt.wrapping_mul(0x9E3779B97F4A7C15).wrapping_add(i as u64)
                % (i as u64 + 1)) as usize;
            perm.swap(i, pick);
        }
        let outcomes: Vec<Vec<f64>> = perm.iter().map(|&p| model.space().outcome(p).to_vec()).collect();
        let pmf: Vec<f64> = perm.iter().map(|&p| model.pmf()[p]).collect();
        let rewards: Vec<Vec<f64>> = (0..model.num_arms())
            .map(|k| perm.iter().map(|&p| model.reward(k, p)).collect())
            .collect();
        let permuted = build_discrete(OutcomeSpace::new(outcomes, None).unwrap(), pmf, rewards).unwrap();

        let t_a = build_table(&model, DEFAULT_QUANTUM);
        let t_b = build_table(&permuted, DEFAULT_QUANTUM);
        let c_a = classify(&model, &t_a);
        let c_b = classify(&permuted, &t_b);
        match (c_a, c_b) {
            (Err(_), Err(_)) => {}
            (Ok(a), Ok(b)) => {
                // Only compare the partition when it is decisively away
                // from the boundary; the gap values must always agree.
                for l in 0..a.num_arms() {
                    for k in 0..a.num_arms() {
                        prop_assert!((a.pseudo_gaps[l][k] - b.pseudo_gaps[l][k]).abs() < 1e-12);
                    }
                }
                let decisive = (0..a.num_arms())
                    .filter(|&l| l != a.k_star)
                    .all(|l| a.gap_vs_optimal(l).abs() > 1e-9);
                let mean_gap_decisive = (0..a.num_arms()).all(|l| {
                    l == a.k_star || (a.mu[a.k_star] - a.mu[l]).abs() > 1e-9
                });
                if decisive && mean_gap_decisive {
                    prop_assert_eq!(a.k_star, b.k_star);
                    prop_assert_eq!(a.competitive, b.competitive);
                    prop_assert_eq!(a.non_competitive, b.non_competitive);
                }
            }
            (a, b) => prop_assert!(false, "tie flag diverged: {:?} vs {:?}", a.is_ok(), b.is_ok()),
        }
    }

    /// Scaling one arm's rewards scales its mean; shifting every arm by a
    /// common constant leaves the argmax alone.
    #[test]
    fn mean_is_linear_and_argmax_shift_invariant(
        model in quarter_grid_model(4, 12),
        scale in -4.0f64..4.0,
    ) {
        let k = 0;
        let mut rewards: Vec<Vec<f64>> = (0..model.num_arms())
            .map(|a| model.rewards_of(a).to_vec())
            .collect();
        for v in &mut rewards[k] {
            *v *= scale;
        }
        let scaled = build_discrete(
            OutcomeSpace::scalar(&(0..model.num_outcomes()).map(|x| x as f64).collect::<Vec<_>>()).unwrap(),
            model.pmf().to_vec(),
            rewards,
        ).unwrap();
        prop_assert!((scaled.expected_reward(k) - scale * model.expected_reward(k)).abs() < 1e-9);

        let shifted_rewards: Vec<Vec<f64>> = (0..model.num_arms())
            .map(|a| model.rewards_of(a).iter().map(|&v| v + 2.5).collect())
            .collect();
        let shifted = build_discrete(
            OutcomeSpace::scalar(&(0..model.num_outcomes()).map(|x| x as f64).collect::<Vec<_>>()).unwrap(),
            model.pmf().to_vec(),
            shifted_rewards,
        ).unwrap();
        prop_assert_eq!(model.optimal_arm().k_star, shifted.optimal_arm().k_star);
    }

    /// Replaying one outcome sequence through C-UCB twice gives identical
    /// selection reports; k_max is never removed; the running means equal
    /// a naive recomputation from the logged history; and shifting every
    /// reward by a common constant changes no decision.
    #[test]
    fn cucb_replay_identities(
        model in quarter_grid_model(4, 10),
        outcome_picks in prop::collection::vec(0usize..1000, 1..200),
    ) {
        let j = model.num_outcomes();
        let outcomes: Vec<usize> = outcome_picks.iter().map(|&p| p % j).collect();
        let table = build_table(&model, DEFAULT_QUANTUM);

        let shifted = build_discrete(
            OutcomeSpace::scalar(&(0..j).map(|x| x as f64).collect::<Vec<_>>()).unwrap(),
            model.pmf().to_vec(),
            (0..model.num_arms())
                .map(|a| model.rewards_of(a).iter().map(|&v| v + 2.5).collect())
                .collect(),
        ).unwrap();
        let shifted_table = build_table(&shifted, DEFAULT_QUANTUM);

        let mut s1 = PolicyState::for_model(&model);
        let mut s2 = PolicyState::for_model(&model);
        let mut s3 = PolicyState::for_model(&shifted);
        let mut history: Vec<(usize, f64)> = Vec::new();

        for &j_t in &outcomes {
            let r1 = cucb_select(&s1);
            let r2 = cucb_select(&s2);
            let r3 = cucb_select(&s3);
            prop_assert_eq!(&r1, &r2);
            prop_assert_eq!(r1.chosen, r3.chosen);
            prop_assert_eq!(r1.k_max, r3.k_max);
            prop_assert_eq!(&r1.removed, &r3.removed);
            prop_assert!(!r1.removed.contains(&r1.k_max));
            prop_assert!(!r1.removed.contains(&r1.chosen));

            let reward = model.reward(r1.chosen, j_t);
            history.push((r1.chosen, reward));
            update(&mut s1, r1.chosen, reward, &table).unwrap();
            update(&mut s2, r1.chosen, reward, &table).unwrap();
            update(&mut s3, r3.chosen, shifted.reward(r3.chosen, j_t), &shifted_table).unwrap();
        }

        // Naive recomputation oracle over the logged history.
        for k in 0..model.num_arms() {
            let on_k: Vec<f64> = history
                .iter()
                .filter(|&&(arm, _)| arm == k)
                .map(|&(_, r)| r)
                .collect();
            prop_assert_eq!(s1.pulls(k) as usize, on_k.len());
            if !on_k.is_empty() {
                let mean = on_k.iter().sum::<f64>() / on_k.len() as f64;
                prop_assert!((s1.mean_reward(k) - mean).abs() < 1e-12);
                let lo = model.rewards_of(k).iter().copied().fold(f64::INFINITY, f64::min);
                let hi = model.rewards_of(k).iter().copied().fold(f64::NEG_INFINITY, f64::max);
                prop_assert!(s1.mean_reward(k) >= lo - 1e-12 && s1.mean_reward(k) <= hi + 1e-12);
                for l in 0..model.num_arms() {
                    if l == k {
                        continue;
                    }
                    let phi_naive = history
                        .iter()
                        .filter(|&&(arm, _)| arm == k)
                        .map(|&(_, r)| table.pseudo_reward(l, k, r).unwrap())
                        .sum::<f64>() / on_k.len() as f64;
                    prop_assert!((s1.mean_pseudo_reward(l, k) - phi_naive).abs() < 1e-12);
                }
            }
        }
    }

    /// With invertible arms every pseudo-reward sample is the exact
    /// counterfactual reward, so a removal decision certifies that the
    /// removed arm's counterfactual mean on the reference arm's pull
    /// rounds was genuinely below the reference mean.
    #[test]
    fn removal_certifies_counterfactual_mean_when_invertible(
        steps in prop::collection::vec(0usize..5, 5..150),
    ) {
        // Strictly increasing rewards in the outcome index: invertible.
        let j = 5;
        let points: Vec<f64> = (0..j).map(|x| x as f64).collect();
        let rewards: Vec<Vec<f64>> = vec![
            (0..j).map(|x| 0.25 * x as f64).collect(),
            (0..j).map(|x| 1.0 - 0.125 * x as f64).collect(),
            (0..j).map(|x| 0.5 + 0.0625 * x as f64).collect(),
        ];
        let model = build_discrete(
            OutcomeSpace::scalar(&points).unwrap(),
            vec![0.2; j],
            rewards,
        ).unwrap();
        let table = build_table(&model, DEFAULT_QUANTUM);
        let mut state = PolicyState::for_model(&model);
        let mut x_log: Vec<(usize, usize)> = Vec::new(); // (chosen, outcome)

        for &outcome in &steps {
            let rep = cucb_select(&state);
            for &removed in &rep.removed {
                let on_kmax: Vec<usize> = x_log
                    .iter()
                    .filter(|&&(arm, _)| arm == rep.k_max)
                    .map(|&(_, x)| x)
                    .collect();
                prop_assert!(!on_kmax.is_empty());
                let counterfactual = on_kmax
                    .iter()
                    .map(|&x| model.reward(removed, x))
                    .sum::<f64>() / on_kmax.len() as f64;
                prop_assert!(
                    state.mean_reward(rep.k_max) > counterfactual - 1e-9,
                    "removed {} but counterfactual mean {} >= reference mean {}",
                    removed, counterfactual, state.mean_reward(rep.k_max)
                );
            }
            let r = model.reward(rep.chosen, outcome);
            x_log.push((rep.chosen, outcome));
            update(&mut state, rep.chosen, r, &table).unwrap();
        }
    }

    /// Normalization: every constructed pmf sums to one within accumulation
    /// slack.
    #[test]
    fn pmf_normalizes(model in quarter_grid_model(3, 40)) {
        let total: f64 = model.pmf().iter().sum();
        prop_assert!((total - 1.0).abs() < 1e-12);
    }
}

/// Midpoint refinement: doubling the grid moves the discretized means by
/// less than 1e-3 for the built-in continuous reward curves.
#[test]
fn discretization_refinement_is_stable() {
    for density in ["continuous-case1", "continuous-case2", "continuous-case3"] {
        let coarse = scenarios::build(density, Some(1000)).unwrap();
        let fine = scenarios::build(density, Some(2000)).unwrap();
        for k in 0..coarse.num_arms() {
            let d = (coarse.expected_reward(k) - fine.expected_reward(k)).abs();
            assert!(d < 1e-3, "{density} arm {k}: refinement moved mean by {d}");
        }
    }
}

/// The discretizer itself at two resolutions, without the scenario layer.
#[test]
fn discretize_converges_for_smooth_density() {
    let spec = |n: usize| ContinuousSpec {
        density: Box::new(|x: f64| (1.0 - x).powi(3)),
        reward_fns: vec![Box::new(|x: f64| x * x), Box::new(|x: f64| 1.0 - x)],
        domain: [0.0, 1.0],
        grid_size: n,
    };
    let coarse = discretize(&spec(1000)).unwrap();
    let fine = discretize(&spec(2000)).unwrap();
    for k in 0..2 {
        assert!((coarse.expected_reward(k) - fine.expected_reward(k)).abs() < 1e-3);
    }
}
