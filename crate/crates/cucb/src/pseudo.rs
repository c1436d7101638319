//! Pseudo-rewards and competitiveness.
//!
//! When arm `k` pays `r`, the source realization must lie in the preimage
//! `{x : g_k(x) = r}`. The pseudo-reward of arm `l` with respect to `k` is
//! the largest reward `l` could have produced on that preimage — an
//! upper-bounding surrogate sample for `l` manufactured from `k`'s
//! observation. Arms whose expected pseudo-reward against the optimal arm
//! falls below the optimal mean can be ruled out without ever pulling them.

use serde::Serialize;
use thiserror::Error;

use crate::model::LatentModel;

/// Absolute tolerance under which two reward values share one preimage key.
pub const DEFAULT_QUANTUM: f64 = 1e-9;

#[derive(Debug, Error, PartialEq)]
pub enum PseudoError {
    #[error("reward {reward} matches no value of arm {arm} within the quantum")]
    UnknownReward { arm: usize, reward: f64 },
    #[error("optimal arm is not unique; classification is undefined")]
    NonUniqueOptimum,
}

#[derive(Debug, Clone)]
struct ArmTable {
    /// Canonical reward keys, ascending. A key is the maximum value of its
    /// group, so the self pseudo-reward `s_{k,k}(key)` equals the key.
    keys: Vec<f64>,
    /// Outcome indices in each key's preimage, ascending.
    preimages: Vec<Vec<usize>>,
    /// `pseudo[key][l]` = max of `rewards[l]` over the key's preimage.
    pseudo: Vec<Vec<f64>>,
    /// Every table value with its key index, ascending by value, for lookup.
    values: Vec<(f64, usize)>,
    /// Key index of each outcome.
    outcome_key: Vec<usize>,
}

/// Precomputed pseudo-reward tables for every (source arm, reward value)
/// pair. Immutable after construction and shareable across workers.
#[derive(Debug, Clone)]
pub struct PseudoRewardTable {
    quantum: f64,
    arms: Vec<ArmTable>,
}

/// Group each arm's reward values into preimages (values within `quantum`
/// of their sorted neighbor share a key) and precompute the max of every
/// other arm's rewards over each preimage.
pub fn build_table(model: &LatentModel, quantum: f64) -> PseudoRewardTable {
    let quantum = if quantum > 0.0 { quantum } else { DEFAULT_QUANTUM };
    let k_arms = model.num_arms();
    let j_count = model.num_outcomes();
    let mut arms = Vec::with_capacity(k_arms);
    for k in 0..k_arms {
        let row = model.rewards_of(k);
        let mut order: Vec<usize> = (0..j_count).collect();
        order.sort_by(|&a, &b| row[a].total_cmp(&row[b]).then(a.cmp(&b)));

        let mut preimages: Vec<Vec<usize>> = Vec::new();
        for &j in &order {
            let start_new = match preimages.last() {
                None => true,
                Some(group) => row[j] - row[*group.last().unwrap()] > quantum,
            };
            if start_new {
                preimages.push(vec![j]);
            } else {
                preimages.last_mut().unwrap().push(j);
            }
        }

        let mut keys = Vec::with_capacity(preimages.len());
        let mut pseudo = Vec::with_capacity(preimages.len());
        let mut outcome_key = vec![0usize; j_count];
        let mut values = Vec::with_capacity(j_count);
        for (idx, group) in preimages.iter_mut().enumerate() {
            // Members arrive value-sorted; the key is the group maximum.
            keys.push(row[*group.last().unwrap()]);
            for &j in group.iter() {
                outcome_key[j] = idx;
                values.push((row[j], idx));
            }
            group.sort_unstable();
            let best: Vec<f64> = (0..k_arms)
                .map(|l| {
                    group
                        .iter()
                        .map(|&j| model.reward(l, j))
                        .fold(f64::NEG_INFINITY, f64::max)
                })
                .collect();
            pseudo.push(best);
        }
        arms.push(ArmTable { keys, preimages, pseudo, values, outcome_key });
    }
    PseudoRewardTable { quantum, arms }
}

impl PseudoRewardTable {
    pub fn quantum(&self) -> f64 {
        self.quantum
    }

    pub fn num_arms(&self) -> usize {
        self.arms.len()
    }

    /// Canonical reward keys of arm `k`, ascending.
    pub fn keys(&self, k: usize) -> &[f64] {
        &self.arms[k].keys
    }

    /// Outcome indices whose arm-`k` reward maps to key `idx`.
    pub fn preimage(&self, k: usize, idx: usize) -> &[usize] {
        &self.arms[k].preimages[idx]
    }

    /// Key index of outcome `j` under source arm `k`.
    pub fn key_of_outcome(&self, k: usize, j: usize) -> usize {
        self.arms[k].outcome_key[j]
    }

    /// Resolve an observed reward of arm `k` to its key index. A miss means
    /// the observation was not generated by this model — a configuration
    /// bug, not something to paper over with a nearest-key fallback.
    pub fn key_index(&self, k: usize, r: f64) -> Result<usize, PseudoError> {
        let values = &self.arms[k].values;
        let pos = values.partition_point(|&(v, _)| v < r);
        let mut best: Option<(f64, usize)> = None;
        for cand in [pos.checked_sub(1), Some(pos)].into_iter().flatten() {
            if let Some(&(v, idx)) = values.get(cand) {
                let d = (v - r).abs();
                if best.is_none_or(|(bd, _)| d < bd) {
                    best = Some((d, idx));
                }
            }
        }
        match best {
            Some((d, idx)) if d <= self.quantum => Ok(idx),
            _ => Err(PseudoError::UnknownReward { arm: k, reward: r }),
        }
    }

    /// Pseudo-rewards of every arm given that arm `k` paid `r`.
    pub fn pseudo_values(&self, k: usize, r: f64) -> Result<&[f64], PseudoError> {
        let idx = self.key_index(k, r)?;
        Ok(&self.arms[k].pseudo[idx])
    }

    /// `s_{l,k}(r)`: the largest reward arm `l` could have produced given
    /// that arm `k` produced `r`.
    pub fn pseudo_reward(&self, l: usize, k: usize, r: f64) -> Result<f64, PseudoError> {
        Ok(self.pseudo_values(k, r)?[l])
    }

    /// Mass of each reward key of arm `k` under the given outcome weights
    /// (the pushforward of the source distribution through `g_k`).
    pub fn pushforward(&self, k: usize, weights: &[f64]) -> Vec<f64> {
        let arm = &self.arms[k];
        let mut mass = vec![0.0; arm.keys.len()];
        for (j, &w) in weights.iter().enumerate() {
            mass[arm.outcome_key[j]] += w;
        }
        mass
    }
}

/// `phi_{l,k}`: expectation of the pseudo-reward of arm `l` over arm `k`'s
/// reward distribution. Always at least `mu_l`.
pub fn expected_pseudo_reward(
    model: &LatentModel,
    table: &PseudoRewardTable,
    l: usize,
    k: usize,
) -> f64 {
    let arm = &table.arms[k];
    model
        .pmf()
        .iter()
        .enumerate()
        .map(|(j, &p)| p * arm.pseudo[arm.outcome_key[j]][l])
        .sum()
}

/// Full `phi[l][k]` matrix.
pub fn expected_pseudo_matrix(model: &LatentModel, table: &PseudoRewardTable) -> Vec<Vec<f64>> {
    let k_arms = model.num_arms();
    (0..k_arms)
        .map(|l| (0..k_arms).map(|k| expected_pseudo_reward(model, table, l, k)).collect())
        .collect()
}

/// Ground-truth partition of the arms against the optimal arm.
///
/// `pseudo_gaps[l][k] = mu_k - phi_{l,k}` for every pair (the policy
/// compares against the most-pulled arm, which need not be the optimal
/// one, so the full matrix is kept for diagnostics). An arm is
/// non-competitive when its gap against `k_star` is strictly positive; a
/// gap of exactly zero classifies as competitive and is listed in
/// `boundary`, since exploration is the safe call on the fence.
#[derive(Debug, Clone, Serialize)]
pub struct Classification {
    pub k_star: usize,
    pub mu: Vec<f64>,
    pub delta: Vec<f64>,
    pub competitive: Vec<usize>,
    pub non_competitive: Vec<usize>,
    pub boundary: Vec<usize>,
    pub pseudo_gaps: Vec<Vec<f64>>,
}

pub fn classify(
    model: &LatentModel,
    table: &PseudoRewardTable,
) -> Result<Classification, PseudoError> {
    let opt = model.optimal_arm();
    if opt.tie {
        return Err(PseudoError::NonUniqueOptimum);
    }
    let mu = model.means();
    let phi = expected_pseudo_matrix(model, table);
    let k_arms = model.num_arms();
    let pseudo_gaps: Vec<Vec<f64>> = (0..k_arms)
        .map(|l| (0..k_arms).map(|k| mu[k] - phi[l][k]).collect())
        .collect();
    let mut competitive = Vec::new();
    let mut non_competitive = Vec::new();
    let mut boundary = Vec::new();
    for (l, row) in pseudo_gaps.iter().enumerate() {
        if l == opt.k_star {
            continue;
        }
        let gap = row[opt.k_star];
        if gap > 0.0 {
            non_competitive.push(l);
        } else {
            competitive.push(l);
            if gap == 0.0 {
                boundary.push(l);
            }
        }
    }
    Ok(Classification {
        k_star: opt.k_star,
        mu,
        delta: opt.delta,
        competitive,
        non_competitive,
        boundary,
        pseudo_gaps,
    })
}

impl Classification {
    pub fn num_arms(&self) -> usize {
        self.mu.len()
    }

    /// Pseudo-gap of each arm against the optimal arm.
    pub fn gap_vs_optimal(&self, l: usize) -> f64 {
        self.pseudo_gaps[l][self.k_star]
    }
}
