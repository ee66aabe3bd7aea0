//! Failure-model and economics analysis.
//!
//! Classifies implementations by share (minority below 1/3, supermajority
//! above 2/3, majority in between with both boundaries inclusive), derives the
//! impact of a correlated bug in one implementation, and answers the two
//! economics questions: can a mechanism prove within a block interval, and
//! what reward offsets its on-chain verification cost.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::proofs::{default_cost_model, ProofMechanism};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClientClass {
    Minority,
    Majority,
    Supermajority,
}

/// Classify a share: strictly below 1/3 is a minority, strictly above 2/3 a
/// supermajority, everything between (boundaries included) a majority.
pub fn classify(share: f64) -> ClientClass {
    debug_assert!((0.0..=1.0).contains(&share));
    if share < 1.0 / 3.0 {
        ClientClass::Minority
    } else if share > 2.0 / 3.0 {
        ClientClass::Supermajority
    } else {
        ClientClass::Majority
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AnalysisError {
    #[error("implementation {0:?} is not in the distribution")]
    UnknownImpl(String),
    #[error("distribution holds no nodes")]
    EmptyDistribution,
}

/// Consequences of a consensus-violating bug in one implementation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResilienceReport {
    pub buggy_impl: String,
    pub affected_fraction: f64,
    pub class: ClientClass,
    /// Nodes penalized if the bug causes equivocating votes.
    pub slashed_count: u64,
    /// Whether the incorrect state wins consensus outright, which requires a
    /// supermajority of nodes on the buggy implementation.
    pub corrupted_state_accepted: bool,
}

/// Impact of mass-slashing all nodes running `buggy`.
pub fn slash_impact(
    counts: &BTreeMap<String, u64>,
    buggy: &str,
) -> Result<ResilienceReport, AnalysisError> {
    let slashed_count = *counts
        .get(buggy)
        .ok_or_else(|| AnalysisError::UnknownImpl(buggy.to_string()))?;
    let total: u64 = counts.values().sum();
    if total == 0 {
        return Err(AnalysisError::EmptyDistribution);
    }
    let affected_fraction = slashed_count as f64 / total as f64;
    let class = classify(affected_fraction);
    Ok(ResilienceReport {
        buggy_impl: buggy.to_string(),
        affected_fraction,
        class,
        slashed_count,
        corrupted_state_accepted: class == ClientClass::Supermajority,
    })
}

/// Can `mechanism` produce a proof within one block interval?
///
/// Returns the verdict plus the margin `proving_time / block_time` (above 1
/// means the mechanism cannot keep up).
pub fn proving_feasible(mechanism: ProofMechanism, block_time_s: f64) -> (bool, f64) {
    assert!(block_time_s > 0.0, "block time must be positive");
    let proving = default_cost_model(mechanism).proving_time_s;
    (proving <= block_time_s, proving / block_time_s)
}

/// Which gas column the break-even calculation uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GasStat {
    Min,
    Avg,
    Max,
}

/// Minimum reward at which submitting a proof is not loss-making, i.e. the
/// verification gas times the gas price. Uses the average gas figure.
pub fn break_even_reward(mechanism: ProofMechanism, gas_price: u64) -> u128 {
    break_even_reward_at(mechanism, gas_price, GasStat::Avg)
}

pub fn break_even_reward_at(mechanism: ProofMechanism, gas_price: u64, stat: GasStat) -> u128 {
    let model = default_cost_model(mechanism);
    let gas = match stat {
        GasStat::Min => model.verify_gas_min,
        GasStat::Avg => model.verify_gas_avg,
        GasStat::Max => model.verify_gas_max,
    };
    gas as u128 * gas_price as u128
}
