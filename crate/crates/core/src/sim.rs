//! Block-driven simulation of rational validators choosing implementations.
//!
//! Each block, a staggered subset of validators (round-robin over a seeded
//! permutation, one per block by default) re-evaluates which implementation
//! maximizes its next reward, then every validator generates and submits a
//! proof of execution for its current implementation. Runs are fully
//! deterministic: identical config and seed produce byte-identical output.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::contract::{reward, ContractState, RewardOutcome, RewardParams, Share, WindowMode};
use crate::identity::{build_registry, CodeSegment, IdentityError};
use crate::proofs::{generate_proof, NodeKey, ProofMechanism};

/// Protocol step committed for every simulated implementation.
pub const SIM_STEP_ID: &str = "attest";

/// Deterministic xorshift64* generator; not cryptographic, stable across
/// platforms. Used only for the decision-order permutation.
#[derive(Debug, Clone)]
struct SimRng {
    state: u64,
}

impl SimRng {
    fn new(seed: u64) -> Self {
        // zero locks xorshift; remap to an arbitrary odd constant
        let state = if seed == 0 { 0x9E37_79B9_7F4A_7C15 } else { seed };
        SimRng { state }
    }

    fn next_u64(&mut self) -> u64 {
        let mut x = self.state;
        x ^= x >> 12;
        x ^= x << 25;
        x ^= x >> 27;
        self.state = x;
        x.wrapping_mul(0x2545_F491_4F6C_DD1D)
    }

    fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = (self.next_u64() % (i as u64 + 1)) as usize;
            items.swap(i, j);
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AgentStrategy {
    /// Re-evaluates every time it is scheduled to decide.
    Rational,
    /// Never switches.
    Fixed,
}

/// One simulated validator.
#[derive(Debug, Clone)]
pub struct ValidatorAgent {
    pub key: NodeKey,
    pub current_impl: String,
    pub strategy: AgentStrategy,
    pub switch_cost: u64,
}

/// Pick the implementation that maximizes the agent's next reward, net of the
/// switch cost.
///
/// Each candidate is scored by the reward the agent's next submission for it
/// would be paid: the contract pays against the share *before* the incoming
/// proof is counted, so the candidate's current window share is exactly the
/// relevant one. Ties keep the current implementation, then take the
/// lexicographically smallest id.
pub fn agent_decide(agent: &ValidatorAgent, state: &ContractState) -> String {
    let counts = state.counts_by_impl();
    let total: u64 = counts.values().sum();
    let n_impls = counts.len() as u64;

    let mut scores: Vec<(&String, i128)> = Vec::with_capacity(counts.len());
    for (impl_id, count) in &counts {
        let switching = *impl_id != agent.current_impl;
        let share = if total == 0 {
            Share::ZERO
        } else {
            Share::new(*count, total)
        };
        let gross = reward(share, n_impls, state.params()) as i128;
        let score = gross - if switching { agent.switch_cost as i128 } else { 0 };
        scores.push((impl_id, score));
    }

    let best = scores.iter().map(|(_, s)| *s).max().expect("registry non-empty");
    if scores
        .iter()
        .any(|(id, s)| *s == best && **id == agent.current_impl)
    {
        return agent.current_impl.clone();
    }
    scores
        .iter()
        .find(|(_, s)| *s == best)
        .map(|(id, _)| (*id).clone())
        .expect("max exists")
}

/// One simulated implementation: an id and the payload standing in for its
/// code segment.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ImplSpec {
    pub id: String,
    pub code: String,
}

fn default_mechanism() -> ProofMechanism {
    ProofMechanism::Attested
}

fn default_deciders() -> u32 {
    1
}

fn default_strategy() -> AgentStrategy {
    AgentStrategy::Rational
}

/// Full description of one simulation run.
///
/// Optional fields resolve against the rest of the config: `treasury`
/// defaults to `n_validators * r_max * max_blocks` (cannot deplete), `window`
/// to a sliding window sized to the validator set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    pub n_validators: u32,
    pub impls: Vec<ImplSpec>,
    pub initial_assignment: BTreeMap<String, u32>,
    pub params: RewardParams,
    #[serde(default = "default_mechanism")]
    pub mechanism: ProofMechanism,
    #[serde(default)]
    pub treasury: Option<u64>,
    pub max_blocks: u64,
    pub seed: u64,
    #[serde(default = "default_deciders")]
    pub deciders_per_block: u32,
    #[serde(default)]
    pub window: Option<WindowMode>,
    #[serde(default = "default_strategy")]
    pub strategy: AgentStrategy,
    #[serde(default)]
    pub switch_cost: u64,
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("invalid scenario config: {0}")]
    Invalid(String),
    #[error(transparent)]
    Registry(#[from] IdentityError),
    #[error("config is not valid JSON: {0}")]
    Json(#[from] serde_json::Error),
}

fn valid_impl_id(id: &str) -> bool {
    !id.is_empty()
        && id
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_')
}

impl ScenarioConfig {
    /// Parse and validate a JSON config.
    pub fn from_json_slice(bytes: &[u8]) -> Result<Self, ConfigError> {
        let config: ScenarioConfig = serde_json::from_slice(bytes)?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let fail = |msg: String| Err(ConfigError::Invalid(msg));
        if self.n_validators == 0 {
            return fail("n_validators must be positive".into());
        }
        if self.max_blocks == 0 {
            return fail("max_blocks must be positive".into());
        }
        if self.deciders_per_block == 0 {
            return fail("deciders_per_block must be positive".into());
        }
        if !self.params.is_valid() {
            return fail("reward params must satisfy r_max >= r_min > epsilon".into());
        }
        if self.impls.is_empty() {
            return fail("at least one implementation is required".into());
        }
        let mut seen = std::collections::BTreeSet::new();
        for spec in &self.impls {
            if !valid_impl_id(&spec.id) {
                return fail(format!(
                    "implementation id {:?} must be non-empty and [A-Za-z0-9_-]",
                    spec.id
                ));
            }
            if spec.code.is_empty() {
                return fail(format!("implementation {:?} has an empty code payload", spec.id));
            }
            if !seen.insert(spec.id.clone()) {
                return fail(format!("implementation id {:?} appears twice", spec.id));
            }
        }
        let mut assigned = 0u64;
        for (id, count) in &self.initial_assignment {
            if !seen.contains(id) {
                return fail(format!("initial_assignment references unknown impl {id:?}"));
            }
            assigned += *count as u64;
        }
        if assigned != self.n_validators as u64 {
            return fail(format!(
                "initial_assignment sums to {assigned}, expected {}",
                self.n_validators
            ));
        }
        if let Some(WindowMode::Sliding { size: 0 }) = self.window {
            return fail("sliding window size must be positive".into());
        }
        Ok(())
    }

    pub fn effective_treasury(&self) -> u64 {
        self.treasury.unwrap_or_else(|| {
            (self.n_validators as u64)
                .saturating_mul(self.params.r_max)
                .saturating_mul(self.max_blocks)
        })
    }

    pub fn effective_window(&self) -> WindowMode {
        self.window.unwrap_or(WindowMode::Sliding {
            size: self.n_validators as u64,
        })
    }

    /// Copy of the config with all defaults resolved.
    pub fn resolved(&self) -> ScenarioConfig {
        let mut resolved = self.clone();
        resolved.treasury = Some(self.effective_treasury());
        resolved.window = Some(self.effective_window());
        resolved
    }

    /// Canonical JSON of the resolved config: sorted keys, no insignificant
    /// whitespace. This is the byte string run manifests hash.
    pub fn canonical_json(&self) -> String {
        serde_json::to_value(self.resolved())
            .expect("config serializes")
            .to_string()
    }

    /// 20 validators starting at 70% / 20% / 10%.
    pub fn supermajority_70_20_10() -> Self {
        Self::named_three_impl(20, [14, 4, 2])
    }

    /// 12 validators starting at 83% / 8.3% / 8.3%.
    pub fn supermajority_83_8_8() -> Self {
        Self::named_three_impl(12, [10, 1, 1])
    }

    fn named_three_impl(n_validators: u32, assignment: [u32; 3]) -> Self {
        let ids = ["A", "B", "C"];
        ScenarioConfig {
            n_validators,
            impls: ids
                .iter()
                .map(|id| ImplSpec {
                    id: id.to_string(),
                    code: format!("client{id}-v1"),
                })
                .collect(),
            initial_assignment: ids
                .iter()
                .zip(assignment)
                .map(|(id, count)| (id.to_string(), count))
                .collect(),
            params: RewardParams {
                epsilon: 1,
                r_min: 2,
                r_max: 10,
            },
            mechanism: ProofMechanism::Attested,
            treasury: None,
            max_blocks: 1300,
            seed: 42,
            deciders_per_block: 1,
            window: None,
            strategy: AgentStrategy::Rational,
            switch_cost: 0,
        }
    }
}

/// Per-block simulation output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesRow {
    pub block: u64,
    /// Validator counts per implementation, parallel to
    /// [`TimeSeries::impl_ids`].
    pub counts: Vec<u64>,
    pub rewards_paid: u64,
    pub cumulative_rewards: Vec<u64>,
    pub treasury: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeSeries {
    pub impl_ids: Vec<String>,
    pub rows: Vec<SeriesRow>,
}

impl TimeSeries {
    /// CSV with header `block,impl_<id>_count...,rewards_paid,treasury`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("block");
        for id in &self.impl_ids {
            out.push_str(",impl_");
            out.push_str(id);
            out.push_str("_count");
        }
        out.push_str(",rewards_paid,treasury\n");
        for row in &self.rows {
            out.push_str(&row.block.to_string());
            for count in &row.counts {
                out.push(',');
                out.push_str(&count.to_string());
            }
            out.push(',');
            out.push_str(&row.rewards_paid.to_string());
            out.push(',');
            out.push_str(&row.treasury.to_string());
            out.push('\n');
        }
        out
    }

    /// Canonical JSON document embedding the resolved config for provenance.
    pub fn to_json(&self, config: &ScenarioConfig) -> String {
        let doc = serde_json::json!({
            "config": serde_json::to_value(config.resolved()).expect("config serializes"),
            "series": serde_json::to_value(self).expect("series serializes"),
        });
        doc.to_string()
    }
}

/// A validator switching implementations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SwitchEvent {
    pub validator: usize,
    pub from: String,
    pub to: String,
}

/// One proof submission and its outcome.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubmissionRecord {
    pub validator: usize,
    pub impl_id: String,
    pub outcome: RewardOutcome,
}

/// Everything that happened in one simulated block.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockRecord {
    pub block: u64,
    /// Whether the distribution window held any submissions when the block
    /// started. False only before the first submissions land.
    pub window_populated: bool,
    pub switches: Vec<SwitchEvent>,
    pub submissions: Vec<SubmissionRecord>,
    pub row: SeriesRow,
}

/// Stepwise simulation driver. [`run`] is the one-shot convenience wrapper.
pub struct Simulation {
    config: ScenarioConfig,
    state: ContractState,
    agents: Vec<ValidatorAgent>,
    impl_ids: Vec<String>,
    decide_order: Vec<usize>,
    next_decider_slot: u64,
    cumulative_rewards: Vec<u64>,
}

impl Simulation {
    pub fn new(config: ScenarioConfig) -> Result<Self, ConfigError> {
        config.validate()?;
        let config = config.resolved();

        let segments: Vec<CodeSegment> = config
            .impls
            .iter()
            .map(|spec| CodeSegment::new(&spec.id, SIM_STEP_ID, spec.code.as_bytes().to_vec()))
            .collect::<Result<_, _>>()?;
        let registry = build_registry(&segments)?;
        let impl_ids = registry.impl_ids();

        let owner = NodeKey::from_label(format!("owner/{}", config.seed).as_bytes());
        let mut state = ContractState::new(
            owner.address(),
            registry,
            config.params,
            config.effective_window(),
            config.effective_treasury(),
        );

        let n = config.n_validators as usize;
        let keys: Vec<NodeKey> = (0..n)
            .map(|i| NodeKey::from_label(format!("validator/{}/{i}", config.seed).as_bytes()))
            .collect();
        for key in &keys {
            state.register_validator(key.address());
            state.trust_key(key.public_key());
        }

        // assign validators to implementations in sorted impl order
        let mut agents = Vec::with_capacity(n);
        let mut key_iter = keys.into_iter();
        for (impl_id, count) in &config.initial_assignment {
            for _ in 0..*count {
                agents.push(ValidatorAgent {
                    key: key_iter.next().expect("assignment sums to n_validators"),
                    current_impl: impl_id.clone(),
                    strategy: config.strategy,
                    switch_cost: config.switch_cost,
                });
            }
        }

        let mut decide_order: Vec<usize> = (0..n).collect();
        SimRng::new(config.seed).shuffle(&mut decide_order);

        let cumulative_rewards = vec![0; impl_ids.len()];
        Ok(Simulation {
            config,
            state,
            agents,
            impl_ids,
            decide_order,
            next_decider_slot: 0,
            cumulative_rewards,
        })
    }

    pub fn state(&self) -> &ContractState {
        &self.state
    }

    pub fn config(&self) -> &ScenarioConfig {
        &self.config
    }

    pub fn impl_ids(&self) -> &[String] {
        &self.impl_ids
    }

    fn impl_index(&self, impl_id: &str) -> usize {
        self.impl_ids
            .iter()
            .position(|id| id == impl_id)
            .expect("impl registered")
    }

    /// Advance the simulation by one block.
    pub fn step_block(&mut self) -> BlockRecord {
        let block = self.state.current_block();
        let window_populated = !self.state.window().is_empty();
        let n = self.agents.len();

        // staggered re-decisions, round-robin over the seeded permutation
        let mut switches = Vec::new();
        for j in 0..self.config.deciders_per_block as u64 {
            let slot = (self.next_decider_slot + j) % n as u64;
            let idx = self.decide_order[slot as usize];
            if self.agents[idx].strategy != AgentStrategy::Rational {
                continue;
            }
            let choice = agent_decide(&self.agents[idx], &self.state);
            if choice != self.agents[idx].current_impl {
                switches.push(SwitchEvent {
                    validator: idx,
                    from: self.agents[idx].current_impl.clone(),
                    to: choice.clone(),
                });
                self.agents[idx].current_impl = choice;
            }
        }
        self.next_decider_slot =
            (self.next_decider_slot + self.config.deciders_per_block as u64) % n as u64;

        // every validator proves and submits for its current implementation
        let mut submissions = Vec::with_capacity(n);
        let mut rewards_paid = 0u64;
        for (idx, agent) in self.agents.iter().enumerate() {
            let identity = self
                .state
                .registry()
                .get(&agent.current_impl, SIM_STEP_ID)
                .expect("agent impl registered")
                .clone();
            let proof = generate_proof(self.config.mechanism, &identity, block, &agent.key);
            let outcome = self.state.submit_proof(&proof);
            if outcome.accepted {
                rewards_paid += outcome.reward;
                let impl_idx = self.impl_index(&agent.current_impl);
                self.cumulative_rewards[impl_idx] += outcome.reward;
            }
            submissions.push(SubmissionRecord {
                validator: idx,
                impl_id: agent.current_impl.clone(),
                outcome,
            });
        }

        let mut counts = vec![0u64; self.impl_ids.len()];
        for agent in &self.agents {
            counts[self.impl_ids.iter().position(|id| *id == agent.current_impl).unwrap()] += 1;
        }
        let row = SeriesRow {
            block,
            counts,
            rewards_paid,
            cumulative_rewards: self.cumulative_rewards.clone(),
            treasury: self.state.treasury(),
        };

        self.state.advance_block();
        BlockRecord {
            block,
            window_populated,
            switches,
            submissions,
            row,
        }
    }

    /// Run all remaining blocks and collect the series.
    pub fn run_to_end(&mut self) -> TimeSeries {
        let mut rows = Vec::with_capacity(self.config.max_blocks as usize);
        while self.state.current_block() < self.config.max_blocks {
            rows.push(self.step_block().row);
        }
        TimeSeries {
            impl_ids: self.impl_ids.clone(),
            rows,
        }
    }
}

/// Run a scenario to completion.
pub fn run(config: &ScenarioConfig) -> Result<TimeSeries, ConfigError> {
    Ok(Simulation::new(config.clone())?.run_to_end())
}

/// First block index from which the count spread stays within `spread` for
/// `hold_blocks` further blocks, or `None`.
pub fn detect_convergence(series: &TimeSeries, spread: u64, hold_blocks: usize) -> Option<u64> {
    let within = |row: &SeriesRow| -> bool {
        let max = row.counts.iter().max().copied().unwrap_or(0);
        let min = row.counts.iter().min().copied().unwrap_or(0);
        max - min <= spread
    };
    let rows = &series.rows;
    'candidates: for start in 0..rows.len() {
        let end = match start.checked_add(hold_blocks) {
            Some(end) if end < rows.len() => end,
            _ => return None,
        };
        for row in &rows[start..=end] {
            if !within(row) {
                continue 'candidates;
            }
        }
        return Some(rows[start].block);
    }
    None
}
