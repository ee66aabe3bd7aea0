//! The diversity reward state machine.
//!
//! [`ContractState`] models the on-chain registry and treasury: it accepts
//! execution proofs from registered validators, tracks the implementation
//! distribution over a window of verified submissions, and pays a reward that
//! decreases linearly from `r_max` (share 0) to `r_min` (share `1/n`) and is a
//! constant `epsilon` above `1/n`.
//!
//! Submission rules, in check order:
//!
//! 1. the submitter must be a registered validator (`NotExpected`),
//! 2. at most one submission per validator per block (`Duplicate`),
//! 3. the proof must target the current block (`Stale`),
//! 4. the proof must verify against the registry and trusted keys
//!    (`VerifyFail`).
//!
//! The share used for the reward is taken *before* the submission is counted,
//! so the first proof for a freshly registered implementation earns exactly
//! `r_max`. Any rejected submission leaves the state bit-identical, with one
//! deliberate exception: a verified proof that cannot be paid
//! (`InsufficientTreasury`) is still counted in the window, because the
//! distribution information is valuable even when the reward is not.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::identity::{CodeIdentity, CommitmentRegistry, Digest, IdentityError};
use crate::proofs::{verify_proof, Address, ExecutionProof, TrustedKeys, VerifyError};

/// An exact fraction in `[0, 1]`, kept rational so reward arithmetic never
/// goes through floating point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Share {
    num: u64,
    den: u64,
}

impl Share {
    pub const ZERO: Share = Share { num: 0, den: 1 };

    /// Panics if `den == 0` or `num > den`.
    pub fn new(num: u64, den: u64) -> Self {
        assert!(den > 0, "share denominator must be positive");
        assert!(num <= den, "share must not exceed 1");
        Share { num, den }
    }

    pub fn num(&self) -> u64 {
        self.num
    }

    pub fn den(&self) -> u64 {
        self.den
    }

    pub fn as_f64(&self) -> f64 {
        self.num as f64 / self.den as f64
    }

    /// Numeric comparison across denominators.
    pub fn cmp_value(&self, other: &Share) -> std::cmp::Ordering {
        let lhs = self.num as u128 * other.den as u128;
        let rhs = other.num as u128 * self.den as u128;
        lhs.cmp(&rhs)
    }
}

/// Reward parameters: constant `epsilon` for majority shares, and the
/// `[r_min, r_max]` interpolation band for minority shares.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RewardParams {
    pub epsilon: u64,
    pub r_min: u64,
    pub r_max: u64,
}

impl RewardParams {
    pub fn new(epsilon: u64, r_min: u64, r_max: u64) -> Result<Self, ContractError> {
        let params = RewardParams {
            epsilon,
            r_min,
            r_max,
        };
        if params.is_valid() {
            Ok(params)
        } else {
            Err(ContractError::InvalidParams)
        }
    }

    /// `r_max >= r_min > epsilon >= 0`.
    pub fn is_valid(&self) -> bool {
        self.r_max >= self.r_min && self.r_min > self.epsilon
    }
}

fn round_half_up(num: u128, den: u128) -> u128 {
    (2 * num + den) / (2 * den)
}

/// The piecewise reward for an implementation holding `share` of the
/// distribution among `n_impls` registered implementations.
///
/// Above `1/n_impls` the reward is `epsilon`. At or below it, the reward
/// interpolates linearly from `r_max` (share 0) to `r_min` (share exactly
/// `1/n_impls`), rounding half-up to integral units.
pub fn reward(share: Share, n_impls: u64, params: &RewardParams) -> u64 {
    assert!(n_impls >= 1, "reward requires at least one implementation");
    let scaled = share.num as u128 * n_impls as u128;
    if scaled > share.den as u128 {
        return params.epsilon;
    }
    let delta = (params.r_max - params.r_min) as u128;
    let interpolated = round_half_up(scaled * delta, share.den as u128);
    params.r_max - interpolated as u64
}

/// How the distribution window forgets old submissions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "mode")]
pub enum WindowMode {
    /// Counters only ever increment.
    Cumulative,
    /// Only the most recent `size` submissions are counted.
    Sliding { size: u64 },
}

/// Verified-submission counters, optionally bounded to the last `W`
/// submissions.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DistributionWindow {
    mode: WindowMode,
    counts: BTreeMap<Digest, u64>,
    recent: VecDeque<(u64, Digest)>,
}

impl DistributionWindow {
    pub fn new(mode: WindowMode) -> Self {
        DistributionWindow {
            mode,
            counts: BTreeMap::new(),
            recent: VecDeque::new(),
        }
    }

    pub fn mode(&self) -> WindowMode {
        self.mode
    }

    fn record(&mut self, block: u64, digest: Digest) {
        *self.counts.entry(digest).or_insert(0) += 1;
        if let WindowMode::Sliding { size } = self.mode {
            self.recent.push_back((block, digest));
            while self.recent.len() as u64 > size {
                let (_, evicted) = self.recent.pop_front().expect("recent non-empty");
                let count = self.counts.get_mut(&evicted).expect("evicted digest counted");
                *count -= 1;
                if *count == 0 {
                    self.counts.remove(&evicted);
                }
            }
        }
    }

    fn purge(&mut self, digest: &Digest) {
        self.counts.remove(digest);
        self.recent.retain(|(_, d)| d != digest);
    }

    pub fn total(&self) -> u64 {
        self.counts.values().sum()
    }

    pub fn counts(&self) -> &BTreeMap<Digest, u64> {
        &self.counts
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    fn is_consistent(&self) -> bool {
        match self.mode {
            WindowMode::Cumulative => self.recent.is_empty(),
            WindowMode::Sliding { size } => {
                if self.recent.len() as u64 > size {
                    return false;
                }
                let mut histogram: BTreeMap<Digest, u64> = BTreeMap::new();
                for (_, digest) in &self.recent {
                    *histogram.entry(*digest).or_insert(0) += 1;
                }
                histogram == self.counts
            }
        }
    }
}

/// Why a submission was accepted or rejected.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SubmitReason {
    Ok,
    NotExpected,
    Duplicate,
    Stale,
    VerifyFail(VerifyError),
    InsufficientTreasury,
}

/// Result of one `submit_proof` call.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RewardOutcome {
    pub accepted: bool,
    pub reward: u64,
    /// Implementation share seen by the reward function, i.e. before this
    /// submission was counted. Zero for rejected submissions.
    pub share_at_submission: Share,
    pub reason: SubmitReason,
}

impl RewardOutcome {
    fn rejected(reason: SubmitReason) -> Self {
        RewardOutcome {
            accepted: false,
            reward: 0,
            share_at_submission: Share::ZERO,
            reason,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ContractError {
    #[error("caller is not the contract owner")]
    NotOwner,
    #[error("reward parameters must satisfy r_max >= r_min > epsilon")]
    InvalidParams,
    #[error("commitment digest is not registered")]
    UnknownCommitment,
    #[error(transparent)]
    Registry(#[from] IdentityError),
}

#[derive(Debug, Error)]
pub enum SnapshotError {
    #[error("snapshot is not valid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("snapshot violates a state invariant: {0}")]
    Invalid(String),
}

/// Full protocol state. Single-writer: every mutating operation takes
/// `&mut self`; reads may be shared freely between mutations.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContractState {
    owner: Address,
    registry: CommitmentRegistry,
    params: RewardParams,
    window: DistributionWindow,
    treasury: u64,
    validators: BTreeSet<Address>,
    trusted_keys: TrustedKeys,
    current_block: u64,
    submitted_this_block: BTreeSet<Address>,
}

impl ContractState {
    pub fn new(
        owner: Address,
        registry: CommitmentRegistry,
        params: RewardParams,
        window_mode: WindowMode,
        treasury: u64,
    ) -> Self {
        ContractState {
            owner,
            registry,
            params,
            window: DistributionWindow::new(window_mode),
            treasury,
            validators: BTreeSet::new(),
            trusted_keys: TrustedKeys::new(),
            current_block: 0,
            submitted_this_block: BTreeSet::new(),
        }
    }

    pub fn owner(&self) -> Address {
        self.owner
    }

    pub fn registry(&self) -> &CommitmentRegistry {
        &self.registry
    }

    pub fn params(&self) -> &RewardParams {
        &self.params
    }

    pub fn window(&self) -> &DistributionWindow {
        &self.window
    }

    pub fn treasury(&self) -> u64 {
        self.treasury
    }

    pub fn current_block(&self) -> u64 {
        self.current_block
    }

    pub fn validators(&self) -> &BTreeSet<Address> {
        &self.validators
    }

    pub fn trusted_keys(&self) -> &TrustedKeys {
        &self.trusted_keys
    }

    pub fn register_validator(&mut self, addr: Address) {
        self.validators.insert(addr);
    }

    pub fn trust_key(&mut self, key: &ed25519_dalek::VerifyingKey) {
        self.trusted_keys.insert(key);
    }

    /// Window counts aggregated per implementation. Every registered
    /// implementation appears, with zero when it has no tracked submissions.
    pub fn counts_by_impl(&self) -> BTreeMap<String, u64> {
        let mut counts: BTreeMap<String, u64> = self
            .registry
            .impl_ids()
            .into_iter()
            .map(|id| (id, 0))
            .collect();
        for (digest, count) in self.window.counts() {
            if let Some(impl_id) = self.registry.impl_of(digest) {
                *counts.get_mut(impl_id).expect("impl listed") += count;
            }
        }
        counts
    }

    fn share_of_impl(&self, impl_id: &str) -> Share {
        let counts = self.counts_by_impl();
        let total: u64 = counts.values().sum();
        if total == 0 {
            return Share::ZERO;
        }
        Share::new(counts.get(impl_id).copied().unwrap_or(0), total)
    }

    /// Apply one proof submission.
    pub fn submit_proof(&mut self, proof: &ExecutionProof) -> RewardOutcome {
        if !self.validators.contains(&proof.submitter) {
            return RewardOutcome::rejected(SubmitReason::NotExpected);
        }
        if self.submitted_this_block.contains(&proof.submitter) {
            return RewardOutcome::rejected(SubmitReason::Duplicate);
        }
        if proof.block_number != self.current_block {
            return RewardOutcome::rejected(SubmitReason::Stale);
        }
        if let Err(err) = verify_proof(&self.registry, &self.trusted_keys, proof) {
            return RewardOutcome::rejected(SubmitReason::VerifyFail(err));
        }
        let impl_id = self
            .registry
            .impl_of(&proof.commitment_digest)
            .expect("verified digest is registered")
            .to_string();
        let share = self.share_of_impl(&impl_id);
        let amount = reward(share, self.registry.impl_count() as u64, &self.params);

        self.window.record(self.current_block, proof.commitment_digest);
        self.submitted_this_block.insert(proof.submitter);

        if amount > self.treasury {
            return RewardOutcome {
                accepted: false,
                reward: 0,
                share_at_submission: share,
                reason: SubmitReason::InsufficientTreasury,
            };
        }
        self.treasury -= amount;
        RewardOutcome {
            accepted: true,
            reward: amount,
            share_at_submission: share,
            reason: SubmitReason::Ok,
        }
    }

    /// Implementation with the minimal window count; ties go to the
    /// lexicographically smallest id.
    pub fn get_minority(&self) -> String {
        self.counts_by_impl()
            .into_iter()
            .min_by_key(|(id, count)| (*count, id.clone()))
            .map(|(id, _)| id)
            .expect("registry is never empty")
    }

    /// Current shares per implementation. All zeros when the window is empty,
    /// otherwise the shares sum to 1.
    pub fn get_distribution(&self) -> BTreeMap<String, f64> {
        let counts = self.counts_by_impl();
        let total: u64 = counts.values().sum();
        counts
            .into_iter()
            .map(|(id, count)| {
                let share = if total == 0 {
                    0.0
                } else {
                    count as f64 / total as f64
                };
                (id, share)
            })
            .collect()
    }

    /// Move to the next block: clears the per-block submission set.
    pub fn advance_block(&mut self) {
        self.current_block += 1;
        self.submitted_this_block.clear();
    }

    pub fn owner_set_params(
        &mut self,
        caller: Address,
        new: RewardParams,
    ) -> Result<(), ContractError> {
        if caller != self.owner {
            return Err(ContractError::NotOwner);
        }
        if !new.is_valid() {
            return Err(ContractError::InvalidParams);
        }
        self.params = new;
        Ok(())
    }

    pub fn owner_add_version(
        &mut self,
        caller: Address,
        identity: CodeIdentity,
    ) -> Result<(), ContractError> {
        if caller != self.owner {
            return Err(ContractError::NotOwner);
        }
        self.registry = self.registry.with_added(identity)?;
        Ok(())
    }

    /// Remove an approved version and purge its window entries. The registry
    /// must stay non-empty.
    pub fn owner_remove_version(
        &mut self,
        caller: Address,
        digest: &Digest,
    ) -> Result<(), ContractError> {
        if caller != self.owner {
            return Err(ContractError::NotOwner);
        }
        if !self.registry.contains_digest(digest) {
            return Err(ContractError::UnknownCommitment);
        }
        self.registry = self.registry.with_removed(digest)?;
        self.window.purge(digest);
        Ok(())
    }

    /// Canonical JSON snapshot: keys sorted at every level, no insignificant
    /// whitespace. Byte-identical snapshots mean identical states.
    pub fn to_snapshot_json(&self) -> String {
        serde_json::to_value(self)
            .expect("contract state serializes")
            .to_string()
    }

    pub fn from_snapshot_json(bytes: &[u8]) -> Result<Self, SnapshotError> {
        let state: ContractState = serde_json::from_slice(bytes)?;
        state.check_invariants().map_err(SnapshotError::Invalid)?;
        Ok(state)
    }

    fn check_invariants(&self) -> Result<(), String> {
        if !self.params.is_valid() {
            return Err("reward parameters violate r_max >= r_min > epsilon".into());
        }
        if !self.window.is_consistent() {
            return Err("window counters do not match the recent-submission log".into());
        }
        let mut total: u64 = 0;
        for (digest, count) in self.window.counts() {
            if !self.registry.contains_digest(digest) {
                return Err(format!("window counts unregistered digest {digest}"));
            }
            total = total
                .checked_add(*count)
                .ok_or("window counts overflow a u64 total")?;
        }
        if !self.submitted_this_block.is_subset(&self.validators) {
            return Err("submitted_this_block contains a non-validator".into());
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::identity::{build_registry, CodeSegment};
    use crate::proofs::{generate_proof, NodeKey, ProofMechanism};

    fn params() -> RewardParams {
        RewardParams::new(1, 2, 10).unwrap()
    }

    fn registry_abc() -> CommitmentRegistry {
        build_registry(&[
            CodeSegment::new("A", "attest", b"clientA-v1".to_vec()).unwrap(),
            CodeSegment::new("B", "attest", b"clientB-v1".to_vec()).unwrap(),
            CodeSegment::new("C", "attest", b"clientC-v1".to_vec()).unwrap(),
        ])
        .unwrap()
    }

    fn owner() -> Address {
        NodeKey::from_label(b"owner").address()
    }

    /// State with three impls, `n` registered validators, succinct proofs.
    fn state_with_validators(n: usize, treasury: u64) -> (ContractState, Vec<NodeKey>) {
        let mut state = ContractState::new(
            owner(),
            registry_abc(),
            params(),
            WindowMode::Sliding { size: n as u64 },
            treasury,
        );
        let keys: Vec<NodeKey> = (0..n)
            .map(|i| NodeKey::from_label(format!("validator-{i}").as_bytes()))
            .collect();
        for key in &keys {
            state.register_validator(key.address());
            state.trust_key(key.public_key());
        }
        (state, keys)
    }

    fn proof_for(state: &ContractState, impl_id: &str, key: &NodeKey) -> ExecutionProof {
        let identity = state.registry().get(impl_id, "attest").unwrap().clone();
        generate_proof(
            ProofMechanism::Succinct,
            &identity,
            state.current_block(),
            key,
        )
    }

    #[test]
    fn reward_figure_endpoints() {
        let p = params();
        assert_eq!(reward(Share::new(0, 1), 3, &p), 10);
        assert_eq!(reward(Share::new(1, 3), 3, &p), 2);
        // hand-evaluated: r_max - 0.5 * (r_max - r_min) = 10 - 4 = 6
        assert_eq!(reward(Share::new(1, 6), 3, &p), 6);
        // majority region
        assert_eq!(reward(Share::new(1, 2), 3, &p), 1);
        // hand-evaluated: 10 - (1/12 * 3) * 8 = 10 - 2 = 8
        assert_eq!(reward(Share::new(1, 12), 3, &p), 8);
    }

    #[test]
    fn reward_rounds_half_up() {
        // t = 1/16 * 3 = 3/16, t * 8 = 1.5 -> 2
        assert_eq!(reward(Share::new(1, 16), 3, &params()), 8);
    }

    #[test]
    fn params_ordering_enforced() {
        assert!(RewardParams::new(1, 2, 10).is_ok());
        // r_min must exceed epsilon
        assert_eq!(
            RewardParams::new(1, 1, 10).unwrap_err(),
            ContractError::InvalidParams
        );
        // r_max must be at least r_min
        assert_eq!(
            RewardParams::new(0, 5, 4).unwrap_err(),
            ContractError::InvalidParams
        );
    }

    #[test]
    fn first_submission_of_new_impl_earns_r_max() {
        let (mut state, keys) = state_with_validators(3, 1_000);
        let outcome = state.submit_proof(&proof_for(&state, "C", &keys[0]));
        assert_eq!(outcome.reason, SubmitReason::Ok);
        assert_eq!(outcome.share_at_submission, Share::ZERO);
        assert_eq!(outcome.reward, 10);
        assert_eq!(state.treasury(), 990);
    }

    #[test]
    fn minority_share_one_twelfth_earns_eight() {
        let (mut state, keys) = state_with_validators(12, 10_000);
        // fill the window: 11 x A, 1 x C
        let a = state.registry().get("A", "attest").unwrap().digest;
        let c = state.registry().get("C", "attest").unwrap().digest;
        for _ in 0..11 {
            state.window.record(0, a);
        }
        state.window.record(0, c);
        let outcome = state.submit_proof(&proof_for(&state, "C", &keys[0]));
        assert_eq!(outcome.reason, SubmitReason::Ok);
        assert_eq!(outcome.share_at_submission, Share::new(1, 12));
        assert_eq!(outcome.reward, 8);
    }

    #[test]
    fn duplicate_submission_in_same_block_rejected() {
        let (mut state, keys) = state_with_validators(3, 1_000);
        assert!(state.submit_proof(&proof_for(&state, "A", &keys[0])).accepted);
        let before = state.to_snapshot_json();
        let outcome = state.submit_proof(&proof_for(&state, "B", &keys[0]));
        assert_eq!(outcome.reason, SubmitReason::Duplicate);
        assert_eq!(outcome.reward, 0);
        assert_eq!(state.to_snapshot_json(), before);
    }

    #[test]
    fn duplicate_clears_after_advance() {
        let (mut state, keys) = state_with_validators(3, 1_000);
        assert!(state.submit_proof(&proof_for(&state, "A", &keys[0])).accepted);
        state.advance_block();
        assert!(state.submit_proof(&proof_for(&state, "A", &keys[0])).accepted);
    }

    #[test]
    fn unregistered_submitter_not_expected() {
        let (mut state, _) = state_with_validators(3, 1_000);
        let stranger = NodeKey::from_label(b"stranger");
        let before = state.to_snapshot_json();
        let outcome = state.submit_proof(&proof_for(&state, "A", &stranger));
        assert_eq!(outcome.reason, SubmitReason::NotExpected);
        assert_eq!(outcome.reward, 0);
        assert_eq!(state.to_snapshot_json(), before);
    }

    #[test]
    fn wrong_block_is_stale() {
        let (mut state, keys) = state_with_validators(3, 1_000);
        let proof = proof_for(&state, "A", &keys[0]);
        state.advance_block();
        let before = state.to_snapshot_json();
        let outcome = state.submit_proof(&proof);
        assert_eq!(outcome.reason, SubmitReason::Stale);
        assert_eq!(state.to_snapshot_json(), before);
    }

    #[test]
    fn corrupt_binding_is_verify_fail() {
        let (mut state, keys) = state_with_validators(3, 1_000);
        let mut proof = proof_for(&state, "A", &keys[0]);
        proof.binding[0] ^= 0xff;
        let before = state.to_snapshot_json();
        let outcome = state.submit_proof(&proof);
        assert_eq!(
            outcome.reason,
            SubmitReason::VerifyFail(VerifyError::InvalidBinding)
        );
        assert_eq!(state.to_snapshot_json(), before);
    }

    #[test]
    fn insufficient_treasury_records_but_does_not_pay() {
        let (mut state, keys) = state_with_validators(3, 5);
        // first submission would earn r_max = 10 > treasury 5
        let outcome = state.submit_proof(&proof_for(&state, "A", &keys[0]));
        assert_eq!(outcome.reason, SubmitReason::InsufficientTreasury);
        assert!(!outcome.accepted);
        assert_eq!(outcome.reward, 0);
        assert_eq!(state.treasury(), 5);
        // the submission is still counted and the validator is marked
        assert_eq!(state.counts_by_impl()["A"], 1);
        let outcome = state.submit_proof(&proof_for(&state, "B", &keys[0]));
        assert_eq!(outcome.reason, SubmitReason::Duplicate);
    }

    #[test]
    fn minority_query_and_ties() {
        let (mut state, _) = state_with_validators(12, 1_000);
        // empty window: all counts zero, tie broken lexicographically
        assert_eq!(state.get_minority(), "A");
        let a = state.registry().get("A", "attest").unwrap().digest;
        let b = state.registry().get("B", "attest").unwrap().digest;
        let c = state.registry().get("C", "attest").unwrap().digest;
        for _ in 0..7 {
            state.window.record(0, a);
        }
        for _ in 0..2 {
            state.window.record(0, b);
        }
        state.window.record(0, c);
        assert_eq!(state.counts_by_impl()["C"], 1);
        assert_eq!(state.get_minority(), "C");
    }

    #[test]
    fn distribution_shares() {
        let (mut state, _) = state_with_validators(12, 1_000);
        assert_eq!(
            state.get_distribution(),
            BTreeMap::from([
                ("A".to_string(), 0.0),
                ("B".to_string(), 0.0),
                ("C".to_string(), 0.0)
            ])
        );
        let a = state.registry().get("A", "attest").unwrap().digest;
        let b = state.registry().get("B", "attest").unwrap().digest;
        let c = state.registry().get("C", "attest").unwrap().digest;
        for _ in 0..6 {
            state.window.record(0, a);
        }
        for _ in 0..3 {
            state.window.record(0, b);
        }
        for _ in 0..3 {
            state.window.record(0, c);
        }
        let dist = state.get_distribution();
        assert_eq!(dist["A"], 0.5);
        assert_eq!(dist["B"], 0.25);
        assert_eq!(dist["C"], 0.25);
        assert!((dist.values().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn single_impl_owns_the_distribution() {
        let registry = build_registry(&[
            CodeSegment::new("A", "attest", b"only-impl".to_vec()).unwrap(),
        ])
        .unwrap();
        let mut state = ContractState::new(
            owner(),
            registry,
            params(),
            WindowMode::Sliding { size: 12 },
            1_000,
        );
        assert_eq!(state.get_minority(), "A");
        let digest = state.registry().get("A", "attest").unwrap().digest;
        for _ in 0..12 {
            state.window.record(0, digest);
        }
        assert_eq!(state.get_distribution(), BTreeMap::from([("A".to_string(), 1.0)]));
        assert_eq!(state.get_minority(), "A");
    }

    #[test]
    fn sliding_window_evicts_oldest() {
        let mut window = DistributionWindow::new(WindowMode::Sliding { size: 12 });
        let first = crate::identity::sha256(b"first");
        let rest = crate::identity::sha256(b"rest");
        window.record(0, first);
        for i in 1..13 {
            window.record(i, rest);
        }
        assert_eq!(window.total(), 12);
        assert_eq!(window.counts().get(&first), None);
        assert_eq!(window.counts()[&rest], 12);
        assert!(window.is_consistent());
    }

    #[test]
    fn cumulative_window_never_evicts() {
        let mut window = DistributionWindow::new(WindowMode::Cumulative);
        let d = crate::identity::sha256(b"d");
        for i in 0..100 {
            window.record(i, d);
        }
        assert_eq!(window.total(), 100);
        assert!(window.is_consistent());
    }

    #[test]
    fn owner_guards() {
        let (mut state, keys) = state_with_validators(3, 1_000);
        let new_params = RewardParams::new(2, 4, 20).unwrap();
        assert_eq!(
            state.owner_set_params(keys[0].address(), new_params),
            Err(ContractError::NotOwner)
        );
        assert_eq!(*state.params(), params());
        state.owner_set_params(owner(), new_params).unwrap();
        assert_eq!(*state.params(), new_params);
        // invalid ordering rejected even for the owner
        assert_eq!(
            state.owner_set_params(
                owner(),
                RewardParams {
                    epsilon: 5,
                    r_min: 5,
                    r_max: 10
                }
            ),
            Err(ContractError::InvalidParams)
        );
    }

    #[test]
    fn version_management_purges_window() {
        let (mut state, keys) = state_with_validators(3, 1_000);
        assert!(state.submit_proof(&proof_for(&state, "C", &keys[0])).accepted);
        assert_eq!(state.counts_by_impl()["C"], 1);
        let c_digest = state.registry().get("C", "attest").unwrap().digest;
        state.owner_remove_version(owner(), &c_digest).unwrap();
        assert_eq!(state.registry().impl_count(), 2);
        assert!(!state.counts_by_impl().contains_key("C"));
        assert_eq!(state.window().total(), 0);

        // adding it back works, and non-owners cannot manage versions
        let identity = CodeIdentity {
            impl_id: "C".into(),
            step_id: "attest".into(),
            digest: c_digest,
        };
        assert_eq!(
            state.owner_add_version(keys[0].address(), identity.clone()),
            Err(ContractError::NotOwner)
        );
        state.owner_add_version(owner(), identity).unwrap();
        assert_eq!(state.registry().impl_count(), 3);
    }

    #[test]
    fn removing_unknown_digest_fails() {
        let (mut state, _) = state_with_validators(3, 1_000);
        let unknown = crate::identity::sha256(b"nope");
        assert_eq!(
            state.owner_remove_version(owner(), &unknown),
            Err(ContractError::UnknownCommitment)
        );
    }

    #[test]
    fn snapshot_round_trip_and_validation() {
        let (mut state, keys) = state_with_validators(3, 1_000);
        state.submit_proof(&proof_for(&state, "A", &keys[0]));
        state.advance_block();
        state.submit_proof(&proof_for(&state, "B", &keys[1]));

        let json = state.to_snapshot_json();
        let restored = ContractState::from_snapshot_json(json.as_bytes()).unwrap();
        assert_eq!(restored, state);
        assert_eq!(restored.to_snapshot_json(), json);

        // canonical form: sorted keys, no whitespace
        assert!(!json.contains(' '));
        let top: Vec<&str> = json
            .split('"')
            .collect();
        assert!(top.len() > 2);
    }

    // Frozen canonical snapshot of a two-impl state after one paid
    // submission. Catches any drift in field layout, key ordering, or hex
    // encodings.
    const GOLDEN_SNAPSHOT: &str = "{\"current_block\":1,\"owner\":\"1653d14cb7af4fb59939ce0ed46b5dea98e18258\",\"params\":{\"epsilon\":1,\"r_max\":10,\"r_min\":2},\"registry\":[{\"digest\":\"b1a971878c9172a7e9a749f4be8c189c662dafcd6a31b506362feff82216b2f8\",\"impl_id\":\"A\",\"step_id\":\"attest\"},{\"digest\":\"34f9b2bb8e96a07182e70b6b19e3005f39b2510d653d1666413cfd33cd41903d\",\"impl_id\":\"B\",\"step_id\":\"attest\"}],\"submitted_this_block\":[],\"treasury\":90,\"trusted_keys\":[\"a8c96ad9aab48f4bf0b68836e04089f328b885197acbcf839ce3a9c05db9ec16\"],\"validators\":[\"683cc4f41ae86e5e670f30cee2676c867b268ee0\"],\"window\":{\"counts\":{\"34f9b2bb8e96a07182e70b6b19e3005f39b2510d653d1666413cfd33cd41903d\":1},\"mode\":{\"mode\":\"sliding\",\"size\":2},\"recent\":[[0,\"34f9b2bb8e96a07182e70b6b19e3005f39b2510d653d1666413cfd33cd41903d\"]]}}";

    #[test]
    fn snapshot_golden() {
        let registry = build_registry(&[
            CodeSegment::new("A", "attest", b"clientA-v1".to_vec()).unwrap(),
            CodeSegment::new("B", "attest", b"clientB-v1".to_vec()).unwrap(),
        ])
        .unwrap();
        let owner = NodeKey::from_label(b"golden-owner");
        let mut state = ContractState::new(
            owner.address(),
            registry,
            params(),
            WindowMode::Sliding { size: 2 },
            100,
        );
        let validator = NodeKey::from_label(b"golden-validator");
        state.register_validator(validator.address());
        state.trust_key(validator.public_key());
        let identity = state.registry().get("B", "attest").unwrap().clone();
        let proof = generate_proof(ProofMechanism::Attested, &identity, 0, &validator);
        let outcome = state.submit_proof(&proof);
        assert!(outcome.accepted);
        assert_eq!(outcome.reward, 10);
        state.advance_block();

        assert_eq!(state.to_snapshot_json(), GOLDEN_SNAPSHOT);
        let restored = ContractState::from_snapshot_json(GOLDEN_SNAPSHOT.as_bytes()).unwrap();
        assert_eq!(restored, state);
    }

    #[test]
    fn snapshot_rejects_corrupt_window() {
        let (state, _) = state_with_validators(3, 1_000);
        let mut value: serde_json::Value =
            serde_json::from_str(&state.to_snapshot_json()).unwrap();
        value["window"]["counts"]["0000000000000000000000000000000000000000000000000000000000000000"] =
            serde_json::json!(3);
        let bytes = value.to_string();
        let err = ContractState::from_snapshot_json(bytes.as_bytes()).unwrap_err();
        assert!(matches!(err, SnapshotError::Invalid(_)));
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        fn arb_params() -> impl Strategy<Value = RewardParams> {
            (0u64..100, 1u64..1_000, 0u64..1_000).prop_map(|(epsilon, above_eps, extra)| {
                let r_min = epsilon + above_eps;
                RewardParams {
                    epsilon,
                    r_min,
                    r_max: r_min + extra,
                }
            })
        }

        fn arb_share() -> impl Strategy<Value = Share> {
            (1u64..10_000).prop_flat_map(|den| (0..=den, Just(den)))
                .prop_map(|(num, den)| Share::new(num, den))
        }

        proptest! {
            // the reward curve is monotone non-increasing and stays within
            // [epsilon, r_max], with exact endpoint values
            #[test]
            fn reward_curve_shape(params in arb_params(), n in 1u64..8, mut shares in proptest::collection::vec(arb_share(), 2..40)) {
                shares.sort_by(|a, b| a.cmp_value(b));
                let rewards: Vec<u64> = shares.iter().map(|s| reward(*s, n, &params)).collect();
                for pair in rewards.windows(2) {
                    prop_assert!(pair[0] >= pair[1]);
                }
                for r in &rewards {
                    prop_assert!(*r >= params.epsilon && *r <= params.r_max);
                }
                prop_assert_eq!(reward(Share::new(0, 1), n, &params), params.r_max);
                prop_assert_eq!(reward(Share::new(1, n), n, &params), params.r_min);
                prop_assert_eq!(reward(Share::new(1, 1), n.max(2), &params), params.epsilon);
            }

            // scaling all three parameters by a positive constant never
            // changes which implementation the reward favors
            #[test]
            fn argmax_scale_invariance(
                params in arb_params(),
                k in 1u64..50,
                counts in proptest::collection::vec(0u64..40, 2..5),
            ) {
                let total: u64 = counts.iter().sum();
                prop_assume!(total > 0);
                let scaled = RewardParams {
                    epsilon: params.epsilon * k,
                    r_min: params.r_min * k,
                    r_max: params.r_max * k,
                };
                let n = counts.len() as u64;
                let ids: Vec<String> = (0..counts.len()).map(|i| format!("impl{i}")).collect();
                let winner = |p: &RewardParams| {
                    let mut best: Option<(u64, Share, &str)> = None;
                    for (id, count) in ids.iter().zip(&counts) {
                        let share = Share::new(*count, total);
                        let r = reward(share, n, p);
                        let better = match &best {
                            None => true,
                            Some((br, bs, bid)) => {
                                r > *br
                                    || (r == *br && share.cmp_value(bs).is_lt())
                                    || (r == *br
                                        && share.cmp_value(bs).is_eq()
                                        && id.as_str() < *bid)
                            }
                        };
                        if better {
                            best = Some((r, share, id));
                        }
                    }
                    best.unwrap().2.to_string()
                };
                prop_assert_eq!(winner(&params), winner(&scaled));
            }

            // sliding windows never hold more than W submissions and the
            // counters always match the submission log
            #[test]
            fn window_soundness(
                size in 1u64..20,
                submissions in proptest::collection::vec(0usize..4, 0..100),
            ) {
                let digests: Vec<Digest> = (0..4)
                    .map(|i| crate::identity::sha256(format!("impl-{i}").as_bytes()))
                    .collect();
                let mut window = DistributionWindow::new(WindowMode::Sliding { size });
                for (block, choice) in submissions.iter().enumerate() {
                    window.record(block as u64, digests[*choice]);
                    prop_assert!(window.total() <= size);
                    prop_assert!(window.is_consistent());
                }
            }

            // treasury is conserved: what left the treasury equals the sum of
            // paid rewards
            #[test]
            fn treasury_conservation(plan in proptest::collection::vec((0usize..6, 0usize..3), 1..60)) {
                let (mut state, keys) = state_with_validators(6, 2_000);
                let initial = state.treasury();
                let mut paid = 0u64;
                let impls = ["A", "B", "C"];
                for (validator, impl_idx) in plan {
                    let proof = proof_for(&state, impls[impl_idx], &keys[validator]);
                    let outcome = state.submit_proof(&proof);
                    if outcome.accepted {
                        paid += outcome.reward;
                    }
                    if validator == 5 {
                        state.advance_block();
                    }
                }
                prop_assert_eq!(initial - state.treasury(), paid);
            }
        }
    }
}
