//! Verifiable client diversity: commitments, execution proofs, the diversity
//! reward protocol, and an agent-based simulator for its convergence
//! dynamics.
//!
//! * [`identity`] computes SHA-256 code-identity commitments and the registry
//!   of approved implementations.
//! * [`proofs`] generates and verifies simulated proofs of execution
//!   (succinct-style hash bindings and attested-style signatures), each
//!   carrying its measured latency/resource/gas cost model.
//! * [`contract`] is the reward state machine: proof submission, distribution
//!   tracking, the piecewise-linear minority reward, and treasury accounting.
//! * [`sim`] runs rational validators against the contract block by block.
//! * [`analysis`] covers the failure models (mass-slashing, corrupted
//!   supermajority state) and the feasibility / break-even economics.

pub mod analysis;
pub mod contract;
pub mod identity;
pub mod proofs;
pub mod sim;

pub use analysis::{break_even_reward, classify, proving_feasible, slash_impact, ClientClass};
pub use contract::{reward, ContractState, RewardOutcome, RewardParams, Share, WindowMode};
pub use identity::{
    build_registry, compute_commitment, CodeIdentity, CodeSegment, CommitmentRegistry, Digest,
};
pub use proofs::{
    default_cost_model, generate_proof, verify_proof, Address, CostModel, ExecutionProof, NodeKey,
    ProofMechanism, TrustedKeys,
};
pub use sim::{agent_decide, detect_convergence, run, ScenarioConfig, Simulation, TimeSeries};
