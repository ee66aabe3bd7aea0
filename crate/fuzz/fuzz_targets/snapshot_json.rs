//! Parse arbitrary bytes as a contract state snapshot. Must never panic; a
//! snapshot that passes invariant checks must answer queries and round-trip
//! through the canonical form.

#![no_main]

use diversity_core::contract::ContractState;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(state) = ContractState::from_snapshot_json(data) {
        let _ = state.get_minority();
        let distribution = state.get_distribution();
        let total: f64 = distribution.values().sum();
        assert!(total == 0.0 || (total - 1.0).abs() < 1e-9);
        let canonical = state.to_snapshot_json();
        let reparsed = ContractState::from_snapshot_json(canonical.as_bytes())
            .expect("canonical form of a valid snapshot parses");
        assert_eq!(reparsed.to_snapshot_json(), canonical);
    }
});
