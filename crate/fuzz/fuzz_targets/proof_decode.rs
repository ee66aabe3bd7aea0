//! Decode arbitrary bytes as a canonical proof encoding. Must never panic;
//! a successful decode must re-encode to the identical bytes.

#![no_main]

use diversity_core::proofs::ExecutionProof;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(proof) = ExecutionProof::decode(data) {
        assert_eq!(proof.encode(), data);
    }
});
