//! Parse arbitrary text as an `analyze slash --counts` spec. Must never
//! panic.

#![no_main]

use diversity_cli::parse_counts;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        let _ = parse_counts(text);
    }
});
