//! Parse arbitrary bytes as a scenario config. Must never panic; any config
//! that passes validation must have a canonical form that re-parses to the
//! same canonical bytes.

#![no_main]

use diversity_core::sim::ScenarioConfig;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(config) = ScenarioConfig::from_json_slice(data) {
        let canonical = config.canonical_json();
        let reparsed = ScenarioConfig::from_json_slice(canonical.as_bytes())
            .expect("canonical form of a valid config parses");
        assert_eq!(reparsed.canonical_json(), canonical);
    }
});
