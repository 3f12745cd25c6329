//! Fuzzes the scenario file parser: arbitrary bytes must either parse into a
//! scenario that survives a serialize→parse round trip or return an error —
//! never panic.

#![no_main]

use libfuzzer_sys::fuzz_target;
use qmap_core::model::{parse_scenario_str, scenario_to_string};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(scenario) = parse_scenario_str(text) {
        let rendered = scenario_to_string(&scenario);
        let reparsed = parse_scenario_str(&rendered).expect("round trip parses");
        assert_eq!(scenario, reparsed, "round trip changed the scenario");
    }
});
