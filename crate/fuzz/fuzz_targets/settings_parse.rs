//! Fuzzes the tuner settings parser: arbitrary bytes must either parse into
//! settings that survive a serialize→parse round trip or return an error —
//! never panic.

#![no_main]

use libfuzzer_sys::fuzz_target;
use qmap_tuner::{parse_settings_str, settings_to_string};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(settings) = parse_settings_str(text) {
        let rendered = settings_to_string(&settings).expect("parsed settings serialize");
        let reparsed = parse_settings_str(&rendered).expect("round trip parses");
        assert_eq!(settings, reparsed, "round trip changed the settings");
    }
});
