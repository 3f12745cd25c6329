//! Fuzzes the name=value parameter-list parser: arbitrary bytes must either
//! parse into a map that survives a render→parse round trip or return an
//! error — never panic.

#![no_main]

use libfuzzer_sys::fuzz_target;
use qmap_core::solver::parse_named_values;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(values) = parse_named_values(text) {
        let rendered = values
            .iter()
            .map(|(k, v)| format!("{k}={v}"))
            .collect::<Vec<_>>()
            .join(" ");
        let reparsed = parse_named_values(&rendered).expect("round trip parses");
        assert_eq!(values, reparsed, "round trip changed the values");
    }
});
