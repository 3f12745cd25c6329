//! Fuzzes the wire-protocol decoder: arbitrary bytes must either decode into
//! a message that survives an encode→decode round trip or return an error —
//! never panic.

#![no_main]

use libfuzzer_sys::fuzz_target;
use qmap_orchestrator::{decode_message, encode_message};

fuzz_target!(|data: &[u8]| {
    let Ok(line) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(message) = decode_message(line) {
        let rendered = encode_message(&message);
        let redecoded = decode_message(&rendered).expect("round trip decodes");
        assert_eq!(message, redecoded, "round trip changed the message");
    }
});
