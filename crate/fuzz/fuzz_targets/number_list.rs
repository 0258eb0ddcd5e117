//! Fuzz the number-list parser used for --data lists and input files.

#![no_main]

use libfuzzer_sys::fuzz_target;
use ordstat::numeric::parse_sequence;

fuzz_target!(|data: &str| {
    // Must never panic; accepted input yields a nonempty sequence with
    // distinct origin indices by construction.
    if let Ok(seq) = parse_sequence(data) {
        assert!(!seq.is_empty());
    }
});
