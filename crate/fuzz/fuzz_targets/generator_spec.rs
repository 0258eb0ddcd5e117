//! Fuzz the generator-spec string parser and the generators behind it.

#![no_main]

use libfuzzer_sys::fuzz_target;
use ordstat::generators::{generate, GeneratorKind, GeneratorSpec};

fuzz_target!(|data: &str| {
    let Ok(spec) = data.parse::<GeneratorSpec>() else {
        return;
    };
    // Canonical text must round-trip.
    let round: GeneratorSpec = spec.to_string().parse().expect("canonical form parses");
    assert_eq!(round, spec);

    if spec.n <= 4096 {
        let seq = generate(&spec).expect("parsed specs generate");
        assert_eq!(seq.len(), spec.n);
        if spec.kind == GeneratorKind::Uniform {
            let mut keys: Vec<i64> = seq.keys().copied().collect();
            keys.sort_unstable();
            assert!(keys.iter().enumerate().all(|(idx, &k)| k == idx as i64 + 1));
        }
    }
});
