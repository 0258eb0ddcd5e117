//! Fuzz the experiment-spec JSON schema, and for tiny accepted specs run the
//! whole experiment pipeline with its inline trace validation.

#![no_main]

use libfuzzer_sys::fuzz_target;
use ordstat::experiments::{run_experiment, ExperimentSpec};

fuzz_target!(|data: &[u8]| {
    let Ok(spec) = serde_json::from_slice::<ExperimentSpec>(data) else {
        return;
    };
    if spec.validate().is_err() {
        return;
    }
    let small = spec.algorithms.len() <= 3
        && spec.sizes.len() <= 3
        && spec.sizes.iter().all(|&n| n <= 128)
        && spec.repetitions <= 3
        && spec.k.map_or(true, |k| k <= 1 << 20);
    if small {
        let rows = run_experiment(&spec).expect("validated small spec runs");
        assert_eq!(rows.len(), spec.algorithms.len() * spec.sizes.len());
    }
});
