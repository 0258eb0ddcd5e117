//! Differential fuzzing: every algorithm variant must agree with the sorting
//! oracle on arbitrary keys (duplicates included) and pass all trace checks.

#![no_main]

use arbitrary::Arbitrary;
use libfuzzer_sys::fuzz_target;
use ordstat::algorithms::{run, sorting_oracle_select, AlgorithmId, SelectionRequest};
use ordstat::instrument::validate_run;
use ordstat::primitives::{MedianPolicy, Sequence};

#[derive(Arbitrary, Debug)]
struct Input {
    keys: Vec<i16>,
    rank_seed: u16,
    algorithm: u8,
    seed: u64,
}

fn algorithm_for(selector: u8, seed: u64) -> AlgorithmId {
    match selector % 10 {
        0 => AlgorithmId::classic(3, MedianPolicy::Lower).unwrap(),
        1 => AlgorithmId::classic(3, MedianPolicy::Upper).unwrap(),
        2 => AlgorithmId::classic(4, MedianPolicy::Lower).unwrap(),
        3 => AlgorithmId::classic(4, MedianPolicy::Upper).unwrap(),
        4 => AlgorithmId::classic(5, MedianPolicy::Lower).unwrap(),
        5 => AlgorithmId::RepeatedStep3,
        6 => AlgorithmId::RepeatedStep4,
        7 => AlgorithmId::ShiftingTarget4,
        8 => AlgorithmId::Hybrid4,
        _ => AlgorithmId::RandomizedQuickselect { seed },
    }
}

fuzz_target!(|input: Input| {
    let mut keys = input.keys;
    keys.truncate(64);
    if keys.is_empty() {
        return;
    }
    let n = keys.len();
    let i = input.rank_seed as usize % n + 1;
    let sequence = Sequence::from_keys(keys.iter().map(|&k| k as i64).collect::<Vec<_>>());
    let alg = algorithm_for(input.algorithm, input.seed);

    let req = SelectionRequest::new(sequence.clone(), i).expect("valid rank");
    let expected = sorting_oracle_select(&req);
    let report = run(&alg, req).expect("selection runs");
    assert_eq!(
        (&report.result_key, report.result_origin),
        (&expected.key, expected.origin_index),
        "{alg} disagreed with the oracle on {keys:?} i={i}"
    );
    validate_run(&report).expect("trace invariants hold");
});
