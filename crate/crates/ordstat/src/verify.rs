//! Oracle-equivalence verification: exhaustive over small permutations,
//! randomized at larger sizes, with every trace validated on the way.

use crate::algorithms::{run, sorting_oracle_select, AlgorithmId, SelectionRequest};
use crate::error::Result;
use crate::generators::{exhaustive_permutations, generate, GeneratorKind, GeneratorSpec};
use crate::instrument::validate_run;
use crate::primitives::{Element, MedianPolicy, Sequence};
use crate::rng::mix_seed;

const MAX_REPORTED_FAILURES: usize = 8;

/// A selection result that disagreed with the sorting oracle.
#[derive(Debug, Clone)]
pub struct Mismatch {
    pub algorithm: String,
    pub keys: Vec<i64>,
    pub i: usize,
    pub expected: i64,
    pub got: i64,
}

impl std::fmt::Display for Mismatch {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "{}: keys {:?} i={} expected {} got {}",
            self.algorithm, self.keys, self.i, self.expected, self.got
        )
    }
}

/// Outcome of a verification sweep. `passed()` means zero mismatches and
/// zero trace-check failures.
#[derive(Debug, Default, Clone)]
pub struct VerifySummary {
    pub equivalence_checks: u64,
    pub events_checked: u64,
    pub mismatches_total: u64,
    pub trace_failures_total: u64,
    /// First few failures, for diagnostics.
    pub mismatches: Vec<Mismatch>,
    pub trace_failures: Vec<String>,
}

impl VerifySummary {
    pub fn passed(&self) -> bool {
        self.mismatches_total == 0 && self.trace_failures_total == 0
    }

    pub fn merge(&mut self, other: VerifySummary) {
        self.equivalence_checks += other.equivalence_checks;
        self.events_checked += other.events_checked;
        self.mismatches_total += other.mismatches_total;
        self.trace_failures_total += other.trace_failures_total;
        for m in other.mismatches {
            if self.mismatches.len() < MAX_REPORTED_FAILURES {
                self.mismatches.push(m);
            }
        }
        for t in other.trace_failures {
            if self.trace_failures.len() < MAX_REPORTED_FAILURES {
                self.trace_failures.push(t);
            }
        }
    }

    fn record_mismatch(&mut self, m: Mismatch) {
        self.mismatches_total += 1;
        if self.mismatches.len() < MAX_REPORTED_FAILURES {
            self.mismatches.push(m);
        }
    }

    fn record_trace_failure(&mut self, message: String) {
        self.trace_failures_total += 1;
        if self.trace_failures.len() < MAX_REPORTED_FAILURES {
            self.trace_failures.push(message);
        }
    }
}

/// Every algorithm variant checked against the oracle by default.
pub fn default_algorithms() -> Vec<AlgorithmId> {
    vec![
        AlgorithmId::classic(3, MedianPolicy::Lower).unwrap(),
        AlgorithmId::classic(3, MedianPolicy::Upper).unwrap(),
        AlgorithmId::classic(4, MedianPolicy::Lower).unwrap(),
        AlgorithmId::classic(4, MedianPolicy::Upper).unwrap(),
        AlgorithmId::classic(5, MedianPolicy::Lower).unwrap(),
        AlgorithmId::classic(5, MedianPolicy::Upper).unwrap(),
        AlgorithmId::RepeatedStep3,
        AlgorithmId::RepeatedStep4,
        AlgorithmId::ShiftingTarget4,
        AlgorithmId::Hybrid4,
        AlgorithmId::RandomizedQuickselect { seed: 0 },
    ]
}

fn check_one(
    summary: &mut VerifySummary,
    alg: &AlgorithmId,
    sequence: &Sequence<i64>,
    i: usize,
) -> Result<()> {
    let req = SelectionRequest::new(sequence.clone(), i)?;
    let expected = sorting_oracle_select(&req);
    let report = run(alg, req)?;
    summary.equivalence_checks += 1;
    summary.events_checked += report.iterations.len() as u64;
    if (report.result_key, report.result_origin) != (expected.key, expected.origin_index) {
        summary.record_mismatch(Mismatch {
            algorithm: alg.name(),
            keys: sequence.keys().copied().collect(),
            i,
            expected: expected.key,
            got: report.result_key,
        });
    }
    if let Err(e) = validate_run(&report) {
        summary.record_trace_failure(format!("{} n={} i={i}: {e}", alg.name(), sequence.len()));
    }
    Ok(())
}

/// Oracle equivalence over every permutation of sizes 1..=max_n and every
/// valid rank, for each algorithm.
pub fn exhaustive_equivalence(algorithms: &[AlgorithmId], max_n: usize) -> Result<VerifySummary> {
    let mut summary = VerifySummary::default();
    for n in 1..=max_n {
        for perm in exhaustive_permutations(n)? {
            let sequence = Sequence::from_keys(perm);
            for i in 1..=n {
                for alg in algorithms {
                    check_one(&mut summary, alg, &sequence, i)?;
                }
            }
        }
    }
    Ok(summary)
}

/// Seeded random trials at the given sizes; trial t draws its target from
/// the nine-quantile sweep, so all regimes of the target-dependent variants
/// are exercised.
pub fn randomized_equivalence(
    algorithms: &[AlgorithmId],
    sizes: &[usize],
    trials: usize,
    seed: u64,
) -> Result<VerifySummary> {
    let mut summary = VerifySummary::default();
    for (size_idx, &n) in sizes.iter().enumerate() {
        for trial in 0..trials {
            let trial_seed = mix_seed(mix_seed(seed, size_idx as u64), trial as u64);
            let spec = GeneratorSpec::new(GeneratorKind::Uniform, n, trial_seed);
            let sequence = generate(&spec)?;
            let decile = trial % 9 + 1;
            let i = ((decile * n + 5) / 10).clamp(1, n);
            for alg in algorithms {
                let alg = alg.with_seed(mix_seed(trial_seed, 0x7A11));
                check_one(&mut summary, &alg, &sequence, i)?;
            }
        }
    }
    Ok(summary)
}

/// Checks an arbitrary selector against the sorting oracle on every
/// permutation of sizes 1..=max_n. This is how a deliberately broken
/// implementation is shown to be caught by the harness.
pub fn exhaustive_equivalence_with<F>(
    name: &str,
    mut select: F,
    max_n: usize,
) -> Result<VerifySummary>
where
    F: FnMut(&Sequence<i64>, usize) -> Result<Element<i64>>,
{
    let mut summary = VerifySummary::default();
    for n in 1..=max_n {
        for perm in exhaustive_permutations(n)? {
            let sequence = Sequence::from_keys(perm);
            for i in 1..=n {
                let req = SelectionRequest::new(sequence.clone(), i)?;
                let expected = sorting_oracle_select(&req);
                let got = select(&sequence, i)?;
                summary.equivalence_checks += 1;
                if (got.key, got.origin_index) != (expected.key, expected.origin_index) {
                    summary.record_mismatch(Mismatch {
                        algorithm: name.into(),
                        keys: sequence.keys().copied().collect(),
                        i,
                        expected: expected.key,
                        got: got.key,
                    });
                }
            }
        }
    }
    Ok(summary)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exhaustive_small_all_pass() {
        let summary = exhaustive_equivalence(&default_algorithms(), 5).unwrap();
        assert!(summary.passed(), "{:?}", summary.mismatches);
        // sum over n of n! * n * |algorithms|
        let pairs: u64 = (1..=5u64).map(|n| (1..=n).product::<u64>() * n).sum();
        assert_eq!(summary.equivalence_checks, pairs * 11);
    }

    #[test]
    fn randomized_trials_pass() {
        let summary =
            randomized_equivalence(&default_algorithms(), &[100, 1000], 6, 99).unwrap();
        assert!(summary.passed(), "{:?}", summary.mismatches);
        assert_eq!(summary.equivalence_checks, 2 * 6 * 11);
        assert!(summary.events_checked > 0);
    }

    /// A mutant selector with one flipped comparison must produce a reported
    /// counterexample.
    #[test]
    fn mutant_is_caught() {
        let mutant = |seq: &Sequence<i64>, i: usize| {
            let req = SelectionRequest::new(seq.clone(), i)?;
            let mut elements = req.sequence.elements().to_vec();
            // Flipped comparison: sorts descending, then indexes as if
            // ascending.
            elements.sort_by(|a, b| (&b.key, b.origin_index).cmp(&(&a.key, a.origin_index)));
            Ok(elements[i - 1].clone())
        };
        let summary = exhaustive_equivalence_with("mutant", mutant, 3).unwrap();
        assert!(!summary.passed());
        assert!(!summary.mismatches.is_empty());
        let first = &summary.mismatches[0];
        assert_ne!(first.expected, first.got);
    }
}
